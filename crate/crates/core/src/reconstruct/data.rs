use std::sync::Arc;

use super::theta::ThetaGrid;
use crate::compat::{Components, DataSource, GaussCodazziData};
use crate::error::{Error, Result};
use crate::jet::{Jet, MAX_ORDER};
use crate::surface::{MetricChart, Point};

/// `T = √(1−ν²) e^{(θ+θₐ)J} e₁` and the traceless `S` with `ST = −∇ν`.
struct AngleData {
    theta: Arc<ThetaGrid>,
    assoc: f64,
}

impl DataSource for AngleData {
    fn components(&self, chart: &MetricChart, at: Point, order: usize) -> Result<Components> {
        let seed = (order + 1).min(MAX_ORDER);
        let order = seed - 1;
        let geom = chart.geometry(at, seed)?;
        let (u, v) = Jet::seed(at.u, at.v, seed);
        let nu_full = self.theta.field.nu.eval(u, v);
        let [n1, n2] = geom.d_frame(&nu_full);
        let nu = nu_full.truncate(order);
        let r = (1.0 - nu * nu).sqrt();
        if !(r.value() >= 1e-10) {
            return Err(Error::FlatPoint { u: at.u, v: at.v, nu_sq: nu.value().powi(2) });
        }
        let phi = self.theta.jet(at, order)? + self.assoc;
        let (cos, sin) = (phi.cos(), phi.sin());
        let t = [r * cos, r * sin];
        // σ = −(ν₁ + iν₂) e^{iφ} / r
        let s = [-(n1 * cos - n2 * sin) / r, -(n1 * sin + n2 * cos) / r];
        Ok(Components { nu, t, s })
    }
}

/// Gauss–Codazzi data of the associate member `θₐ` built from `θ`.
pub fn build_data(theta: &ThetaGrid, assoc_angle: f64) -> GaussCodazziData {
    GaussCodazziData::from_source(
        theta.field.chart.clone(),
        Arc::new(AngleData { theta: Arc::new(theta.clone()), assoc: assoc_angle }),
    )
}
