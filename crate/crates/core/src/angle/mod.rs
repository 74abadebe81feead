//! The angle-function system of a minimal surface in `M²(c)×R`.
//!
//! A function `ν` on a chart is the angle function of a minimal isometric
//! immersion exactly when it satisfies the first-order equation
//! `‖∇ν‖² = −(1−ν²)(K−cν²)` together with the Jacobi equation
//! `Δν − 2Kν + c(1+ν²)ν = 0`. This module evaluates those residuals and
//! their differential consequences, builds the order-zero obstruction
//! polynomial in `s = ν²`, and locates the admissible roots.

mod obstruction;
pub mod poly;

pub use obstruction::{
    candidate_angles, filtered_candidates, obstruction_coeffs, propagate_gradient, Candidate, CandidateOptions,
    CandidateSet, ObstructionCoeffs, Rejection,
};
pub use poly::{Poly, Root};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::surface::{Expr, FrameDerivatives, MetricChart, Point};

/// Below this, `∇ν` counts as zero for the second-order frame equations.
pub const EPS_ANGLE_GRAD: f64 = 1e-10;

/// A candidate angle function on a chart.
#[derive(Debug, Clone)]
pub struct AngleField {
    pub chart: MetricChart,
    pub nu: Expr,
}

/// `ν`, `K` and their derivatives at a point, in the natural frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnglePoint {
    pub at: Point,
    pub c: f64,
    pub nu: f64,
    pub nu1: f64,
    pub nu2: f64,
    pub nu11: f64,
    pub nu12: f64,
    pub nu22: f64,
    pub k: f64,
    pub k1: f64,
    pub k2: f64,
    pub lap_k: f64,
}

/// Every residual of the system at a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Residuals {
    pub m1: f64,
    pub m2: f64,
    pub m3: f64,
    /// `None` where `∇ν` vanishes.
    pub e2: Option<(f64, f64)>,
}

impl AngleField {
    pub fn new(chart: MetricChart, nu: Expr) -> Self {
        AngleField { chart, nu }
    }

    /// The field `−ν` on the same chart.
    pub fn negated(&self) -> Self {
        AngleField { chart: self.chart.clone(), nu: self.nu.neg() }
    }

    pub fn value(&self, at: Point) -> Result<f64> {
        self.chart.check_point(at)?;
        let v = self.nu.value(at);
        if !v.is_finite() {
            return Err(Error::NonFinite { what: "angle function", u: at.u, v: at.v });
        }
        Ok(v)
    }

    /// Frame derivatives of `ν` up to second order.
    pub fn derivatives(&self, at: Point) -> Result<FrameDerivatives<f64>> {
        let geom = self.chart.geometry(at, 2)?;
        let (u, v) = Jet::seed(at.u, at.v, 2);
        let nu = self.nu.eval(u, v);
        if !nu.is_finite() {
            return Err(Error::NonFinite { what: "angle function", u: at.u, v: at.v });
        }
        Ok(geom.derivatives(&nu).values())
    }

    /// Gathers all pointwise inputs of the residuals.
    pub fn point(&self, at: Point) -> Result<AnglePoint> {
        let d = self.derivatives(at)?;
        let jets = self.chart.curvature_jets(at, 0)?;
        let k = jets.k.values();
        Ok(AnglePoint {
            at,
            c: self.chart.c,
            nu: d.f,
            nu1: d.f1,
            nu2: d.f2,
            nu11: d.f11,
            nu12: 0.5 * (d.f12 + d.f21),
            nu22: d.f22,
            k: k.f,
            k1: k.f1,
            k2: k.f2,
            lap_k: jets.laplacian.value(),
        })
    }

    pub fn residuals(&self, at: Point) -> Result<Residuals> {
        let p = self.point(at)?;
        Ok(Residuals { m1: p.m1(), m2: p.m2(), m3: p.m3(), e2: p.e2() })
    }
}

impl AnglePoint {
    pub fn m1(&self) -> f64 {
        let (nu, c, k) = (self.nu, self.c, self.k);
        self.nu1 * self.nu1 + self.nu2 * self.nu2 + (1.0 - nu * nu) * (k - c * nu * nu)
    }

    pub fn m2(&self) -> f64 {
        let (nu, c, k) = (self.nu, self.c, self.k);
        self.nu11 + self.nu22 - 2.0 * k * nu + c * (1.0 + nu * nu) * nu
    }

    pub fn m3(&self) -> f64 {
        m3_residual(
            self.c,
            self.nu,
            self.nu1 * self.k1 + self.nu2 * self.k2,
            self.k1 * self.k1 + self.k2 * self.k2,
            self.k,
            self.lap_k,
        )
    }

    pub fn e2(&self) -> Option<(f64, f64)> {
        if self.nu1.hypot(self.nu2) < EPS_ANGLE_GRAD {
            return None;
        }
        let (nu, c, k) = (self.nu, self.c, self.k);
        let kc = k - c * nu * nu;
        let (n1, n2) = (self.nu1, self.nu2);
        let r22 = 2.0 * kc * self.nu12 - (self.k1 * n2 + self.k2 * n1 - 6.0 * c * nu * n1 * n2);
        let r23 = kc * (self.nu11 - self.nu22) - (-3.0 * c * nu * (n1 * n1 - n2 * n2) + self.k1 * n1 - self.k2 * n2);
        Some((r22, r23))
    }
}

/// Left minus right side of the third-order consequence of the system,
/// `6cν⟨∇ν,∇K⟩ = ‖∇K‖² − (K−cν²)ΔK + 4(K−c)(K−cν²)(K+2cν²)`.
pub fn m3_residual(c: f64, nu: f64, grad_dot: f64, grad_k_sq: f64, k: f64, lap_k: f64) -> f64 {
    let s = nu * nu;
    let lhs = 6.0 * c * nu * grad_dot;
    let rhs = grad_k_sq - (k - c * s) * lap_k + 4.0 * (k - c) * (k - c * s) * (k + 2.0 * c * s);
    lhs - rhs
}

/// `‖∇K‖² − KΔK + 4K³`.
pub fn ricci_residual(grad_k_sq: f64, k: f64, lap_k: f64) -> f64 {
    grad_k_sq - k * lap_k + 4.0 * k * k * k
}

/// Ricci residual of a chart and the discrepancy between it and the
/// negated third-order residual taken at `c = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RicciReport {
    pub at: Point,
    pub residual: f64,
    pub reduction_gap: f64,
}

pub fn residual_ricci(chart: &MetricChart, at: Point) -> Result<RicciReport> {
    let jets = chart.curvature_jets(at, 0)?;
    let k = jets.k.values();
    let g2 = k.f1 * k.f1 + k.f2 * k.f2;
    let lap = jets.laplacian.value();
    let residual = ricci_residual(g2, k.f, lap);
    let reduced = -m3_residual(0.0, 0.0, 0.0, g2, k.f, lap);
    Ok(RicciReport { at, residual, reduction_gap: (residual - reduced).abs() })
}

pub fn residual_m1(field: &AngleField, at: Point) -> Result<f64> {
    let d = field.derivatives(at)?;
    let k = crate::surface::curvature(&field.chart, at)?;
    let c = field.chart.c;
    let s = d.f * d.f;
    Ok(d.f1 * d.f1 + d.f2 * d.f2 + (1.0 - s) * (k - c * s))
}

pub fn residual_m2(field: &AngleField, at: Point) -> Result<f64> {
    let d = field.derivatives(at)?;
    let k = crate::surface::curvature(&field.chart, at)?;
    let c = field.chart.c;
    Ok(d.laplacian() - 2.0 * k * d.f + c * (1.0 + d.f * d.f) * d.f)
}

pub fn residual_m3(field: &AngleField, at: Point) -> Result<f64> {
    Ok(field.point(at)?.m3())
}

/// The two second-order frame residuals; errors where `∇ν` vanishes.
pub fn e2_residuals(field: &AngleField, at: Point) -> Result<(f64, f64)> {
    field.point(at)?.e2().ok_or(Error::AngleGradientVanishes { u: at.u, v: at.v })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{Domain, Profile};

    fn sec_chart() -> MetricChart {
        MetricChart::conformal(Expr::new(|u, _| u.cos().recip()), Domain::new(-1.2, 1.2, -1.0, 1.0).unwrap(), -1.0)
            .unwrap()
    }

    fn saearp(l: f64, d: f64) -> (MetricChart, Expr, Expr) {
        let q = d * d - 1.0;
        let lam = move |u: Jet| (q * u.cosh() * u.cosh() + l * l + 1.0).sqrt();
        let chart =
            MetricChart::warped(Profile::new(lam), Domain::new(-1.5, 1.5, -2.0, 2.0).unwrap(), -1.0).unwrap();
        let nu = Expr::new(move |u, _| q.sqrt() * u.cosh() / lam(u));
        let nu_bar = Expr::new(move |u, _| q.sqrt() * u.sinh() / lam(u));
        (chart, nu, nu_bar)
    }

    fn flat() -> MetricChart {
        MetricChart::warped(Profile::new(|_| Jet::constant(1.0)), Domain::new(-1.0, 1.0, -1.0, 1.0).unwrap(), 1.0)
            .unwrap()
    }

    #[test]
    fn catenoid_angle_examples() {
        let f = AngleField::new(sec_chart(), Expr::new(|u, _| u.sin()));
        assert!(residual_m1(&f, Point::new(0.0, 0.0)).unwrap().abs() < 1e-15);
        assert!(residual_m2(&f, Point::new(0.5, 0.0)).unwrap().abs() < 1e-9);
        let (a, b) = e2_residuals(&f, Point::new(0.3, 0.2)).unwrap();
        assert!(a.abs() < 1e-8 && b.abs() < 1e-8);
        let d = f.derivatives(Point::new(0.0, 0.0)).unwrap();
        assert!((d.f1 * d.f1 + d.f2 * d.f2 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn saearp_angle_examples() {
        let (chart, nu, nu_bar) = saearp(1.0, 2.0);
        let f = AngleField::new(chart.clone(), nu);
        let g = AngleField::new(chart, nu_bar);
        let p = Point::new(0.4, 0.3);
        assert!(residual_m1(&f, p).unwrap().abs() < 1e-9);
        assert!(residual_m2(&f, p).unwrap().abs() < 1e-9);
        assert!(residual_m2(&g, p).unwrap().abs() < 1e-9);
        assert!(residual_m3(&f, Point::new(0.6, 0.0)).unwrap().abs() < 1e-8);
        let (a, b) = e2_residuals(&f, p).unwrap();
        assert!(a.abs() < 1e-8 && b.abs() < 1e-8);
        let s = f.value(p).unwrap().powi(2);
        let lam2 = 3.0 * 0.4f64.cosh().powi(2) + 2.0;
        assert!((s - (1.0 - 2.0 / lam2)).abs() < 1e-14);
    }

    #[test]
    fn constant_cases() {
        let zero = AngleField::new(flat(), Expr::constant(0.0));
        let r = zero.residuals(Point::new(0.1, 0.2)).unwrap();
        assert_eq!((r.m1, r.m2, r.m3), (0.0, 0.0, 0.0));
        assert!(r.e2.is_none());
        assert!(matches!(
            e2_residuals(&zero, Point::new(0.1, 0.2)),
            Err(Error::AngleGradientVanishes { .. })
        ));
        // K = c with ν = ±1.
        let sphere = MetricChart::warped(Profile::new(|u| u.cos()), Domain::new(-1.0, 1.0, -1.0, 1.0).unwrap(), 1.0)
            .unwrap();
        for a in [1.0, -1.0] {
            let r = AngleField::new(sphere.clone(), Expr::constant(a)).residuals(Point::new(0.3, 0.0)).unwrap();
            assert!(r.m1.abs() < 1e-14 && r.m2.abs() < 1e-14 && r.m3.abs() < 1e-13, "{r:?}");
        }
    }

    #[test]
    fn m3_detects_violations() {
        let (chart, _, _) = saearp(1.0, 2.0);
        let f = AngleField::new(chart, Expr::new(|u, v| 0.3 * u.sin() + 0.2 * v));
        assert!(residual_m1(&f, Point::new(0.5, 0.1)).unwrap().abs() > 1e-2);
        assert!(residual_m3(&f, Point::new(0.5, 0.1)).unwrap().abs() > 1e-2);
    }

    #[test]
    fn ricci_examples() {
        let hyp = MetricChart::warped(Profile::new(|u| u.cosh()), Domain::new(-1.0, 1.0, -1.0, 1.0).unwrap(), -1.0)
            .unwrap();
        let r = residual_ricci(&hyp, Point::new(0.2, 0.0)).unwrap();
        assert!((r.residual + 4.0).abs() < 1e-12);
        assert_eq!(residual_ricci(&flat(), Point::new(0.0, 0.0)).unwrap().residual, 0.0);
        let (chart, _, _) = saearp(1.0, 2.0);
        for i in 0..100 {
            let u = -1.4 + 2.8 * (i as f64) / 99.0;
            assert!(residual_ricci(&chart, Point::new(u, 0.1)).unwrap().reduction_gap < 1e-12);
        }
    }

    #[test]
    fn negation_leaves_residual_magnitudes() {
        let (chart, nu, _) = saearp(1.0, 2.0);
        let f = AngleField::new(chart, nu);
        let g = f.negated();
        let p = Point::new(0.7, -0.5);
        let (a, b) = (f.residuals(p).unwrap(), g.residuals(p).unwrap());
        assert_eq!(a.m1.abs(), b.m1.abs());
        assert_eq!(a.m2.abs(), b.m2.abs());
        assert_eq!(a.m3.abs(), b.m3.abs());
    }
}
