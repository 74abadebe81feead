//! A-posteriori checks of a reconstructed immersion by finite differences.

use rayon::prelude::*;
use serde::Serialize;

use super::integrate::ImmersionGrid;
use super::model::Vec4;
use crate::compat::GaussCodazziData;
use crate::error::Result;

/// Largest errors over interior nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VerifyReport {
    /// Relative error of the pullback metric against `ds²`.
    pub metric_error: f64,
    /// Second fundamental form against `(s₁, s₂, −s₁)`, in the frame.
    pub sff_error: f64,
    /// Largest discrete `|H|`.
    pub mean_curvature: f64,
    pub gram_drift: f64,
    /// `|⟨N, ξ⟩ − ν|`.
    pub normal_error: f64,
    /// `|dh(eᵢ) − ⟨eᵢ, T⟩|`.
    pub height_error: f64,
    /// `|c⟨p,p⟩ − 1|`.
    pub quadric_error: f64,
}

/// Thresholds applied by [`VerifyReport::passes`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VerifyThresholds {
    pub metric: f64,
    pub sff: f64,
    pub mean_curvature: f64,
    pub drift: f64,
    pub normal: f64,
    pub height: f64,
    pub quadric: f64,
}

impl Default for VerifyThresholds {
    fn default() -> Self {
        VerifyThresholds {
            metric: 1e-5,
            sff: 1e-3,
            mean_curvature: 5e-4,
            drift: 1e-6,
            normal: 1e-6,
            height: 1e-6,
            quadric: 1e-6,
        }
    }
}

impl VerifyReport {
    /// Names of the fields that exceed their thresholds.
    pub fn failures(&self, t: &VerifyThresholds) -> Vec<&'static str> {
        [
            ("metric_error", self.metric_error, t.metric),
            ("sff_error", self.sff_error, t.sff),
            ("mean_curvature", self.mean_curvature, t.mean_curvature),
            ("gram_drift", self.gram_drift, t.drift),
            ("normal_error", self.normal_error, t.normal),
            ("height_error", self.height_error, t.height),
            ("quadric_error", self.quadric_error, t.quadric),
        ]
        .into_iter()
        .filter(|(_, v, lim)| !(v <= lim))
        .map(|(name, _, _)| name)
        .collect()
    }

    pub fn passes(&self, t: &VerifyThresholds) -> bool {
        self.failures(t).is_empty()
    }
}

/// Sixth-order first derivative, seven points.
const D1: [f64; 7] = [-1.0 / 60.0, 3.0 / 20.0, -3.0 / 4.0, 0.0, 3.0 / 4.0, -3.0 / 20.0, 1.0 / 60.0];
/// Fourth-order second derivative and its matching first derivative for
/// the mixed term, five points.
const D2: [f64; 5] = [-1.0 / 12.0, 4.0 / 3.0, -5.0 / 2.0, 4.0 / 3.0, -1.0 / 12.0];
const D1_SHORT: [f64; 5] = [1.0 / 12.0, -2.0 / 3.0, 0.0, 2.0 / 3.0, -1.0 / 12.0];

#[derive(Default, Clone, Copy)]
struct Acc {
    metric: f64,
    sff: f64,
    h: f64,
    normal: f64,
    height: f64,
}

impl Acc {
    fn max(self, o: Acc) -> Acc {
        Acc {
            metric: self.metric.max(o.metric),
            sff: self.sff.max(o.sff),
            h: self.h.max(o.h),
            normal: self.normal.max(o.normal),
            height: self.height.max(o.height),
        }
    }
}

/// Finite-difference checks on nodes at least three away from the
/// boundary: sixth order for first derivatives, fourth order for second.
pub fn verify_immersion(im: &ImmersionGrid, data: &GaussCodazziData) -> Result<VerifyReport> {
    let g = &im.grid;
    let model = im.model;
    let (du, dv) = (g.du(), g.dv());
    let pos = |i: usize, j: usize| im.state(i, j).position();
    let comb = |w: &[f64], f: &dyn Fn(usize) -> Vec4, scale: f64| -> Vec4 {
        let mut out = [0.0; 4];
        for (k, wk) in w.iter().enumerate() {
            let x = f(k);
            for m in 0..4 {
                out[m] += wk * x[m];
            }
        }
        out.map(|x| x / scale)
    };

    let interior: Vec<(usize, usize)> = (3..g.nu.saturating_sub(3))
        .flat_map(|i| (3..g.nv.saturating_sub(3)).map(move |j| (i, j)))
        .collect();
    let acc = interior
        .par_iter()
        .map(|&(i, j)| -> Result<Acc> {
            let at = g.point(i, j);
            let geom = data.chart.geometry(at, 1)?;
            let vals = data.values(at)?;
            let st = im.state(i, j);

            let xu = comb(&D1, &|k| pos(i + k - 3, j), du);
            let xv = comb(&D1, &|k| pos(i, j + k - 3), dv);
            let xuu = comb(&D2, &|k| pos(i + k - 2, j), du * du);
            let xvv = comb(&D2, &|k| pos(i, j + k - 2), dv * dv);
            let xuv = comb(&D1_SHORT, &|a| comb(&D1_SHORT, &|b| pos(i + a - 2, j + b - 2), dv), du);

            let e = model.dot4(&xu, &xu);
            let f = model.dot4(&xu, &xv);
            let gg = model.dot4(&xv, &xv);
            let [ge, gf, ggv] = geom.metric.map(|x| x.value());
            let scale = ge.abs().max(ggv.abs());
            let metric = [(e - ge).abs(), (f - gf).abs(), (gg - ggv).abs()].iter().fold(0.0f64, |m, x| m.max(*x)) / scale;

            let n = st.n;
            let (l, m, nn) = (model.dot4(&xuu, &n), model.dot4(&xuv, &n), model.dot4(&xvv, &n));
            let h = (gg * l - 2.0 * f * m + e * nn) / (2.0 * (e * gg - f * f));

            let fr = geom.frame.map(|r| r.map(|x| x.value()));
            let ii = [[l, m], [m, nn]];
            let sff = |a: usize, b: usize| {
                let mut s = 0.0;
                for p in 0..2 {
                    for q in 0..2 {
                        s += fr[a][p] * fr[b][q] * ii[p][q];
                    }
                }
                s
            };
            let [s1, s2] = vals.s;
            let sff_err = [(sff(0, 0) - s1).abs(), (sff(0, 1) - s2).abs(), (sff(1, 1) + s1).abs()]
                .iter()
                .fold(0.0f64, |a, b| a.max(*b));

            let (hu, hv) = (xu[3], xv[3]);
            let height = (0..2)
                .map(|a| (fr[a][0] * hu + fr[a][1] * hv - vals.t[a]).abs())
                .fold(0.0, f64::max);

            Ok(Acc { metric, sff: sff_err, h: h.abs(), normal: (n[3] - vals.nu).abs(), height })
        })
        .try_reduce(Acc::default, |a, b| Ok(a.max(b)))?;

    let normal_all = im
        .states
        .iter()
        .zip(&im.nu)
        .map(|(s, nu)| (s.n[3] - nu).abs())
        .fold(acc.normal, f64::max);
    let quadric_error = im.states.iter().map(|s| model.quadric_error(&s.p)).fold(0.0, f64::max);
    Ok(VerifyReport {
        metric_error: acc.metric,
        sff_error: acc.sff,
        mean_curvature: acc.h,
        gram_drift: im.max_drift,
        normal_error: normal_all,
        height_error: acc.height,
        quadric_error,
    })
}
