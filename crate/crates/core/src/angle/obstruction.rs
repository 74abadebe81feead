//! The order-zero obstruction polynomial and its admissible roots.
//!
//! Where `∇K ≠ 0`, any angle function satisfies `Q(x, ν(x)²) = 0` with
//!
//! ```text
//! Q(s) = A²F² + 36c²s²E² + 36c²K₁²s(1−s)(K−cs)F²
//! ```
//!
//! and `A`, `E`, `F` polynomial in `s` with coefficients built from the
//! curvature jet in the gradient frame. Roots of `Q` are necessary but not
//! sufficient: each is tested against the first-order equation using the
//! gradient of the root branch itself, obtained by implicit
//! differentiation of `Q(x, s(x)) = 0`.

use serde::Serialize;

use super::poly::{real_roots, Poly};
use crate::error::{Error, Result};
use crate::jet::Scalar;
use crate::surface::{CurvatureJet, GradientQuantities, MetricChart, Point, EPS_GRAD};

/// `A`, `E`, `F` and `Q` as polynomials in `s = ν²` at one point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObstructionCoeffs {
    pub c: f64,
    pub quantities: Quantities,
    /// Degree 2.
    pub a: Poly,
    /// Degree 2.
    pub e: Poly,
    /// Degree 1.
    pub f: Poly,
    /// Degree at most 6.
    pub q: Poly,
    /// Largest coefficient among the three summands of `Q`, the scale
    /// against which cancellation is judged.
    pub term_scale: f64,
}

/// Serializable copy of the gradient-frame curvature data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Quantities {
    pub k: f64,
    pub k1: f64,
    pub k11: f64,
    pub k22: f64,
    pub k12: f64,
    pub lap: f64,
    pub lap_2: f64,
}

impl From<GradientQuantities<f64>> for Quantities {
    fn from(g: GradientQuantities<f64>) -> Self {
        Quantities { k: g.k, k1: g.k1, k11: g.k11, k22: g.k22, k12: g.k12, lap: g.lap, lap_2: g.lap_2 }
    }
}

struct Polys<S> {
    a: Poly<S>,
    e: Poly<S>,
    f: Poly<S>,
    terms: [Poly<S>; 3],
}

fn polys<S: Scalar>(g: &GradientQuantities<S>, c: f64) -> Polys<S> {
    let p = |v: Vec<S>| Poly::new(v);
    let s = |x: f64| S::from(x);
    let kc = p(vec![g.k, s(-c)]);
    let k2c = p(vec![g.k, s(2.0 * c)]);
    let k4c = p(vec![g.k, s(-4.0 * c)]);
    let k_minus_c = g.k - c;
    let k1sq = g.k1 * g.k1;

    let a = &(&p(vec![k1sq]) + &(&kc * &p(vec![-g.lap]))) + &(&kc * &k2c).scale(k_minus_c * 4.0);
    let inner = &p(vec![g.k12 * g.lap - g.k1 * g.lap_2]) + &k2c.scale(k_minus_c * g.k12 * (-4.0));
    let e = &p(vec![k1sq * g.k12]) + &(&kc * &inner);
    let f = &p(vec![g.k * g.lap - k1sq, (g.k11 * 2.0 + g.k22 * 8.0) * (-c)]) + &k4c.scale(g.k * k_minus_c * (-4.0));

    let c2 = 36.0 * c * c;
    let ff = &f * &f;
    let t1 = &(&a * &a) * &ff;
    let t2 = &(&e * &e) * &p(vec![s(0.0), s(0.0), s(c2)]);
    let t3 = &(&p(vec![s(0.0), k1sq * c2, k1sq * (-c2)]) * &kc) * &ff;
    Polys { a, e, f, terms: [t1, t2, t3] }
}

fn pad(mut p: Poly, len: usize) -> Poly {
    p.coeffs.resize(len, 0.0);
    p
}

impl ObstructionCoeffs {
    fn from_quantities(g: &GradientQuantities<f64>, c: f64) -> Self {
        let ps = polys(g, c);
        let [t1, t2, t3] = &ps.terms;
        let q = &(t1 + t2) + t3;
        let term_scale = ps.terms.iter().map(Poly::norm).fold(0.0, f64::max);
        ObstructionCoeffs {
            c,
            quantities: (*g).into(),
            a: pad(ps.a, 3),
            e: pad(ps.e, 3),
            f: pad(ps.f, 2),
            q: pad(q, 7),
            term_scale,
        }
    }

    /// The bracket defining `Q`, evaluated directly from `A`, `E`, `F`.
    pub fn bracket(&self, s: f64) -> f64 {
        let (a, e, f) = (self.a.eval(s), self.e.eval(s), self.f.eval(s));
        let g = &self.quantities;
        let c2 = 36.0 * self.c * self.c;
        a * a * f * f + c2 * s * s * e * e + c2 * g.k1 * g.k1 * s * (1.0 - s) * (g.k - self.c * s) * f * f
    }

    pub fn q_at(&self, s: f64) -> f64 {
        self.q.eval(s)
    }

    /// `|Q(s)|` over the largest coefficient of `Q`.
    pub fn relative_q(&self, s: f64) -> f64 {
        let n = self.q.norm();
        if n == 0.0 {
            return 0.0;
        }
        self.q_at(s).abs() / n
    }

    /// `Q` vanishes identically up to rounding.
    pub fn is_degenerate(&self) -> bool {
        self.q.norm() <= 1e-12 * self.term_scale
    }
}

/// Obstruction coefficients from a curvature jet.
pub fn obstruction_coeffs(jet: &CurvatureJet, c: f64) -> Result<ObstructionCoeffs> {
    let g = jet.gradient_quantities().ok_or(Error::GradientVanishes { u: jet.at.u, v: jet.at.v })?;
    Ok(ObstructionCoeffs::from_quantities(&g, c))
}

/// Tolerances for root isolation and the admissibility filter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CandidateOptions {
    pub eps_grad: f64,
    /// Relative level at which `Q` counts as zero at a critical point.
    pub root_tol: f64,
    /// Bound on the relative first-order residual of admissible roots.
    pub filter_tol: f64,
}

impl Default for CandidateOptions {
    fn default() -> Self {
        CandidateOptions { eps_grad: EPS_GRAD, root_tol: 1e-10, filter_tol: 1e-6 }
    }
}

fn raw_roots(coeffs: &ObstructionCoeffs, root_tol: f64, at: Point) -> Result<Vec<super::poly::Root>> {
    if coeffs.is_degenerate() {
        return Err(Error::DegeneratePoint { u: at.u, v: at.v });
    }
    Ok(real_roots(&coeffs.q, 0.0, 1.0, root_tol))
}

fn signed(s: f64) -> Vec<f64> {
    let r = s.max(0.0).sqrt();
    if r == 0.0 {
        vec![0.0]
    } else {
        vec![-r, r]
    }
}

/// Real roots `ν ∈ [−1, 1]` of the obstruction polynomial at a point,
/// sorted and closed under negation.
pub fn candidate_angles(jet: &CurvatureJet, c: f64) -> Result<Vec<f64>> {
    let coeffs = obstruction_coeffs(jet, c)?;
    let roots = raw_roots(&coeffs, CandidateOptions::default().root_tol, jet.at)?;
    let mut out: Vec<f64> = roots.iter().flat_map(|r| signed(r.x)).collect();
    out.sort_by(f64::total_cmp);
    Ok(out)
}

/// First derivatives of `ν` in the gradient frame forced by the
/// order-zero relations: `6cνK₁ν₁ = A` and `K₁Fν₂ + νE = 0`.
pub fn propagate_gradient(jet: &CurvatureJet, c: f64, nu: f64) -> Result<[f64; 2]> {
    let coeffs = obstruction_coeffs(jet, c)?;
    propagate(&coeffs, nu)
}

fn propagate(coeffs: &ObstructionCoeffs, nu: f64) -> Result<[f64; 2]> {
    let g = &coeffs.quantities;
    if nu.abs() < 1e-8 {
        return Err(Error::SingularPropagation { quantity: "nu" });
    }
    if g.k1 == 0.0 {
        return Err(Error::SingularPropagation { quantity: "|grad K|" });
    }
    let s = nu * nu;
    let nu1 = coeffs.a.eval(s) / (6.0 * coeffs.c * nu * g.k1);
    let e = coeffs.e.eval(s);
    let e_scale = (1.0 + g.k1 * g.k1) * (1.0 + g.k.abs() + g.lap.abs() + g.k1 * g.lap_2.abs());
    if e.abs() <= 1e-12 * e_scale {
        return Ok([nu1, 0.0]);
    }
    let f = coeffs.f.eval(s);
    if f.abs() <= 1e-12 * coeffs.f.abs_eval(s).max(f64::MIN_POSITIVE) {
        return Err(Error::SingularPropagation { quantity: "F" });
    }
    Ok([nu1, -nu * e / (g.k1 * f)])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Rejection {
    /// The root is multiple, so the branch gradient is undetermined.
    MultipleRoot,
    /// `ν = 0`, where the branch in `ν` is always a double root.
    ZeroAngle,
    /// First-order residual of the branch exceeds the filter bound.
    FirstOrder { relative: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Candidate {
    pub nu: f64,
    pub s: f64,
    pub multiple: bool,
    /// Natural-frame gradient of the root branch through `ν`.
    pub branch_gradient: Option<[f64; 2]>,
    /// Gradient-frame derivatives from the order-zero relations.
    pub propagated: Option<[f64; 2]>,
    /// `(‖∇ν‖² + (1−ν²)(K−cν²)) / max(‖∇ν‖², |(1−ν²)(K−cν²)|)`.
    pub m1_relative: Option<f64>,
    pub rejection: Option<Rejection>,
}

impl Candidate {
    pub fn admissible(&self) -> bool {
        self.rejection.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CandidateSet {
    pub at: Point,
    pub coeffs: ObstructionCoeffs,
    /// `∇K/‖∇K‖` in the natural frame.
    pub gradient_direction: [f64; 2],
    /// Every root, both signs, sorted by `ν`.
    pub candidates: Vec<Candidate>,
}

impl CandidateSet {
    pub fn raw(&self) -> Vec<f64> {
        self.candidates.iter().map(|c| c.nu).collect()
    }

    pub fn admissible(&self) -> Vec<f64> {
        self.candidates.iter().filter(|c| c.admissible()).map(|c| c.nu).collect()
    }
}

/// Roots of the obstruction polynomial at `at`, each classified by the
/// first-order equation evaluated on its own branch.
pub fn filtered_candidates(chart: &MetricChart, at: Point, opts: &CandidateOptions) -> Result<CandidateSet> {
    let jets = chart.curvature_jets(at, 1)?;
    let (gj, dir) = jets.gradient_quantities(opts.eps_grad).ok_or(Error::GradientVanishes { u: at.u, v: at.v })?;
    let gv = GradientQuantities {
        k: gj.k.value(),
        k1: gj.k1.value(),
        k11: gj.k11.value(),
        k22: gj.k22.value(),
        k12: gj.k12.value(),
        lap: gj.lap.value(),
        lap_2: gj.lap_2.value(),
    };
    let coeffs = ObstructionCoeffs::from_quantities(&gv, chart.c);
    let roots = raw_roots(&coeffs, opts.root_tol, at)?;

    let ps = polys(&gj, chart.c);
    let [t1, t2, t3] = &ps.terms;
    let q_jet = &(t1 + t2) + t3;
    let dq = coeffs.q.derivative();
    let frame = jets.geometry.frame.map(|row| row.map(|x| x.value()));
    let (k, c) = (gv.k, chart.c);

    let mut candidates = Vec::new();
    for root in roots {
        let s = root.x.clamp(0.0, 1.0);
        let qx = q_jet.eval(s);
        let (qu, qv) = (qx.d_du().value(), qx.d_dv().value());
        let grad_q = [0, 1].map(|i| frame[i][0] * qu + frame[i][1] * qv);
        let qs = dq.eval(s);
        let simple = !root.multiple && qs.abs() > 1e-9 * dq.abs_eval(s).max(f64::MIN_POSITIVE);
        for nu in signed(s) {
            let mut cand = Candidate {
                nu,
                s,
                multiple: !simple,
                branch_gradient: None,
                propagated: propagate(&coeffs, nu).ok(),
                m1_relative: None,
                rejection: None,
            };
            if !simple {
                cand.rejection = Some(Rejection::MultipleRoot);
            } else if nu == 0.0 {
                cand.rejection = Some(Rejection::ZeroAngle);
            } else {
                let grad = grad_q.map(|g| -g / qs / (2.0 * nu));
                let lhs = grad[0] * grad[0] + grad[1] * grad[1];
                let rhs = (1.0 - s) * (k - c * s);
                let rel = (lhs + rhs).abs() / lhs.abs().max(rhs.abs()).max(f64::MIN_POSITIVE);
                cand.branch_gradient = Some(grad);
                cand.m1_relative = Some(rel);
                if !(rel <= opts.filter_tol) {
                    cand.rejection = Some(Rejection::FirstOrder { relative: rel });
                }
            }
            candidates.push(cand);
        }
    }
    candidates.sort_by(|a, b| a.nu.total_cmp(&b.nu));
    Ok(CandidateSet { at, coeffs, gradient_direction: dir.map(|x| x.value()), candidates })
}
