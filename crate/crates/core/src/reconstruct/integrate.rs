//! Moving-frame integration of Gauss–Codazzi data into `M²(c)×R`.

use rayon::prelude::*;
use serde::Serialize;

use super::model::{AmbientModel, Vec4};
use crate::compat::{check_compatibility, GaussCodazziData};
use crate::error::{Error, Result};
use crate::surface::{GridSpec, Point};

/// Position and adapted frame `(F₁, F₂, N)` of the immersion at a node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrameState {
    pub p: [f64; 3],
    pub h: f64,
    pub f1: Vec4,
    pub f2: Vec4,
    pub n: Vec4,
}

type Flat = [f64; 16];

impl FrameState {
    fn flatten(&self) -> Flat {
        let mut a = [0.0; 16];
        a[..3].copy_from_slice(&self.p);
        a[3] = self.h;
        a[4..8].copy_from_slice(&self.f1);
        a[8..12].copy_from_slice(&self.f2);
        a[12..].copy_from_slice(&self.n);
        a
    }

    fn unflatten(a: &Flat) -> Self {
        let v4 = |k: usize| [a[k], a[k + 1], a[k + 2], a[k + 3]];
        FrameState { p: [a[0], a[1], a[2]], h: a[3], f1: v4(4), f2: v4(8), n: v4(12) }
    }

    /// `(x₀, x₁, x₂, h)`.
    pub fn position(&self) -> Vec4 {
        [self.p[0], self.p[1], self.p[2], self.h]
    }

    /// Largest violation of orthonormality of `(F₁, F₂, N)` and of their
    /// tangency to the quadric.
    pub fn gram_drift(&self, model: &AmbientModel) -> f64 {
        let vs = [self.f1, self.f2, self.n];
        let mut d: f64 = 0.0;
        for i in 0..3 {
            for j in i..3 {
                let target = if i == j { 1.0 } else { 0.0 };
                d = d.max((model.dot4(&vs[i], &vs[j]) - target).abs());
            }
            d = d.max((model.dot3(&vs[i], &self.p) * model.c.abs().sqrt()).abs());
        }
        d
    }

    fn reorthonormalize(&mut self, model: &AmbientModel) {
        let c = model.c;
        let scale = 1.0 / (c * model.dot3(&self.p, &self.p)).sqrt();
        self.p.iter_mut().for_each(|x| *x *= scale);
        let p4 = [self.p[0], self.p[1], self.p[2], 0.0];
        let mut vs = [self.f1, self.f2, self.n];
        for k in 0..3 {
            let t = c * model.dot3(&vs[k], &self.p);
            for m in 0..3 {
                vs[k][m] -= t * p4[m];
            }
            for prev in 0..k {
                let proj = model.dot4(&vs[k], &vs[prev]);
                let pv = vs[prev];
                for m in 0..4 {
                    vs[k][m] -= proj * pv[m];
                }
            }
            let norm = model.dot4(&vs[k], &vs[k]).sqrt();
            vs[k].iter_mut().for_each(|x| *x /= norm);
        }
        [self.f1, self.f2, self.n] = vs;
    }
}

/// Initial state at the basepoint: `(F₁, F₂, N)` is the rotation of the
/// model frame `(E₁, E₂, ξ)` whose last column is `(T₁, T₂, ν)`, completed
/// by a Householder reflection with its first column negated.
pub fn initial_state(model: &AmbientModel, t: [f64; 2], nu: f64) -> FrameState {
    let w = [t[0], t[1], nu];
    let norm = (w[0] * w[0] + w[1] * w[1] + w[2] * w[2]).sqrt();
    let w = w.map(|x| x / norm);
    let v = [w[0], w[1], w[2] - 1.0];
    let vv = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    let mut m = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    if vv > 1e-24 {
        for (i, row) in m.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x -= 2.0 * v[i] * v[j] / vv;
            }
            row[0] = -row[0];
        }
    }
    let [e1, e2] = model.tangent_basis();
    let lift = |r: [f64; 3]| -> Vec4 {
        [r[0] * e1[0] + r[1] * e2[0], r[0] * e1[1] + r[1] * e2[1], r[0] * e1[2] + r[1] * e2[2], r[2]]
    };
    FrameState { p: model.basepoint(), h: 0.0, f1: lift(m[0]), f2: lift(m[1]), n: lift(m[2]) }
}

/// What the right-hand side needs at a point: `coframe[a] = (ω₁(∂ₐ), ω₂(∂ₐ))`,
/// `α(eⱼ)` and `(s₁, s₂)`.
struct Local {
    coframe: [[f64; 2]; 2],
    alpha: [f64; 2],
    s: [f64; 2],
}

fn local(data: &GaussCodazziData, at: Point) -> Result<Local> {
    let g = data.chart.geometry(at, 1)?;
    let v = data.values(at)?;
    Ok(Local {
        coframe: g.coframe.map(|r| r.map(|x| x.value())),
        alpha: g.alpha.map(|x| x.value()),
        s: v.s,
    })
}

/// Derivative of the state along the coordinate direction `axis`.
#[allow(clippy::needless_range_loop)]
fn rhs(model: &AmbientModel, y: &Flat, loc: &Local, axis: usize) -> Flat {
    let st = FrameState::unflatten(y);
    let c = model.c;
    let p4 = [st.p[0], st.p[1], st.p[2], 0.0];
    let [s1, s2] = loc.s;
    let shape = [[s1, s2], [s2, -s1]];
    let mut out = [0.0; 16];
    for j in 0..2 {
        let w = loc.coframe[axis][j];
        if w == 0.0 {
            continue;
        }
        let fj = if j == 0 { st.f1 } else { st.f2 };
        let a = loc.alpha[j];
        let se = shape[j];
        let curv = |x: &Vec4| c * model.dot3(&fj, x);
        let (k1, k2, kn) = (curv(&st.f1), curv(&st.f2), curv(&st.n));
        for m in 0..4 {
            let d_pos = fj[m];
            let d_f1 = a * st.f2[m] + se[0] * st.n[m] - k1 * p4[m];
            let d_f2 = -a * st.f1[m] + se[1] * st.n[m] - k2 * p4[m];
            let d_n = -se[0] * st.f1[m] - se[1] * st.f2[m] - kn * p4[m];
            out[m] += w * d_pos;
            out[4 + m] += w * d_f1;
            out[8 + m] += w * d_f2;
            out[12 + m] += w * d_n;
        }
    }
    out
}

fn axpy(y: &Flat, k: &Flat, h: f64) -> Flat {
    std::array::from_fn(|i| y[i] + h * k[i])
}

/// Options for [`integrate_immersion`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegrateOptions {
    /// Gram–Schmidt after every step.
    pub reorthonormalize: bool,
    /// Classical Runge–Kutta steps per grid interval.
    pub substeps: usize,
    pub drift_abort: f64,
    /// Bound on the compatibility residuals checked before integrating.
    pub compat_tol: f64,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        IntegrateOptions { reorthonormalize: false, substeps: 1, drift_abort: 1e-5, compat_tol: 1e-6 }
    }
}

struct Stepper<'a> {
    data: &'a GaussCodazziData,
    model: AmbientModel,
    opts: IntegrateOptions,
}

impl Stepper<'_> {
    fn step(&self, y: &FrameState, from: Point, axis: usize, h: f64) -> Result<FrameState> {
        let n = self.opts.substeps.max(1);
        let h = h / n as f64;
        let mut y = y.flatten();
        let mut at = from;
        let shift = |p: Point, d: f64| if axis == 0 { Point::new(p.u + d, p.v) } else { Point::new(p.u, p.v + d) };
        let mut l0 = local(self.data, at)?;
        for _ in 0..n {
            let mid = local(self.data, shift(at, 0.5 * h))?;
            let end_at = shift(at, h);
            let l1 = local(self.data, end_at)?;
            let k1 = rhs(&self.model, &y, &l0, axis);
            let k2 = rhs(&self.model, &axpy(&y, &k1, 0.5 * h), &mid, axis);
            let k3 = rhs(&self.model, &axpy(&y, &k2, 0.5 * h), &mid, axis);
            let k4 = rhs(&self.model, &axpy(&y, &k3, h), &l1, axis);
            y = std::array::from_fn(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]));
            if !y.iter().all(|x| x.is_finite()) {
                return Err(Error::NonFinite { what: "frame integration", u: end_at.u, v: end_at.v });
            }
            if self.opts.reorthonormalize {
                let mut s = FrameState::unflatten(&y);
                s.reorthonormalize(&self.model);
                y = s.flatten();
            }
            at = end_at;
            l0 = l1;
        }
        let out = FrameState::unflatten(&y);
        let drift = out.gram_drift(&self.model);
        if !(drift <= self.opts.drift_abort) {
            return Err(Error::IntegrationDiverged { u: at.u, v: at.v, drift });
        }
        Ok(out)
    }
}

/// Node-wise states of a reconstructed immersion.
#[derive(Debug, Clone)]
pub struct ImmersionGrid {
    pub grid: GridSpec,
    pub model: AmbientModel,
    pub assoc_angle: f64,
    /// Index `i * nv + j`.
    pub states: Vec<FrameState>,
    /// The data's `ν` at each node.
    pub nu: Vec<f64>,
    pub max_drift: f64,
}

impl ImmersionGrid {
    pub fn state(&self, i: usize, j: usize) -> &FrameState {
        &self.states[i * self.grid.nv + j]
    }

    pub fn base_state(&self) -> &FrameState {
        self.state(self.grid.base.0, self.grid.base.1)
    }
}

/// Integrates the frame equations over `grid`: first along the base
/// `u`-line, then along every `v`-line in parallel.
pub fn integrate_immersion(
    data: &GaussCodazziData,
    model: &AmbientModel,
    grid: &GridSpec,
    opts: &IntegrateOptions,
) -> Result<ImmersionGrid> {
    if model.c != data.chart.c {
        return Err(Error::Parameter(format!("model curvature {} differs from chart curvature {}", model.c, data.chart.c)));
    }
    let check = GridSpec { nu: grid.nu.min(21), nv: grid.nv.min(21), base: (0, 0), domain: grid.domain };
    for p in check.points() {
        let r = check_compatibility(data, p)?;
        let worst = r.max_abs();
        if worst > opts.compat_tol {
            return Err(Error::Integrability { u: p.u, v: p.v, what: "compatibility residual", residual: worst });
        }
    }

    let stepper = Stepper { data, model: *model, opts: *opts };
    let (bi, bj) = grid.base;
    let base_pt = grid.point(bi, bj);
    let v0 = data.values(base_pt)?;
    let mut base_line = vec![initial_state(model, v0.t, v0.nu); grid.nu];
    for i in bi + 1..grid.nu {
        base_line[i] = stepper.step(&base_line[i - 1], grid.point(i - 1, bj), 0, grid.u(i) - grid.u(i - 1))?;
    }
    for i in (0..bi).rev() {
        base_line[i] = stepper.step(&base_line[i + 1], grid.point(i + 1, bj), 0, grid.u(i) - grid.u(i + 1))?;
    }

    let columns = (0..grid.nu)
        .into_par_iter()
        .map(|i| {
            let mut col = vec![base_line[i]; grid.nv];
            for j in bj + 1..grid.nv {
                col[j] = stepper.step(&col[j - 1], grid.point(i, j - 1), 1, grid.v(j) - grid.v(j - 1))?;
            }
            for j in (0..bj).rev() {
                col[j] = stepper.step(&col[j + 1], grid.point(i, j + 1), 1, grid.v(j) - grid.v(j + 1))?;
            }
            let nus = (0..grid.nv).map(|j| Ok(data.values(grid.point(i, j))?.nu)).collect::<Result<Vec<f64>>>()?;
            Ok((col, nus))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut states = Vec::with_capacity(grid.len());
    let mut nu = Vec::with_capacity(grid.len());
    for (col, nus) in columns {
        states.extend(col);
        nu.extend(nus);
    }
    let max_drift = states.iter().map(|s| s.gram_drift(model)).fold(0.0, f64::max);
    Ok(ImmersionGrid { grid: grid.clone(), model: *model, assoc_angle: f64::NAN, states, nu, max_drift })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn initial_frame_is_orthonormal_and_adapted() {
        for c in [1.0, -1.0] {
            let m = AmbientModel::new(c).unwrap();
            for (t, nu) in [([0.6, 0.0], 0.8), ([0.3, -0.4], (0.75f64).sqrt()), ([0.0, 0.0], 1.0), ([0.0, 1.0], 0.0)] {
                let s = initial_state(&m, t, nu);
                assert!(s.gram_drift(&m) < 1e-15);
                assert!((s.n[3] - nu).abs() < 1e-15);
                assert!((s.f1[3] - t[0]).abs() < 1e-15 && (s.f2[3] - t[1]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn reorthonormalization_repairs_drift() {
        let m = AmbientModel::new(-1.0).unwrap();
        let mut s = initial_state(&m, [0.6, 0.0], 0.8);
        s.f1[0] += 1e-3;
        s.n[1] -= 2e-3;
        s.p[2] *= 1.001;
        assert!(s.gram_drift(&m) > 1e-4);
        s.reorthonormalize(&m);
        assert!(s.gram_drift(&m) < 1e-14);
        assert!(m.quadric_error(&s.p) < 1e-14);
    }
}
