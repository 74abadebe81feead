//! The rotation angle `θ` of the tangential part of the vertical field.
//!
//! `θ` is a primitive of the closed 1-form
//! `dθ(e₁) = −νν₂/(1−ν²) − α₁`, `dθ(e₂) = νν₁/(1−ν²) − α₂`,
//! fixed by its value at a base node. Grid values come from Gauss–Legendre
//! quadrature along the base `u`-line and then along each `v`-line; values
//! and jets anywhere else are obtained from the nearest node.

use std::sync::{Arc, OnceLock};

use rayon::prelude::*;

use crate::angle::AngleField;
use crate::error::{Error, Result};
use crate::jet::{Jet, MAX_ORDER};
use crate::surface::{GridSpec, Point};

const GL_NODES: [f64; 8] = [
    -0.960_289_856_497_536_2,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_2,
];
const GL_WEIGHTS: [f64; 8] = [
    0.101_228_536_290_376_3,
    0.222_381_034_453_374_5,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362,
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// Jets of the coordinate components `(dθ(∂u), dθ(∂v))` at `at`, with seeds
/// of the given order (the form is one order lower).
pub(crate) fn theta_form(field: &AngleField, at: Point, seed_order: usize) -> Result<[Jet; 2]> {
    let geom = field.chart.geometry(at, seed_order)?;
    let (u, v) = Jet::seed(at.u, at.v, seed_order);
    let nu = field.nu.eval(u, v);
    let [n1, n2] = geom.d_frame(&nu);
    let nu = nu.truncate(n1.order());
    let w = nu / (1.0 - nu * nu);
    let f1 = -(w * n2) - geom.alpha[0];
    let f2 = w * n1 - geom.alpha[1];
    let form = [0, 1].map(|a| geom.coframe[a][0] * f1 + geom.coframe[a][1] * f2);
    if !form.iter().all(Jet::is_finite) {
        return Err(Error::NonFinite { what: "theta form", u: at.u, v: at.v });
    }
    Ok(form)
}

/// `∫ dθ` along the straight segment from `a` to `b`.
pub fn integrate_segment(field: &AngleField, a: Point, b: Point) -> Result<f64> {
    let (du, dv) = (b.u - a.u, b.v - a.v);
    if du == 0.0 && dv == 0.0 {
        return Ok(0.0);
    }
    let mut acc = 0.0;
    for (x, w) in GL_NODES.iter().zip(GL_WEIGHTS) {
        let t = 0.5 * (1.0 + x);
        let p = Point::new(a.u + t * du, a.v + t * dv);
        let [fu, fv] = theta_form(field, p, 1)?;
        acc += w * (fu.value() * du + fv.value() * dv);
    }
    Ok(0.5 * acc)
}

/// `θ` on a grid, plus what is needed to evaluate it elsewhere.
#[derive(Debug, Clone)]
pub struct ThetaGrid {
    pub field: AngleField,
    pub grid: GridSpec,
    pub theta0: f64,
    /// Node values, index `i * nv + j`.
    pub values: Vec<f64>,
    /// Largest `|∂u θ_v − ∂v θ_u|` over the nodes.
    pub curl_max: f64,
    taylor: Arc<[OnceLock<Option<NodeJet>>]>,
}

/// Order-6 expansion of `θ` at a node and the radius within which its
/// last retained degree contributes less than [`TAYLOR_TOL`].
#[derive(Debug, Clone, Copy)]
struct NodeJet {
    jet: Jet,
    radius: f64,
}

const TAYLOR_TOL: f64 = 1e-14;

impl ThetaGrid {
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.grid.nv + j]
    }

    fn nearest(&self, p: Point) -> (usize, usize) {
        let g = &self.grid;
        let idx = |x: f64, lo: f64, step: f64, n: usize| (((x - lo) / step).round().max(0.0) as usize).min(n - 1);
        (idx(p.u, g.domain.u_min, g.du(), g.nu), idx(p.v, g.domain.v_min, g.dv(), g.nv))
    }

    fn node_jet(&self, i: usize, j: usize) -> Option<NodeJet> {
        *self.taylor[i * self.grid.nv + j].get_or_init(|| {
            let node = self.grid.point(i, j);
            let [fu, fv] = theta_form(&self.field, node, MAX_ORDER).ok()?;
            let jet = Jet::antiderivative(self.at(i, j), &fu, &fv);
            let top = jet.degree_norm(MAX_ORDER);
            let radius = if top > 0.0 { (TAYLOR_TOL / top).powf(1.0 / MAX_ORDER as f64) } else { f64::INFINITY };
            jet.is_finite().then_some(NodeJet { jet, radius })
        })
    }

    /// `θ` at any chart point: the expansion at the nearest node where it
    /// is accurate, quadrature from that node otherwise.
    pub fn value(&self, p: Point) -> Result<f64> {
        self.field.chart.check_point(p)?;
        let (i, j) = self.nearest(p);
        let node = self.grid.point(i, j);
        let (du, dv) = (p.u - node.u, p.v - node.v);
        if du == 0.0 && dv == 0.0 {
            return Ok(self.at(i, j));
        }
        if let Some(nj) = self.node_jet(i, j) {
            if du.abs().max(dv.abs()) <= nj.radius {
                return Ok(nj.jet.eval_offset(du, dv));
            }
        }
        Ok(self.at(i, j) + integrate_segment(&self.field, node, p)?)
    }

    /// Jet of `θ` at `p` up to `order`.
    pub fn jet(&self, p: Point, order: usize) -> Result<Jet> {
        assert!(order <= MAX_ORDER, "theta jet order {order} exceeds {MAX_ORDER}");
        let value = self.value(p)?;
        if order == 0 {
            return Ok(Jet::constant(value).truncate(0));
        }
        let [fu, fv] = theta_form(&self.field, p, order)?;
        Ok(Jet::antiderivative(value, &fu, &fv))
    }
}

/// Options for [`solve_theta`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaOptions {
    pub theta0: f64,
    /// Bound on `|M1|`, `|M2|` over the verification grid.
    pub precheck_tol: f64,
    /// Bound on the curl of the form.
    pub curl_tol: f64,
    /// Required margin `1 − ν²` everywhere.
    pub flat_margin: f64,
}

impl Default for ThetaOptions {
    fn default() -> Self {
        ThetaOptions { theta0: 0.0, precheck_tol: 1e-7, curl_tol: 1e-4, flat_margin: 1e-4 }
    }
}

fn verification_grid(grid: &GridSpec) -> GridSpec {
    GridSpec { nu: grid.nu.min(21), nv: grid.nv.min(21), base: (0, 0), domain: grid.domain }
}

/// Integrates `θ` over the grid from `θ(base) = θ₀`.
pub fn solve_theta(field: &AngleField, grid: &GridSpec, opts: &ThetaOptions) -> Result<ThetaGrid> {
    let (nu, nv) = (grid.nu, grid.nv);
    let nodes: Vec<Point> = grid.points().collect();
    for &p in &nodes {
        let nu_sq = field.value(p)?.powi(2);
        if nu_sq > 1.0 - opts.flat_margin {
            return Err(Error::FlatPoint { u: p.u, v: p.v, nu_sq });
        }
    }
    let check = verification_grid(grid);
    for p in check.points() {
        let r = field.residuals(p)?;
        if r.m1.abs() > opts.precheck_tol {
            return Err(Error::Integrability { u: p.u, v: p.v, what: "first-order equation", residual: r.m1 });
        }
        if r.m2.abs() > opts.precheck_tol {
            return Err(Error::Integrability { u: p.u, v: p.v, what: "Jacobi equation", residual: r.m2 });
        }
    }

    let curls = nodes
        .par_iter()
        .map(|&p| {
            let [fu, fv] = theta_form(field, p, 2)?;
            Ok((fv.d_du().value() - fu.d_dv().value()).abs())
        })
        .collect::<Result<Vec<f64>>>()?;
    let curl_max = curls.iter().copied().fold(0.0, f64::max);
    if let Some(k) = curls.iter().position(|&c| c > opts.curl_tol) {
        return Err(Error::Integrability { u: nodes[k].u, v: nodes[k].v, what: "curl of theta form", residual: curls[k] });
    }

    let (bi, bj) = grid.base;
    let mut base_line = vec![0.0; nu];
    base_line[bi] = opts.theta0;
    for i in bi + 1..nu {
        base_line[i] = base_line[i - 1] + integrate_segment(field, grid.point(i - 1, bj), grid.point(i, bj))?;
    }
    for i in (0..bi).rev() {
        base_line[i] = base_line[i + 1] + integrate_segment(field, grid.point(i + 1, bj), grid.point(i, bj))?;
    }

    let columns = (0..nu)
        .into_par_iter()
        .map(|i| {
            let mut col = vec![0.0; nv];
            col[bj] = base_line[i];
            for j in bj + 1..nv {
                col[j] = col[j - 1] + integrate_segment(field, grid.point(i, j - 1), grid.point(i, j))?;
            }
            for j in (0..bj).rev() {
                col[j] = col[j + 1] + integrate_segment(field, grid.point(i, j + 1), grid.point(i, j))?;
            }
            Ok(col)
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;

    Ok(ThetaGrid {
        field: field.clone(),
        grid: grid.clone(),
        theta0: opts.theta0,
        values: columns.concat(),
        curl_max,
        taylor: (0..grid.len()).map(|_| OnceLock::new()).collect(),
    })
}
