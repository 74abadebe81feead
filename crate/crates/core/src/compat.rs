//! Gauss–Codazzi data `(ds², S, T, ν)` for minimal surfaces in `M²(c)×R`
//! and pointwise residuals of the five compatibility equations.
//!
//! Frame components are handled in complex notation: a tangent vector
//! `a e₁ + b e₂` is the number `a + ib`, so `J` is multiplication by `i`.
//! The traceless symmetric operator `S = [[s₁, s₂], [s₂, −s₁]]` acts as
//! `w ↦ σ w̄` with `σ = s₁ + i s₂`.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::surface::{Expr, MetricChart, Point};

/// Jets of `ν`, `(T₁, T₂)` and `(s₁, s₂)` at a point.
#[derive(Debug, Clone, Copy)]
pub struct Components {
    pub nu: Jet,
    pub t: [Jet; 2],
    pub s: [Jet; 2],
}

/// Anything that can produce [`Components`] jets at a chart point.
pub trait DataSource: Send + Sync {
    fn components(&self, chart: &MetricChart, at: Point, order: usize) -> Result<Components>;
}

struct Closures {
    nu: Expr,
    t: [Expr; 2],
    s: [Expr; 2],
}

impl DataSource for Closures {
    fn components(&self, _chart: &MetricChart, at: Point, order: usize) -> Result<Components> {
        let (u, v) = Jet::seed(at.u, at.v, order);
        Ok(Components {
            nu: self.nu.eval(u, v),
            t: [self.t[0].eval(u, v), self.t[1].eval(u, v)],
            s: [self.s[0].eval(u, v), self.s[1].eval(u, v)],
        })
    }
}

type Edit = dyn Fn(&mut Components) + Send + Sync;

struct Mapped {
    inner: Arc<dyn DataSource>,
    edit: Arc<Edit>,
}

impl DataSource for Mapped {
    fn components(&self, chart: &MetricChart, at: Point, order: usize) -> Result<Components> {
        let mut c = self.inner.components(chart, at, order)?;
        (self.edit)(&mut c);
        Ok(c)
    }
}

/// Gauss–Codazzi data of a minimal surface, in frame components.
#[derive(Clone)]
pub struct GaussCodazziData {
    pub chart: MetricChart,
    source: Arc<dyn DataSource>,
}

impl fmt::Debug for GaussCodazziData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GaussCodazziData").field("chart", &self.chart).finish_non_exhaustive()
    }
}

impl GaussCodazziData {
    /// Data given by explicit closures for `ν`, `(T₁, T₂)` and `(s₁, s₂)`.
    pub fn from_closures(chart: MetricChart, nu: Expr, t: [Expr; 2], s: [Expr; 2]) -> Self {
        GaussCodazziData { chart, source: Arc::new(Closures { nu, t, s }) }
    }

    pub fn from_source(chart: MetricChart, source: Arc<dyn DataSource>) -> Self {
        GaussCodazziData { chart, source }
    }

    /// The same data read on another chart, e.g. a clipped domain.
    pub fn with_chart(self, chart: MetricChart) -> Self {
        GaussCodazziData { chart, source: self.source }
    }

    /// Applies `edit` to every evaluation, e.g. to perturb the shape operator.
    pub fn map(self, edit: impl Fn(&mut Components) + Send + Sync + 'static) -> Self {
        GaussCodazziData {
            chart: self.chart,
            source: Arc::new(Mapped { inner: self.source, edit: Arc::new(edit) }),
        }
    }

    pub fn components(&self, at: Point, order: usize) -> Result<Components> {
        self.chart.check_point(at)?;
        let c = self.source.components(&self.chart, at, order)?;
        if !(c.nu.is_finite() && c.t.iter().chain(&c.s).all(Jet::is_finite)) {
            return Err(Error::NonFinite { what: "Gauss-Codazzi data", u: at.u, v: at.v });
        }
        Ok(c)
    }

    /// Pointwise values `(ν, T₁, T₂, s₁, s₂)`.
    pub fn values(&self, at: Point) -> Result<DataValues> {
        let c = self.components(at, 0)?;
        Ok(DataValues {
            nu: c.nu.value(),
            t: [c.t[0].value(), c.t[1].value()],
            s: [c.s[0].value(), c.s[1].value()],
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DataValues {
    pub nu: f64,
    pub t: [f64; 2],
    pub s: [f64; 2],
}

impl DataValues {
    pub fn det_s(&self) -> f64 {
        -(self.s[0] * self.s[0] + self.s[1] * self.s[1])
    }
}

/// Residuals of the compatibility equations at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CompatResiduals {
    pub at: Point,
    /// `K − det S − cν²`.
    pub c1: f64,
    /// Largest frame component of the Codazzi defect on `(e₁, e₂)`.
    pub c2: f64,
    /// `max_X ‖∇_X T − νSX‖` over `X ∈ {e₁, e₂}`.
    pub c3: f64,
    /// `max_i |dν(eᵢ) + ⟨Seᵢ, T⟩|`.
    pub c4: f64,
    /// `‖T‖² + ν² − 1`.
    pub c5: f64,
}

impl CompatResiduals {
    pub fn max_abs(&self) -> f64 {
        [self.c1, self.c2, self.c3, self.c4, self.c5].iter().fold(0.0, |m, r| m.max(r.abs()))
    }

    pub fn as_array(&self) -> [f64; 5] {
        [self.c1, self.c2, self.c3, self.c4, self.c5]
    }
}

#[derive(Clone, Copy)]
struct C {
    re: Jet,
    im: Jet,
}

impl C {
    fn new(re: Jet, im: Jet) -> Self {
        C { re, im }
    }
    fn mul(self, o: C) -> C {
        C::new(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)
    }
    fn scale(self, k: Jet) -> C {
        C::new(self.re * k, self.im * k)
    }
    fn i(self) -> C {
        C::new(-self.im, self.re)
    }
    fn add(self, o: C) -> C {
        C::new(self.re + o.re, self.im + o.im)
    }
    fn sub(self, o: C) -> C {
        C::new(self.re - o.re, self.im - o.im)
    }
    fn conj(self) -> C {
        C::new(self.re, -self.im)
    }
    fn abs(self) -> f64 {
        self.re.value().hypot(self.im.value())
    }
}

/// Evaluates the five compatibility residuals at `at`.
pub fn check_compatibility(data: &GaussCodazziData, at: Point) -> Result<CompatResiduals> {
    let geom = data.chart.geometry(at, 2)?;
    let comp = data.components(at, 1)?;
    let c = data.chart.c;
    let k = geom.curvature.value();
    let [a1, a2] = geom.alpha.map(|a| a.truncate(0));
    let nu = comp.nu;
    let t = C::new(comp.t[0], comp.t[1]);
    let sigma = C::new(comp.s[0], comp.s[1]);
    let d = |f: &C| {
        let re = geom.d_frame(&f.re);
        let im = geom.d_frame(&f.im);
        [C::new(re[0], im[0]), C::new(re[1], im[1])]
    };
    let nu_v = nu.value();

    let c1 = k + sigma.re.value().powi(2) + sigma.im.value().powi(2) - c * nu_v * nu_v;

    let ds = d(&sigma);
    let cov_s = |j: usize, a: Jet| ds[j].add(sigma.i().scale(a * 2.0));
    let d1 = cov_s(0, a1);
    let d2 = cov_s(1, a2);
    let codazzi = d1.i().scale(Jet::constant(-1.0)).sub(d2).add(t.i().scale(nu.truncate(0) * c));
    let c2 = codazzi.re.value().abs().max(codazzi.im.value().abs());

    let dt = d(&t);
    let eps = [C::new(Jet::constant(1.0), Jet::constant(0.0)), C::new(Jet::constant(0.0), Jet::constant(1.0))];
    let nu0 = nu.truncate(0);
    let c3 = [(0, a1), (1, a2)]
        .iter()
        .map(|&(j, a)| dt[j].add(t.i().scale(a)).sub(sigma.mul(eps[j].conj()).scale(nu0)).abs())
        .fold(0.0, f64::max);

    let dnu = geom.d_frame(&nu);
    let c4 = (0..2)
        .map(|i| (dnu[i].value() + sigma.mul(eps[i].conj()).mul(t.conj()).re.value()).abs())
        .fold(0.0, f64::max);

    let c5 = t.re.value().powi(2) + t.im.value().powi(2) + nu_v * nu_v - 1.0;

    let r = CompatResiduals { at, c1, c2, c3, c4, c5 };
    if !r.as_array().iter().all(|x| x.is_finite()) {
        return Err(Error::NonFinite { what: "compatibility residuals", u: at.u, v: at.v });
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{Domain, Profile};

    fn flat() -> MetricChart {
        MetricChart::warped(Profile::new(|_| Jet::constant(1.0)), Domain::new(-1.0, 1.0, -1.0, 1.0).unwrap(), -1.0)
            .unwrap()
    }

    #[test]
    fn vertical_plane_is_compatible() {
        for c in [-1.0, 0.5, 2.0] {
            let data = GaussCodazziData::from_closures(
                flat().with_c(c).unwrap(),
                Expr::constant(0.0),
                [Expr::constant(0.0), Expr::constant(1.0)],
                [Expr::constant(0.0), Expr::constant(0.0)],
            );
            let r = check_compatibility(&data, Point::new(0.3, -0.2)).unwrap();
            assert_eq!(r.max_abs(), 0.0, "{r:?}");
        }
    }

    #[test]
    fn horizontal_slice_is_compatible() {
        let chart = MetricChart::warped(
            Profile::new(|u| u.cosh()),
            Domain::new(-1.0, 1.0, -1.0, 1.0).unwrap(),
            -1.0,
        )
        .unwrap();
        let data = GaussCodazziData::from_closures(
            chart,
            Expr::constant(1.0),
            [Expr::constant(0.0), Expr::constant(0.0)],
            [Expr::constant(0.0), Expr::constant(0.0)],
        );
        let r = check_compatibility(&data, Point::new(0.4, 0.1)).unwrap();
        assert!(r.max_abs() < 1e-14, "{r:?}");
    }

    #[test]
    fn broken_unit_length_is_detected() {
        let data = GaussCodazziData::from_closures(
            flat(),
            Expr::constant(0.0),
            [Expr::constant(0.0), Expr::constant(1.0)],
            [Expr::constant(0.0), Expr::constant(0.0)],
        )
        .map(|c| c.t[1] = c.t[1] * 1.1);
        let r = check_compatibility(&data, Point::new(0.0, 0.0)).unwrap();
        assert!((r.c5 - 0.21).abs() < 1e-12);
        assert_eq!(r.c1, 0.0);
    }

    #[test]
    fn out_of_domain_point_errors() {
        let data = GaussCodazziData::from_closures(
            flat(),
            Expr::constant(0.0),
            [Expr::constant(0.0), Expr::constant(1.0)],
            [Expr::constant(0.0), Expr::constant(0.0)],
        );
        assert!(matches!(check_compatibility(&data, Point::new(2.0, 0.0)), Err(Error::Domain { .. })));
    }
}
