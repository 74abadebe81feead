//! Analytic surface charts, their orthonormal frames, and curvature jets.
//!
//! Two chart shapes are supported: warped products `du² + Λ(u)² dv²` with
//! frame `e₁ = ∂u, e₂ = Λ⁻¹∂v`, and conformal metrics `λ(u,v)²(du² + dv²)`
//! with frame `eᵢ = λ⁻¹∂ᵢ`. The orientation is fixed by `J e₁ = e₂`, and the
//! connection form is defined by `∇_X eᵢ = α(X) J eᵢ`, which gives the
//! structure identity `dα = −K ω₁∧ω₂`.
//!
//! Metric data are closures over [`Jet`]s, so every derivative used
//! downstream is analytic.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::{Jet, Scalar, MAX_ORDER};

/// Default scale-aware threshold for treating `∇K` as zero.
pub const EPS_GRAD: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub u: f64,
    pub v: f64,
}

impl Point {
    pub const fn new(u: f64, v: f64) -> Self {
        Point { u, v }
    }
}

impl From<(f64, f64)> for Point {
    fn from((u, v): (f64, f64)) -> Self {
        Point { u, v }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub u_min: f64,
    pub u_max: f64,
    pub v_min: f64,
    pub v_max: f64,
}

impl Domain {
    pub fn new(u_min: f64, u_max: f64, v_min: f64, v_max: f64) -> Result<Self> {
        if !(u_min < u_max && v_min < v_max) || ![u_min, u_max, v_min, v_max].iter().all(|x| x.is_finite()) {
            return Err(Error::Parameter(format!(
                "empty or non-finite domain [{u_min}, {u_max}] x [{v_min}, {v_max}]"
            )));
        }
        Ok(Domain { u_min, u_max, v_min, v_max })
    }

    pub fn contains(&self, p: Point) -> bool {
        let su = 1e-9 * (self.u_max - self.u_min);
        let sv = 1e-9 * (self.v_max - self.v_min);
        p.u >= self.u_min - su && p.u <= self.u_max + su && p.v >= self.v_min - sv && p.v <= self.v_max + sv
    }

    pub fn center(&self) -> Point {
        Point::new(0.5 * (self.u_min + self.u_max), 0.5 * (self.v_min + self.v_max))
    }
}

/// A rectangular grid of chart nodes with a distinguished base node.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub domain: Domain,
    pub nu: usize,
    pub nv: usize,
    /// Base node `(i, j)`; `i` indexes `u`, `j` indexes `v`.
    pub base: (usize, usize),
}

impl GridSpec {
    /// Grid with the base node at the centre.
    pub fn new(domain: Domain, nu: usize, nv: usize) -> Result<Self> {
        if nu < 2 || nv < 2 {
            return Err(Error::Parameter(format!("grid {nu}x{nv} needs at least two nodes per axis")));
        }
        Ok(GridSpec { domain, nu, nv, base: (nu / 2, nv / 2) })
    }

    pub fn with_base(mut self, i: usize, j: usize) -> Result<Self> {
        if i >= self.nu || j >= self.nv {
            return Err(Error::Parameter(format!("base node ({i}, {j}) outside {}x{} grid", self.nu, self.nv)));
        }
        self.base = (i, j);
        Ok(self)
    }

    pub fn du(&self) -> f64 {
        (self.domain.u_max - self.domain.u_min) / (self.nu - 1) as f64
    }

    pub fn dv(&self) -> f64 {
        (self.domain.v_max - self.domain.v_min) / (self.nv - 1) as f64
    }

    pub fn u(&self, i: usize) -> f64 {
        if i + 1 == self.nu {
            self.domain.u_max
        } else {
            self.domain.u_min + i as f64 * self.du()
        }
    }

    pub fn v(&self, j: usize) -> f64 {
        if j + 1 == self.nv {
            self.domain.v_max
        } else {
            self.domain.v_min + j as f64 * self.dv()
        }
    }

    pub fn point(&self, i: usize, j: usize) -> Point {
        Point::new(self.u(i), self.v(j))
    }

    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        (0..self.nu).flat_map(move |i| (0..self.nv).map(move |j| self.point(i, j)))
    }

    pub fn len(&self) -> usize {
        self.nu * self.nv
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// An analytic scalar closure in chart coordinates.
#[derive(Clone)]
pub struct Expr(Arc<dyn Fn(Jet, Jet) -> Jet + Send + Sync>);

impl Expr {
    pub fn new(f: impl Fn(Jet, Jet) -> Jet + Send + Sync + 'static) -> Self {
        Expr(Arc::new(f))
    }

    pub fn constant(x: f64) -> Self {
        Expr::new(move |_, _| Jet::constant(x))
    }

    pub fn eval(&self, u: Jet, v: Jet) -> Jet {
        (self.0)(u, v)
    }

    /// Jet of the closure at `p` with derivatives up to `order`.
    pub fn jet(&self, p: Point, order: usize) -> Jet {
        let (u, v) = Jet::seed(p.u, p.v, order);
        self.eval(u, v)
    }

    pub fn value(&self, p: Point) -> f64 {
        self.jet(p, 0).value()
    }

    pub fn neg(&self) -> Expr {
        let f = self.clone();
        Expr::new(move |u, v| -f.eval(u, v))
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Expr(..)")
    }
}

/// An analytic closure of one variable, the warped-product profile `Λ(u)`.
#[derive(Clone)]
pub struct Profile(Arc<dyn Fn(Jet) -> Jet + Send + Sync>);

impl Profile {
    pub fn new(f: impl Fn(Jet) -> Jet + Send + Sync + 'static) -> Self {
        Profile(Arc::new(f))
    }

    pub fn eval(&self, u: Jet) -> Jet {
        (self.0)(u)
    }
}

impl fmt::Debug for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Profile(..)")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChartKind {
    WarpedProduct,
    Conformal,
}

#[derive(Debug, Clone)]
enum Metric {
    Warped(Profile),
    Conformal(Expr),
}

/// An analytic metric on a rectangle, together with the base curvature `c`
/// of the target `M²(c)×R`.
#[derive(Debug, Clone)]
pub struct MetricChart {
    metric: Metric,
    pub domain: Domain,
    pub c: f64,
}

/// Frame, connection and curvature jets at one point.
#[derive(Debug, Clone)]
pub struct LocalGeometry {
    /// `frame[i] = (eᵢᵘ, eᵢᵛ)`, coordinate components of `eᵢ`.
    pub frame: [[Jet; 2]; 2],
    /// `coframe[a] = (ω₁(∂ₐ), ω₂(∂ₐ))`, the coordinate vectors in the frame.
    pub coframe: [[Jet; 2]; 2],
    /// `(α(e₁), α(e₂))`.
    pub alpha: [Jet; 2],
    pub curvature: Jet,
    /// `(g_uu, g_uv, g_vv)`.
    pub metric: [Jet; 3],
}

/// Frame derivatives and covariant Hessian of a scalar in the natural frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameDerivatives<S> {
    pub f: S,
    pub f1: S,
    pub f2: S,
    pub f11: S,
    /// `(∇²f)(e₁, e₂) = e₂·f₁ − α₂f₂`.
    pub f12: S,
    /// `(∇²f)(e₂, e₁) = e₁·f₂ + α₁f₁`; equal to `f12` by symmetry.
    pub f21: S,
    pub f22: S,
}

impl<S: Scalar> FrameDerivatives<S> {
    pub fn laplacian(&self) -> S {
        self.f11 + self.f22
    }

    pub fn grad_norm_sq(&self) -> S {
        self.f1 * self.f1 + self.f2 * self.f2
    }
}

impl FrameDerivatives<Jet> {
    pub fn values(&self) -> FrameDerivatives<f64> {
        FrameDerivatives {
            f: self.f.value(),
            f1: self.f1.value(),
            f2: self.f2.value(),
            f11: self.f11.value(),
            f12: self.f12.value(),
            f21: self.f21.value(),
            f22: self.f22.value(),
        }
    }
}

impl LocalGeometry {
    /// `(e₁·f, e₂·f)`.
    pub fn d_frame(&self, f: &Jet) -> [Jet; 2] {
        let fu = f.d_du();
        let fv = f.d_dv();
        [0, 1].map(|i| self.frame[i][0] * fu + self.frame[i][1] * fv)
    }

    pub fn derivatives(&self, f: &Jet) -> FrameDerivatives<Jet> {
        let [f1, f2] = self.d_frame(f);
        let [f1_1, f1_2] = self.d_frame(&f1);
        let [f2_1, f2_2] = self.d_frame(&f2);
        let [a1, a2] = self.alpha;
        FrameDerivatives {
            f: *f,
            f1,
            f2,
            f11: f1_1 - a1 * f2,
            f12: f1_2 - a2 * f2,
            f21: f2_1 + a1 * f1,
            f22: f2_2 + a2 * f1,
        }
    }

    /// Area density `√det g`.
    pub fn area_density(&self) -> Jet {
        let [e, f, g] = self.metric;
        (e * g - f * f).sqrt()
    }
}

/// Connection data at a point, `∇_X eᵢ = α(X) J eᵢ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FramePoint {
    pub at: Point,
    pub alpha1: f64,
    pub alpha2: f64,
    /// Coordinate components `(eᵘ, eᵛ)` of `e₁`.
    pub e1_coords: [f64; 2],
    pub e2_coords: [f64; 2],
}

/// Curvature quantities in the frame `(∇K/‖∇K‖, J∇K/‖∇K‖)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GradientFrame {
    /// Natural-frame components of `∇K/‖∇K‖`.
    pub direction: [f64; 2],
    pub k11: f64,
    pub k22: f64,
    pub k12: f64,
    /// `⟨∇ΔK, J∇K⟩/‖∇K‖`.
    pub lap_2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvatureJet {
    pub at: Point,
    pub k: f64,
    /// `(K₁, K₂)` in the natural frame.
    pub grad: [f64; 2],
    pub grad_norm: f64,
    /// Natural-frame Hessian `[[K₁₁, K₁₂], [K₂₁, K₂₂]]`.
    pub hessian: [[f64; 2]; 2],
    pub laplacian: f64,
    /// `(e₁·ΔK, e₂·ΔK)`.
    pub grad_laplacian: [f64; 2],
    /// `None` where `‖∇K‖ < ε_grad (1 + |K|)`.
    pub gradient_frame: Option<GradientFrame>,
}

/// Curvature data in the gradient frame, generic over values or jets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradientQuantities<S> {
    pub k: S,
    /// `K₁ = ‖∇K‖`.
    pub k1: S,
    pub k11: S,
    pub k22: S,
    pub k12: S,
    pub lap: S,
    pub lap_2: S,
}

impl CurvatureJet {
    pub fn gradient_quantities(&self) -> Option<GradientQuantities<f64>> {
        self.gradient_frame.map(|g| GradientQuantities {
            k: self.k,
            k1: self.grad_norm,
            k11: g.k11,
            k22: g.k22,
            k12: g.k12,
            lap: self.laplacian,
            lap_2: g.lap_2,
        })
    }

    pub fn grad_norm_sq(&self) -> f64 {
        self.grad[0] * self.grad[0] + self.grad[1] * self.grad[1]
    }
}

/// Curvature jets in the natural frame.
#[derive(Debug, Clone)]
pub(crate) struct CurvatureJets {
    pub geometry: LocalGeometry,
    pub k: FrameDerivatives<Jet>,
    pub laplacian: Jet,
    pub grad_laplacian: [Jet; 2],
}

impl CurvatureJets {
    /// Gradient-frame quantities as jets; `None` when `∇K` is numerically zero.
    pub fn gradient_quantities(&self, eps_grad: f64) -> Option<(GradientQuantities<Jet>, [Jet; 2])> {
        let k = &self.k;
        let norm = (k.f1 * k.f1 + k.f2 * k.f2).sqrt();
        if !(norm.value() >= eps_grad * (1.0 + k.f.value().abs())) {
            return None;
        }
        let g1 = [k.f1 / norm, k.f2 / norm];
        let g2 = [-g1[1], g1[0]];
        let h12 = (k.f12 + k.f21) * 0.5;
        let hess = |a: &[Jet; 2], b: &[Jet; 2]| {
            a[0] * b[0] * k.f11 + (a[0] * b[1] + a[1] * b[0]) * h12 + a[1] * b[1] * k.f22
        };
        let [l1, l2] = self.grad_laplacian;
        Some((
            GradientQuantities {
                k: k.f,
                k1: norm,
                k11: hess(&g1, &g1),
                k22: hess(&g2, &g2),
                k12: hess(&g1, &g2),
                lap: self.laplacian,
                lap_2: g2[0] * l1 + g2[1] * l2,
            },
            g1,
        ))
    }
}

impl MetricChart {
    /// Warped product `du² + Λ(u)² dv²`.
    pub fn warped(profile: Profile, domain: Domain, c: f64) -> Result<Self> {
        Self::check_c(c)?;
        Ok(MetricChart { metric: Metric::Warped(profile), domain, c })
    }

    /// Conformal metric `λ(u,v)² (du² + dv²)`.
    pub fn conformal(factor: Expr, domain: Domain, c: f64) -> Result<Self> {
        Self::check_c(c)?;
        Ok(MetricChart { metric: Metric::Conformal(factor), domain, c })
    }

    fn check_c(c: f64) -> Result<()> {
        if c == 0.0 || !c.is_finite() {
            return Err(Error::Parameter(format!("ambient curvature c must be finite and nonzero, got {c}")));
        }
        Ok(())
    }

    pub fn kind(&self) -> ChartKind {
        match self.metric {
            Metric::Warped(_) => ChartKind::WarpedProduct,
            Metric::Conformal(_) => ChartKind::Conformal,
        }
    }

    /// Same metric with a different domain.
    pub fn with_domain(&self, domain: Domain) -> Self {
        MetricChart { domain, ..self.clone() }
    }

    /// Same metric viewed in a different ambient `M²(c)×R`.
    pub fn with_c(&self, c: f64) -> Result<Self> {
        Self::check_c(c)?;
        Ok(MetricChart { c, ..self.clone() })
    }

    pub fn check_point(&self, p: Point) -> Result<()> {
        if !p.u.is_finite() || !p.v.is_finite() || !self.domain.contains(p) {
            return Err(Error::Domain { u: p.u, v: p.v });
        }
        Ok(())
    }

    /// Frame and curvature jets from coordinate seeds. The curvature jet is
    /// two orders below the seeds.
    pub fn geometry_from(&self, u: Jet, v: Jet) -> Result<LocalGeometry> {
        let at = Point::new(u.value(), v.value());
        self.check_point(at)?;
        let zero = Jet::constant(0.0);
        let one = Jet::constant(1.0);
        let geom = match &self.metric {
            Metric::Warped(profile) => {
                let lam = profile.eval(u);
                if !(lam.value() > 0.0) {
                    return Err(Error::Parameter(format!("warped profile must be positive, got {} at u = {}", lam.value(), at.u)));
                }
                let inv = lam.recip();
                let (alpha2, curvature) = if lam.order() >= 1 {
                    let d1 = lam.d_du();
                    let k = if d1.order() >= 1 { -(d1.d_du() * inv) } else { Jet::constant(f64::NAN).truncate(0) };
                    (d1 * inv, k)
                } else {
                    (Jet::constant(f64::NAN).truncate(0), Jet::constant(f64::NAN).truncate(0))
                };
                LocalGeometry {
                    frame: [[one, zero], [zero, inv]],
                    coframe: [[one, zero], [zero, lam]],
                    alpha: [zero, alpha2],
                    curvature,
                    metric: [one, zero, lam * lam],
                }
            }
            Metric::Conformal(factor) => {
                let lam = factor.eval(u, v);
                if !(lam.value() > 0.0) {
                    return Err(Error::Parameter(format!(
                        "conformal factor must be positive, got {} at ({}, {})",
                        lam.value(),
                        at.u,
                        at.v
                    )));
                }
                let inv = lam.recip();
                let (alpha, curvature) = if lam.order() >= 1 {
                    let phi = lam.ln();
                    let (pu, pv) = (phi.d_du(), phi.d_dv());
                    let k = if pu.order() >= 1 {
                        -((pu.d_du() + pv.d_dv()) * inv * inv)
                    } else {
                        Jet::constant(f64::NAN).truncate(0)
                    };
                    ([-(pv * inv), pu * inv], k)
                } else {
                    let nan = Jet::constant(f64::NAN).truncate(0);
                    ([nan, nan], nan)
                };
                LocalGeometry {
                    frame: [[inv, zero], [zero, inv]],
                    coframe: [[lam, zero], [zero, lam]],
                    alpha,
                    curvature,
                    metric: [lam * lam, zero, lam * lam],
                }
            }
        };
        Ok(geom)
    }

    /// Geometry jets at `p` seeded to `order`.
    pub fn geometry(&self, p: Point, order: usize) -> Result<LocalGeometry> {
        let (u, v) = Jet::seed(p.u, p.v, order);
        self.geometry_from(u, v)
    }

    pub(crate) fn curvature_jets(&self, p: Point, extra_order: usize) -> Result<CurvatureJets> {
        let order = 5 + extra_order;
        debug_assert!(order <= MAX_ORDER);
        let geometry = self.geometry(p, order)?;
        let k = geometry.derivatives(&geometry.curvature);
        let laplacian = k.laplacian();
        let grad_laplacian = geometry.d_frame(&laplacian);
        let out = CurvatureJets { geometry, k, laplacian, grad_laplacian };
        if !out.k.f.is_finite() || !out.laplacian.is_finite() || !grad_laplacian.iter().all(Jet::is_finite) {
            return Err(Error::NonFinite { what: "curvature", u: p.u, v: p.v });
        }
        Ok(out)
    }
}

/// Gauss curvature at a point.
pub fn curvature(chart: &MetricChart, at: Point) -> Result<f64> {
    let k = chart.geometry(at, 2)?.curvature.value();
    if !k.is_finite() {
        return Err(Error::NonFinite { what: "curvature", u: at.u, v: at.v });
    }
    Ok(k)
}

/// Orthonormal frame and connection form at a point.
pub fn frame_at(chart: &MetricChart, at: Point) -> Result<FramePoint> {
    let g = chart.geometry(at, 1)?;
    Ok(FramePoint {
        at,
        alpha1: g.alpha[0].value(),
        alpha2: g.alpha[1].value(),
        e1_coords: [g.frame[0][0].value(), g.frame[0][1].value()],
        e2_coords: [g.frame[1][0].value(), g.frame[1][1].value()],
    })
}

/// Curvature jet with the default gradient threshold.
pub fn curvature_jet(chart: &MetricChart, at: Point) -> Result<CurvatureJet> {
    curvature_jet_with(chart, at, EPS_GRAD)
}

pub fn curvature_jet_with(chart: &MetricChart, at: Point, eps_grad: f64) -> Result<CurvatureJet> {
    let jets = chart.curvature_jets(at, 0)?;
    let k = jets.k.values();
    let gradient_frame = jets.gradient_quantities(eps_grad).map(|(q, g1)| GradientFrame {
        direction: [g1[0].value(), g1[1].value()],
        k11: q.k11.value(),
        k22: q.k22.value(),
        k12: q.k12.value(),
        lap_2: q.lap_2.value(),
    });
    Ok(CurvatureJet {
        at,
        k: k.f,
        grad: [k.f1, k.f2],
        grad_norm: (k.f1 * k.f1 + k.f2 * k.f2).sqrt(),
        hessian: [[k.f11, k.f12], [k.f21, k.f22]],
        laplacian: jets.laplacian.value(),
        grad_laplacian: [jets.grad_laplacian[0].value(), jets.grad_laplacian[1].value()],
        gradient_frame,
    })
}

/// Frame derivatives `(f₁, f₂)` and covariant Hessian of a scalar closure.
pub fn scalar_derivatives(chart: &MetricChart, f: &Expr, at: Point) -> Result<FrameDerivatives<f64>> {
    let g = chart.geometry(at, 2)?;
    let (u, v) = Jet::seed(at.u, at.v, 2);
    let fj = f.eval(u, v);
    if !fj.is_finite() {
        return Err(Error::NonFinite { what: "scalar closure", u: at.u, v: at.v });
    }
    Ok(g.derivatives(&fj).values())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sec_chart() -> MetricChart {
        MetricChart::conformal(
            Expr::new(|u, _| u.cos().recip()),
            Domain::new(-1.2, 1.2, -1.0, 1.0).unwrap(),
            -1.0,
        )
        .unwrap()
    }

    fn saearp_chart(l: f64, d: f64) -> MetricChart {
        MetricChart::warped(
            Profile::new(move |u| ((d * d - 1.0) * u.cosh() * u.cosh() + l * l + 1.0).sqrt()),
            Domain::new(-2.0, 2.0, -2.0, 2.0).unwrap(),
            -1.0,
        )
        .unwrap()
    }

    fn flat_chart() -> MetricChart {
        MetricChart::warped(Profile::new(|_| Jet::constant(1.0)), Domain::new(-1.0, 1.0, -1.0, 1.0).unwrap(), 1.0)
            .unwrap()
    }

    #[test]
    fn curvature_examples() {
        let chart = sec_chart();
        for &(u, v) in &[(0.0, 0.0), (0.7, -0.3), (-1.1, 0.9)] {
            assert!((curvature(&chart, Point::new(u, v)).unwrap() + 1.0).abs() < 1e-13);
        }
        let k = curvature(&saearp_chart(1.0, 2.0), Point::new(0.0, 0.0)).unwrap();
        assert!((k + 0.6).abs() < 1e-14, "K(0) = {k}");
        assert_eq!(curvature(&flat_chart(), Point::new(0.3, 0.2)).unwrap(), 0.0);
    }

    #[test]
    fn domain_errors() {
        let chart = sec_chart();
        assert!(matches!(curvature(&chart, Point::new(1.5, 0.0)), Err(Error::Domain { .. })));
        assert!(matches!(frame_at(&chart, Point::new(0.0, f64::NAN)), Err(Error::Domain { .. })));
        assert!(curvature_jet(&chart, Point::new(0.0, 3.0)).is_err());
    }

    #[test]
    fn frame_examples() {
        let catenoid = MetricChart::warped(
            Profile::new(|u| (4.0 * u.sinh() * u.sinh() + 1.0).sqrt()),
            Domain::new(-1.0, 1.0, -1.0, 1.0).unwrap(),
            -1.0,
        )
        .unwrap();
        let f = frame_at(&catenoid, Point::new(0.0, 0.0)).unwrap();
        assert_eq!(f.alpha1, 0.0);
        assert_eq!(f.alpha2, 0.0);
        let f = frame_at(&flat_chart(), Point::new(0.2, 0.1)).unwrap();
        assert_eq!((f.alpha1, f.alpha2), (0.0, 0.0));
        let f = frame_at(&sec_chart(), Point::new(0.0, 0.4)).unwrap();
        assert_eq!(f.alpha1, 0.0);
        assert!(f.alpha2.abs() < 1e-15);
        assert!((f.e1_coords[0] - 1.0).abs() < 1e-15);
        let f = frame_at(&sec_chart(), Point::new(0.5, 0.4)).unwrap();
        assert!((f.alpha2 - 0.5f64.sin()).abs() < 1e-14);
    }

    /// `∂u α(∂v) − ∂v α(∂u) + K √det g` by central differences.
    fn structure_residual(chart: &MetricChart, p: Point, h: f64) -> f64 {
        let alpha_coord = |q: Point| {
            let g = chart.geometry(q, 1).unwrap();
            let a = [g.alpha[0].value(), g.alpha[1].value()];
            let cf = |k: usize| g.coframe[k][0].value() * a[0] + g.coframe[k][1].value() * a[1];
            (cf(0), cf(1))
        };
        let d_av_du = (alpha_coord(Point::new(p.u + h, p.v)).1 - alpha_coord(Point::new(p.u - h, p.v)).1) / (2.0 * h);
        let d_au_dv = (alpha_coord(Point::new(p.u, p.v + h)).0 - alpha_coord(Point::new(p.u, p.v - h)).0) / (2.0 * h);
        let g = chart.geometry(p, 2).unwrap();
        d_av_du - d_au_dv + g.curvature.value() * g.area_density().value()
    }

    #[test]
    fn structure_identity_by_finite_differences() {
        let tilted = MetricChart::conformal(
            Expr::new(|u, v| (0.3 * u + 0.2 * v * v).exp() * (1.0 + 0.1 * (u * v).sin())),
            Domain::new(-1.0, 1.0, -1.0, 1.0).unwrap(),
            1.0,
        )
        .unwrap();
        for chart in [sec_chart(), saearp_chart(1.0, 2.0), tilted] {
            for &(u, v) in &[(0.0, 0.0), (0.3, -0.4), (-0.6, 0.5)] {
                let r = structure_residual(&chart, Point::new(u, v), 1e-4);
                assert!(r.abs() < 1e-6, "structure residual {r} at ({u}, {v})");
            }
        }
    }

    #[test]
    fn trace_identity_and_flat_jet() {
        let chart = saearp_chart(1.0, 2.0);
        let j = curvature_jet(&chart, Point::new(0.5, 0.3)).unwrap();
        let g = j.gradient_frame.expect("gradient frame defined");
        assert!((g.k11 + g.k22 - j.laplacian).abs() < 1e-9);
        assert!(j.grad_norm > 0.0);
        let flat = curvature_jet(&flat_chart(), Point::new(0.1, 0.1)).unwrap();
        assert!(flat.gradient_frame.is_none());
        let hyp = curvature_jet(&sec_chart(), Point::new(0.4, 0.1)).unwrap();
        assert!(hyp.gradient_frame.is_none(), "constant curvature chart has no gradient frame");
    }

    /// Richardson-extrapolated central difference of order 1 along an axis.
    fn fd1(f: &dyn Fn(f64) -> f64, x: f64, h: f64) -> f64 {
        let d = |h: f64| (f(x + h) - f(x - h)) / (2.0 * h);
        (4.0 * d(h / 2.0) - d(h)) / 3.0
    }

    fn fd2(f: &dyn Fn(f64) -> f64, x: f64, h: f64) -> f64 {
        let d = |h: f64| (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
        (4.0 * d(h / 2.0) - d(h)) / 3.0
    }

    #[test]
    fn curvature_jet_matches_finite_difference_oracle() {
        // Warped chart: K depends on u only, e₁ = ∂u, e₂ = Λ⁻¹∂v.
        let chart = saearp_chart(1.0, 2.0);
        let u0 = 0.5;
        let p = Point::new(u0, 0.2);
        let j = curvature_jet(&chart, p).unwrap();
        let k = |u: f64| curvature(&chart, Point::new(u, 0.2)).unwrap();
        let lam = |u: f64| ((3.0 * u.cosh() * u.cosh()) + 2.0f64).sqrt();
        let h = 1e-2;
        let kp = fd1(&k, u0, h);
        let kpp = fd2(&k, u0, h);
        let a2 = fd1(&lam, u0, h) / lam(u0);
        let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(1e-300);
        assert!(rel(j.k, k(u0)) < 1e-12);
        assert!(rel(j.grad[0], kp) < 1e-6, "{} vs {kp}", j.grad[0]);
        assert!(j.grad[1].abs() < 1e-14);
        assert!(rel(j.hessian[0][0], kpp) < 1e-6);
        assert!(rel(j.hessian[1][1], a2 * kp) < 1e-6);
        let lap = |u: f64| {
            let g = chart.geometry(Point::new(u, 0.2), 4).unwrap();
            g.derivatives(&g.curvature).laplacian().value()
        };
        assert!(rel(j.laplacian, kpp + a2 * kp) < 1e-6);
        assert!(rel(j.grad_laplacian[0], fd1(&lap, u0, h)) < 1e-6);
        let g = j.gradient_frame.unwrap();
        assert!(rel(g.k11, kpp) < 1e-6);
        assert!(rel(g.k22, a2 * kp) < 1e-6);
        assert!(g.k12.abs() < 1e-12 && g.lap_2.abs() < 1e-12);
    }

    #[test]
    fn derivative_closures_converge_at_second_order() {
        // Plain central differences of the curvature against its jet
        // derivative: the error ratio over a decade of h is about 100.
        let chart = saearp_chart(1.0, 2.0);
        let u0 = 0.7;
        let exact = curvature_jet(&chart, Point::new(u0, 0.0)).unwrap().grad[0];
        let k = |u: f64| curvature(&chart, Point::new(u, 0.0)).unwrap();
        let err = |h: f64| ((k(u0 + h) - k(u0 - h)) / (2.0 * h) - exact).abs();
        let hs = [1e-2, 1e-3];
        let slope = (err(hs[0]).ln() - err(hs[1]).ln()) / (hs[0].ln() - hs[1].ln());
        assert!((slope - 2.0).abs() < 0.2, "slope {slope}");
    }

    #[test]
    fn scalar_derivative_examples() {
        let chart = sec_chart();
        let d = scalar_derivatives(&chart, &Expr::constant(3.0), Point::new(0.2, 0.1)).unwrap();
        assert_eq!((d.f1, d.f2, d.f11, d.f12, d.f22), (0.0, 0.0, 0.0, 0.0, 0.0));
        let mu = Expr::new(|u, _| u.sin());
        let d = scalar_derivatives(&chart, &mu, Point::new(0.0, 0.0)).unwrap();
        assert!((d.f1 - 1.0).abs() < 1e-15);
        assert_eq!(d.f2, 0.0);
        let wavy = Expr::new(|u, v| (u * v + 0.3 * u).sin() + v.cosh());
        for chart in [sec_chart(), saearp_chart(1.0, 2.0)] {
            let d = scalar_derivatives(&chart, &wavy, Point::new(0.4, -0.3)).unwrap();
            assert!((d.f12 - d.f21).abs() < 1e-9);
        }
    }
}
