//! Closed-form example surfaces with their known angle functions.
//!
//! | name | metric | ambient | angle functions |
//! |------|--------|---------|-----------------|
//! | `parabolic-catenoid` | `(du²+dv²)/cos²u` | `c = −1` | `μ∘φ_t`, `μ = sin u` |
//! | `catenoid` | `du² + (β²sinh²u+1) dv²` | `c = −1` | none in closed form |
//! | `unduloid` | `du² + (β²sin²u+1) dv²` | `c = +1` | none in closed form |
//! | `saearp` | `du² + ((d²−1)cosh²u+ℓ²+1) dv²` | `c = −1` | `ν`, `ν̄` |
//! | `horizontal-slice` | constant curvature `c` | `c` | `ν ≡ 1` |
//! | `vertical-plane` | flat | `c` | `ν ≡ 0` |

use serde::{Deserialize, Serialize};

use crate::angle::AngleField;
use crate::compat::GaussCodazziData;
use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::surface::{Domain, Expr, GridSpec, MetricChart, Point, Profile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Tag {
    TotallyGeodesic,
    ConstantCurvature,
    Rotational,
    ScrewMotion,
    /// Carries isometric immersions that are not associate.
    NonAssociate,
}

/// A fixture and its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Fixture {
    ParabolicCatenoid {
        #[serde(default)]
        t: f64,
    },
    Catenoid {
        beta: f64,
    },
    Unduloid {
        beta: f64,
    },
    #[serde(rename = "saearp")]
    SaEarp {
        l: f64,
        d: f64,
    },
    HorizontalSlice {
        c: f64,
    },
    VerticalPlane {
        c: f64,
    },
}

/// Optional parameters from which a named fixture is assembled.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FixtureParams {
    pub l: Option<f64>,
    pub d: Option<f64>,
    pub beta: Option<f64>,
    pub t: Option<f64>,
    pub c: Option<f64>,
}

pub const FIXTURE_NAMES: [&str; 6] =
    ["parabolic-catenoid", "catenoid", "unduloid", "saearp", "horizontal-slice", "vertical-plane"];

impl Fixture {
    /// Named fixture, with defaults `ℓ = 1`, `d = 2`, `β = 2` (catenoid),
    /// `β = 1.5` (unduloid), `t = 0` and `c = −1`.
    pub fn from_name(name: &str, p: &FixtureParams) -> Result<Self> {
        Ok(match name {
            "parabolic-catenoid" => Fixture::ParabolicCatenoid { t: p.t.unwrap_or(0.0) },
            "catenoid" => Fixture::Catenoid { beta: p.beta.unwrap_or(2.0) },
            "unduloid" => Fixture::Unduloid { beta: p.beta.unwrap_or(1.5) },
            "saearp" => Fixture::SaEarp { l: p.l.unwrap_or(1.0), d: p.d.unwrap_or(2.0) },
            "horizontal-slice" => Fixture::HorizontalSlice { c: p.c.unwrap_or(-1.0) },
            "vertical-plane" => Fixture::VerticalPlane { c: p.c.unwrap_or(-1.0) },
            other => return Err(Error::UnknownFixture(other.to_string())),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Fixture::ParabolicCatenoid { .. } => "parabolic-catenoid",
            Fixture::Catenoid { .. } => "catenoid",
            Fixture::Unduloid { .. } => "unduloid",
            Fixture::SaEarp { .. } => "saearp",
            Fixture::HorizontalSlice { .. } => "horizontal-slice",
            Fixture::VerticalPlane { .. } => "vertical-plane",
        }
    }
}

/// A named angle function of a fixture.
#[derive(Debug, Clone)]
pub struct NamedAngle {
    pub name: &'static str,
    pub nu: Expr,
}

#[derive(Debug, Clone)]
pub struct GallerySurface {
    pub fixture: Fixture,
    pub chart: MetricChart,
    pub c: f64,
    /// Closures known to satisfy the angle system; each negation does too.
    pub angles: Vec<NamedAngle>,
    pub curvature: Option<Expr>,
    pub tags: Vec<Tag>,
    /// Explicit Gauss–Codazzi data for the totally geodesic fixtures.
    pub data: Option<GaussCodazziData>,
}

impl GallerySurface {
    pub fn name(&self) -> &'static str {
        self.fixture.name()
    }

    /// Angle function by name; a leading `-` selects the negation.
    pub fn angle(&self, name: &str) -> Result<AngleField> {
        let (neg, base) = match name.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, name),
        };
        let a = self.angles.iter().find(|a| a.name == base).ok_or_else(|| {
            let known: Vec<_> = self.angles.iter().map(|a| a.name).collect();
            Error::Parameter(format!("fixture {} has no angle function `{name}` (known: {known:?})", self.name()))
        })?;
        let field = AngleField::new(self.chart.clone(), a.nu.clone());
        Ok(if neg { field.negated() } else { field })
    }

    /// The first listed angle function.
    pub fn default_angle(&self) -> Option<AngleField> {
        self.angles.first().map(|a| AngleField::new(self.chart.clone(), a.nu.clone()))
    }

    pub fn grid(&self, nu: usize, nv: usize) -> Result<GridSpec> {
        GridSpec::new(self.chart.domain, nu, nv)
    }

    pub fn has_tag(&self, tag: Tag) -> bool {
        self.tags.contains(&tag)
    }
}

/// Value-only closure; its jets carry no derivatives.
fn sqrt_profile_curvature(p: impl Fn(Jet) -> Jet + Send + Sync + 'static) -> Expr {
    // K = (P′² − 2PP″) / (4P²) for Λ = √P.
    Expr::new(move |u, _| {
        let (x, _) = Jet::seed(u.value(), 0.0, 2);
        let pj = p(x);
        let d1 = pj.partial(1, 0);
        let d2 = pj.partial(2, 0);
        let pv = pj.value();
        Jet::constant((d1 * d1 - 2.0 * pv * d2) / (4.0 * pv * pv)).truncate(0)
    })
}

/// Builds a fixture.
pub fn fixture(f: Fixture) -> Result<GallerySurface> {
    match f {
        Fixture::ParabolicCatenoid { t } => parabolic_catenoid(t),
        Fixture::Catenoid { beta } => {
            if !(beta * beta > 1.0) || !beta.is_finite() {
                return Err(Error::Parameter(format!("catenoid needs beta^2 > 1, got beta = {beta}")));
            }
            let b2 = beta * beta;
            let p = move |u: Jet| b2 * u.sinh() * u.sinh() + 1.0;
            let chart = MetricChart::warped(Profile::new(move |u| p(u).sqrt()), Domain::new(-1.5, 1.5, -1.0, 1.0)?, -1.0)?;
            Ok(GallerySurface {
                fixture: f,
                chart,
                c: -1.0,
                angles: Vec::new(),
                curvature: Some(sqrt_profile_curvature(p)),
                tags: vec![Tag::Rotational],
                data: None,
            })
        }
        Fixture::Unduloid { beta } => {
            if beta == 0.0 || !beta.is_finite() {
                return Err(Error::Parameter("unduloid needs beta != 0".into()));
            }
            let b2 = beta * beta;
            let p = move |u: Jet| b2 * u.sin() * u.sin() + 1.0;
            let chart = MetricChart::warped(Profile::new(move |u| p(u).sqrt()), Domain::new(-1.4, 1.4, -1.0, 1.0)?, 1.0)?;
            Ok(GallerySurface {
                fixture: f,
                chart,
                c: 1.0,
                angles: Vec::new(),
                curvature: Some(sqrt_profile_curvature(p)),
                tags: vec![Tag::Rotational],
                data: None,
            })
        }
        Fixture::SaEarp { l, d } => saearp(l, d),
        Fixture::HorizontalSlice { c } => {
            check_c(c)?;
            let r = c.abs().sqrt();
            let profile = if c < 0.0 { Profile::new(move |u| (u * r).cosh()) } else { Profile::new(move |u| (u * r).cos()) };
            let chart = MetricChart::warped(profile, Domain::new(-1.2 / r, 1.2 / r, -1.0 / r, 1.0 / r)?, c)?;
            let data = GaussCodazziData::from_closures(
                chart.clone(),
                Expr::constant(1.0),
                [Expr::constant(0.0), Expr::constant(0.0)],
                [Expr::constant(0.0), Expr::constant(0.0)],
            );
            Ok(GallerySurface {
                fixture: f,
                chart,
                c,
                angles: vec![NamedAngle { name: "nu", nu: Expr::constant(1.0) }],
                curvature: Some(Expr::constant(c)),
                tags: vec![Tag::TotallyGeodesic, Tag::ConstantCurvature],
                data: Some(data),
            })
        }
        Fixture::VerticalPlane { c } => {
            check_c(c)?;
            let chart = MetricChart::warped(Profile::new(|_| Jet::constant(1.0)), Domain::new(-1.0, 1.0, -1.0, 1.0)?, c)?;
            let data = GaussCodazziData::from_closures(
                chart.clone(),
                Expr::constant(0.0),
                [Expr::constant(0.0), Expr::constant(1.0)],
                [Expr::constant(0.0), Expr::constant(0.0)],
            );
            Ok(GallerySurface {
                fixture: f,
                chart,
                c,
                angles: vec![NamedAngle { name: "nu", nu: Expr::constant(0.0) }],
                curvature: Some(Expr::constant(0.0)),
                tags: vec![Tag::TotallyGeodesic, Tag::ConstantCurvature],
                data: Some(data),
            })
        }
    }
}

fn check_c(c: f64) -> Result<()> {
    if c == 0.0 || !c.is_finite() {
        return Err(Error::Parameter(format!("c must be finite and nonzero, got {c}")));
    }
    Ok(())
}

/// Builds a fixture by name.
pub fn fixture_by_name(name: &str, params: &FixtureParams) -> Result<GallerySurface> {
    fixture(Fixture::from_name(name, params)?)
}

fn saearp(l: f64, d: f64) -> Result<GallerySurface> {
    if !(d * d > 1.0) || !l.is_finite() || !d.is_finite() {
        return Err(Error::Parameter(format!("saearp needs d^2 > 1, got d = {d}")));
    }
    let q = d * d - 1.0;
    let l2 = l * l;
    let lam = move |u: Jet| (q * u.cosh() * u.cosh() + l2 + 1.0).sqrt();
    let chart = MetricChart::warped(Profile::new(lam), Domain::new(-1.5, 1.5, -2.0, 2.0)?, -1.0)?;
    let nu = Expr::new(move |u, _| q.sqrt() * u.cosh() / lam(u));
    let nu_bar = Expr::new(move |u, _| q.sqrt() * u.sinh() / lam(u));
    let curvature = Expr::new(move |u, _| {
        let p = q * u.cosh() * u.cosh() + l2 + 1.0;
        (l2 + 1.0) * (d * d + l2) / (p * p) - 1.0
    });
    Ok(GallerySurface {
        fixture: Fixture::SaEarp { l, d },
        chart,
        c: -1.0,
        angles: vec![NamedAngle { name: "nu", nu }, NamedAngle { name: "nu_bar", nu: nu_bar }],
        curvature: Some(curvature),
        tags: vec![Tag::ScrewMotion, Tag::NonAssociate],
        data: None,
    })
}

/// An orientation-preserving isometry of the upper half-plane,
/// `z ↦ (az + b)/(cz + d)` with `ad − bc = 1`.
///
/// The strip `|u| < π/2` with metric `(du²+dv²)/cos²u` maps onto the upper
/// half-plane by `z = i e^{v+iu}`; the curve `v = 0` goes to the unit
/// half-circle and `(0, 0)` to `i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Mobius {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Mobius {
    pub const IDENTITY: Mobius = Mobius { a: 1.0, b: 0.0, c: 0.0, d: 1.0 };

    /// Hyperbolic translation by `t` along the geodesic `v = 0`, oriented so
    /// that `μ∘φ_t(0,0) = tanh t`.
    pub fn translation(t: f64) -> Self {
        let (ch, sh) = ((0.5 * t).cosh(), (0.5 * t).sinh());
        Mobius { a: ch, b: -sh, c: -sh, d: ch }
    }

    /// Rotation by `ρ` about the point `(0, 0)`.
    pub fn rotation(rho: f64) -> Self {
        let (s, c) = (0.5 * rho).sin_cos();
        Mobius { a: c, b: s, c: -s, d: c }
    }

    /// `self ∘ other`.
    pub fn compose(&self, o: &Mobius) -> Self {
        Mobius {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }

    /// `(Re, Im)` of the image of `z(u, v)` up to the positive factor
    /// `|cz + d|⁻²`.
    fn image_scaled(&self, u: Jet, v: Jet) -> (Jet, Jet) {
        let ev = v.exp();
        let x = -(ev * u.sin());
        let y = ev * u.cos();
        let r2 = ev * ev;
        let re = r2 * (self.a * self.c) + x * (self.a * self.d + self.b * self.c) + self.b * self.d;
        (re, y)
    }

    /// Chart coordinates of the image point.
    pub fn map_chart(&self, u: Jet, v: Jet) -> (Jet, Jet) {
        let ev = v.exp();
        let x = -(ev * u.sin());
        let y = ev * u.cos();
        // |cz + d|²
        let den = (x * self.c + self.d) * (x * self.c + self.d) + y * y * (self.c * self.c);
        let (re, im) = self.image_scaled(u, v);
        let (re, im) = (re / den, im / den);
        let modulus = (re * re + im * im).sqrt();
        ((-(re / modulus)).asin(), modulus.ln())
    }

    /// `μ∘φ` with `μ = sin u`.
    pub fn angle(&self) -> Expr {
        let m = *self;
        Expr::new(move |u, v| {
            let (re, im) = m.image_scaled(u, v);
            -(re / (re * re + im * im).sqrt())
        })
    }
}

fn parabolic_chart() -> Result<MetricChart> {
    MetricChart::conformal(Expr::new(|u, _| u.cos().recip()), Domain::new(-1.2, 1.2, -1.0, 1.0)?, -1.0)
}

fn parabolic_catenoid(t: f64) -> Result<GallerySurface> {
    if !t.is_finite() {
        return Err(Error::Parameter(format!("translation parameter must be finite, got {t}")));
    }
    Ok(GallerySurface {
        fixture: Fixture::ParabolicCatenoid { t },
        chart: parabolic_chart()?,
        c: -1.0,
        angles: vec![NamedAngle { name: "mu", nu: Mobius::translation(t).angle() }],
        curvature: Some(Expr::constant(-1.0)),
        tags: vec![Tag::ConstantCurvature, Tag::NonAssociate],
        data: None,
    })
}

/// `μ∘φ_t∘R_ρ` on the parabolic catenoid chart.
pub fn translated_angle(t: f64, rho: f64) -> Expr {
    Mobius::translation(t).compose(&Mobius::rotation(rho)).angle()
}

/// A solution `(ℓ̄, d̄)` of `(d²−1)/(ℓ²+1) = (1−d̄²)/(d̄²+ℓ̄²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Partner {
    pub l_bar_sq: f64,
    pub l_bar: f64,
    pub d_bar: f64,
}

/// The partner parameters for a given `d̄`, or `None` when `ℓ̄² < 0`.
pub fn saearp_partner(l: f64, d: f64, d_bar: f64) -> Result<Option<Partner>> {
    if !(d * d > 1.0) {
        return Err(Error::Parameter(format!("saearp partner needs d^2 > 1, got d = {d}")));
    }
    if !(d_bar.abs() < 1.0) {
        return Err(Error::Parameter(format!("d_bar must lie in (-1, 1), got {d_bar}")));
    }
    let l_bar_sq = (1.0 - d_bar * d_bar) * (l * l + 1.0) / (d * d - 1.0) - d_bar * d_bar;
    Ok((l_bar_sq >= 0.0).then(|| Partner { l_bar_sq, l_bar: l_bar_sq.sqrt(), d_bar }))
}

/// Partners at `n` evenly spaced `d̄ ∈ (−1, 1)`, skipping empty ones.
pub fn saearp_partner_family(l: f64, d: f64, n: usize) -> Result<Vec<Partner>> {
    let mut out = Vec::new();
    for k in 1..=n {
        let d_bar = -1.0 + 2.0 * k as f64 / (n + 1) as f64;
        if let Some(p) = saearp_partner(l, d, d_bar)? {
            out.push(p);
        }
    }
    Ok(out)
}

/// How an angle function on the constant-curvature `c < 0` chart relates
/// to the known solutions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum CatalogMatch {
    /// `ν ≡ ±1`.
    Horizontal { sign: f64 },
    /// `ν = μ∘φ_t∘R_ρ` on the sampled grid.
    Translated { t: f64, rho: f64, max_error: f64 },
}

/// Identifies `field` (on the parabolic catenoid chart) with a catalogue
/// entry, within `tol` on `grid`.
pub fn match_catalog(field: &AngleField, grid: &GridSpec, tol: f64) -> Result<Option<CatalogMatch>> {
    let origin = Point::new(0.0, 0.0);
    let d = field.derivatives(origin)?;
    let sample = |f: &dyn Fn(Point) -> Result<f64>| -> Result<f64> {
        grid.points().try_fold(0.0f64, |m, p| Ok(m.max((field.value(p)? - f(p)?).abs())))
    };
    for sign in [1.0, -1.0] {
        if sample(&|_| Ok(sign))? <= tol {
            return Ok(Some(CatalogMatch::Horizontal { sign }));
        }
    }
    if !(d.f.abs() < 1.0) {
        return Ok(None);
    }
    let t = d.f.atanh();
    let base = d.f2.atan2(d.f1);
    let mut best: Option<CatalogMatch> = None;
    for rho in [base, -base] {
        let cand = translated_angle(t, rho);
        let err = sample(&|p| Ok(cand.value(p)))?;
        let better = match best {
            Some(CatalogMatch::Translated { max_error, .. }) => err < max_error,
            _ => true,
        };
        if better {
            best = Some(CatalogMatch::Translated { t, rho, max_error: err });
        }
    }
    Ok(best.filter(|m| matches!(m, CatalogMatch::Translated { max_error, .. } if *max_error <= tol)))
}
