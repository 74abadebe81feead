//! Run configuration: JSON file contents merged with command-line flags.

use serde::{Deserialize, Serialize};

use crate::angle::AngleField;
use crate::compat::GaussCodazziData;
use crate::error::{Error, Result};
use crate::gallery::{fixture, Fixture, FixtureParams};
use crate::jet::Jet;
use crate::surface::{Domain, Expr, GridSpec, MetricChart, Profile};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub surface: SurfaceConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub output: OutputConfig,
}

/// Either a gallery fixture with parameters or an inline chart.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceConfig {
    pub fixture: Option<String>,
    #[serde(flatten)]
    pub params: FixtureParams,
    /// Name of a fixture angle function, `-` prefix for its negation.
    pub angle: Option<String>,
    pub chart: Option<InlineChart>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChartForm {
    Warped,
    Conformal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    Cosh,
    Sinh,
    Cos,
    Sin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variable {
    #[default]
    U,
    V,
}

/// `(Σₖ aₖ g(scale·x)ᵏ)^power` with `g` one of `cosh`, `sinh`, `cos`, `sin`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Template {
    pub basis: Basis,
    pub coeffs: Vec<f64>,
    #[serde(default = "one")]
    pub power: f64,
    #[serde(default = "one")]
    pub scale: f64,
    #[serde(default)]
    pub variable: Variable,
}

fn one() -> f64 {
    1.0
}

impl Template {
    fn eval(&self, x: Jet) -> Jet {
        let y = x * self.scale;
        let g = match self.basis {
            Basis::Cosh => y.cosh(),
            Basis::Sinh => y.sinh(),
            Basis::Cos => y.cos(),
            Basis::Sin => y.sin(),
        };
        let mut acc = Jet::constant(0.0);
        for &a in self.coeffs.iter().rev() {
            acc = acc * g + a;
        }
        if self.power == 1.0 {
            acc
        } else {
            acc.powf(self.power)
        }
    }

    pub fn expr(&self) -> Expr {
        let t = self.clone();
        Expr::new(move |u, v| t.eval(if t.variable == Variable::U { u } else { v }))
    }

    fn validate(&self, what: &str) -> Result<()> {
        if self.coeffs.is_empty() || !self.coeffs.iter().chain([&self.power, &self.scale]).all(|x| x.is_finite()) {
            return Err(Error::Config(format!("{what}: template needs finite coefficients, power and scale")));
        }
        Ok(())
    }
}

/// A chart given by templates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InlineChart {
    pub kind: ChartForm,
    pub c: f64,
    /// `[u_min, u_max, v_min, v_max]`.
    pub domain: [f64; 4],
    /// `Λ(u)` for warped charts, `λ` for conformal ones.
    pub profile: Template,
    pub angle: Option<Template>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub nu: Option<usize>,
    pub nv: Option<usize>,
    pub domain: Option<[f64; 4]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Obj,
    ReportJson,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub path: Option<String>,
    pub format: Option<Format>,
}

/// Thresholds used by every subcommand.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub eps_grad: f64,
    pub m1: f64,
    pub m2: f64,
    pub m3: f64,
    pub e2: f64,
    /// `|Q(ν²)|` relative to the largest coefficient of `Q`.
    pub q: f64,
    pub compat: f64,
    pub filter: f64,
    pub metric: f64,
    pub normal: f64,
    pub mean_curvature: f64,
    pub sff: f64,
    pub height: f64,
    pub quadric: f64,
    pub drift: f64,
    pub drift_abort: f64,
    pub ricci_reduction: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            eps_grad: 1e-10,
            m1: 1e-8,
            m2: 1e-8,
            m3: 1e-7,
            e2: 1e-7,
            q: 1e-6,
            compat: 1e-7,
            filter: 1e-6,
            metric: 1e-5,
            normal: 1e-6,
            mean_curvature: 5e-4,
            sff: 1e-3,
            height: 1e-6,
            quadric: 1e-6,
            drift: 1e-6,
            drift_abort: 1e-5,
            ricci_reduction: 1e-12,
        }
    }
}

impl Tolerances {
    fn validate(&self) -> Result<()> {
        let all = [
            self.eps_grad, self.m1, self.m2, self.m3, self.e2, self.q, self.compat, self.filter, self.metric,
            self.normal, self.mean_curvature, self.sff, self.height, self.quadric, self.drift, self.drift_abort,
            self.ricci_reduction,
        ];
        if all.iter().all(|t| *t > 0.0 && t.is_finite()) {
            Ok(())
        } else {
            Err(Error::Config("tolerances must be positive and finite".into()))
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("config: {e}")))
    }

    pub fn validate(&self) -> Result<()> {
        self.tolerances.validate()?;
        for (n, axis) in [(self.grid.nu, "nu"), (self.grid.nv, "nv")] {
            if let Some(n) = n {
                if n < 9 {
                    return Err(Error::Config(format!("grid {axis} = {n} is below the minimum of 9")));
                }
            }
        }
        Ok(())
    }
}

/// A surface ready for evaluation.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub label: String,
    pub chart: MetricChart,
    pub angles: Vec<(String, AngleField)>,
    pub data: Option<GaussCodazziData>,
    pub curvature: Option<Expr>,
}

fn domain_of(d: [f64; 4]) -> Result<Domain> {
    Domain::new(d[0], d[1], d[2], d[3]).map_err(|e| Error::Config(e.to_string()))
}

impl SurfaceConfig {
    pub fn resolve(&self, domain: Option<[f64; 4]>) -> Result<Resolved> {
        let mut r = match (&self.fixture, &self.chart) {
            (Some(_), Some(_)) => return Err(Error::Config("give either a fixture or an inline chart, not both".into())),
            (None, None) => return Err(Error::Config("no surface given (use --surface or a config file)".into())),
            (Some(name), None) => self.resolve_fixture(name)?,
            (None, Some(chart)) => resolve_inline(chart)?,
        };
        if let Some(d) = domain {
            let d = domain_of(d)?;
            r.chart = r.chart.with_domain(d);
            for (_, f) in &mut r.angles {
                f.chart = r.chart.clone();
            }
            r.data = r.data.map(|data| data.with_chart(r.chart.clone()));
        }
        Ok(r)
    }

    fn resolve_fixture(&self, name: &str) -> Result<Resolved> {
        let fx = Fixture::from_name(name, &self.params)?;
        if let Some(c) = self.params.c {
            let fixed = match fx {
                Fixture::HorizontalSlice { .. } | Fixture::VerticalPlane { .. } => None,
                Fixture::Unduloid { .. } => Some(1.0),
                _ => Some(-1.0),
            };
            if let Some(f) = fixed {
                if f != c {
                    return Err(Error::Config(format!("fixture {name} lives in c = {f}; --c {c} is not supported")));
                }
            }
        }
        let g = fixture(fx)?;
        let angles = match &self.angle {
            Some(a) => vec![(a.clone(), g.angle(a)?)],
            None => g.angles.iter().map(|a| (a.name.to_string(), g.angle(a.name).expect("listed angle"))).collect(),
        };
        Ok(Resolved {
            label: format!("{fx:?}"),
            chart: g.chart.clone(),
            angles,
            data: g.data.clone(),
            curvature: g.curvature.clone(),
        })
    }
}

fn resolve_inline(ch: &InlineChart) -> Result<Resolved> {
    ch.profile.validate("profile")?;
    let domain = domain_of(ch.domain)?;
    let chart = match ch.kind {
        ChartForm::Warped => {
            if ch.profile.variable != Variable::U {
                return Err(Error::Config("warped profile must depend on u".into()));
            }
            let t = ch.profile.clone();
            MetricChart::warped(Profile::new(move |u| t.eval(u)), domain, ch.c)
        }
        ChartForm::Conformal => MetricChart::conformal(ch.profile.expr(), domain, ch.c),
    }
    .map_err(|e| Error::Config(e.to_string()))?;
    let mut angles = Vec::new();
    if let Some(a) = &ch.angle {
        a.validate("angle")?;
        angles.push(("inline".to_string(), AngleField::new(chart.clone(), a.expr())));
    }
    Ok(Resolved { label: format!("inline {:?} chart", ch.kind), chart, angles, data: None, curvature: None })
}

/// Grid for a resolved surface.
pub fn grid_for(r: &Resolved, cfg: &GridConfig, default: usize) -> Result<GridSpec> {
    GridSpec::new(r.chart.domain, cfg.nu.unwrap_or(default), cfg.nv.unwrap_or(default))
        .map_err(|e| Error::Config(e.to_string()))
}

/// Parses `NxM`.
pub fn parse_grid(s: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(|| format!("expected NxM, got `{s}`"))?;
    let n = a.trim().parse().map_err(|_| format!("bad node count `{a}`"))?;
    let m = b.trim().parse().map_err(|_| format!("bad node count `{b}`"))?;
    Ok((n, m))
}

/// Parses a real number, accepting `pi`, `k*pi`, `pi/k` and `-` signs.
pub fn parse_angle(s: &str) -> std::result::Result<f64, String> {
    let s = s.trim();
    if let Some(rest) = s.strip_prefix('-') {
        return parse_angle(rest).map(|x| -x);
    }
    let pi = std::f64::consts::PI;
    if s == "pi" {
        return Ok(pi);
    }
    if let Some(k) = s.strip_prefix("pi/") {
        return k.parse::<f64>().map(|k| pi / k).map_err(|_| format!("bad angle `{s}`"));
    }
    if let Some(k) = s.strip_suffix("*pi").or_else(|| s.strip_suffix("pi")) {
        return k.parse::<f64>().map(|k| k * pi).map_err(|_| format!("bad angle `{s}`"));
    }
    s.parse().map_err(|_| format!("bad angle `{s}`"))
}

/// Parses `a:b:n` into `n + 1` angles.
pub fn parse_thetas(s: &str) -> std::result::Result<(f64, f64, usize), String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("expected a:b:n, got `{s}`"));
    }
    let n = parts[2].trim().parse().map_err(|_| format!("bad step count `{}`", parts[2]))?;
    Ok((parse_angle(parts[0])?, parse_angle(parts[1])?, n))
}

/// Parses `u,v` or `umin:umax:vmin:vmax`.
pub fn parse_floats<const N: usize>(s: &str, sep: char) -> std::result::Result<[f64; N], String> {
    let xs: Vec<f64> = s
        .split(sep)
        .map(|p| p.trim().parse::<f64>().map_err(|_| format!("bad number `{p}`")))
        .collect::<std::result::Result<_, _>>()?;
    xs.try_into().map_err(|_| format!("expected {N} numbers separated by `{sep}`, got `{s}`"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parsers() {
        assert_eq!(parse_grid("101x51"), Ok((101, 51)));
        assert!(parse_grid("101").is_err());
        assert_eq!(parse_angle("pi/2"), Ok(std::f64::consts::FRAC_PI_2));
        assert_eq!(parse_angle("-0.5"), Ok(-0.5));
        assert_eq!(parse_angle("2pi"), Ok(2.0 * std::f64::consts::PI));
        assert_eq!(parse_thetas("0:pi:8").unwrap().2, 8);
        assert_eq!(parse_floats::<2>("0.4,0.1", ','), Ok([0.4, 0.1]));
        assert!(parse_floats::<4>("1:2:3", ':').is_err());
    }

    #[test]
    fn config_round_trip_and_validation() {
        let text = r#"{
            "surface": {"fixture": "saearp", "l": 1.0, "d": 2.0, "angle": "nu_bar"},
            "grid": {"nu": 21, "nv": 11},
            "tolerances": {"m1": 1e-9},
            "output": {"path": "out.csv", "format": "csv"}
        }"#;
        let cfg = RunConfig::from_json(text).unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.tolerances.m1, 1e-9);
        assert_eq!(cfg.tolerances.m2, 1e-8);
        assert_eq!(cfg.output.format, Some(Format::Csv));
        let back: RunConfig = serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(back, cfg);
        let r = cfg.surface.resolve(None).unwrap();
        assert_eq!(r.angles.len(), 1);

        assert!(RunConfig::from_json(r#"{"grid": {"nu": 5}}"#).unwrap().validate().is_err());
        assert!(RunConfig::from_json(r#"{"tolerances": {"m1": -1}}"#).unwrap().validate().is_err());
        assert!(RunConfig::from_json(r#"{"bogus": 1}"#).is_err());
    }

    #[test]
    fn inline_chart_matches_fixture() {
        let text = r#"{"surface": {"chart": {
            "kind": "conformal", "c": -1, "domain": [-1.2, 1.2, -1, 1],
            "profile": {"basis": "cos", "coeffs": [0, 1], "power": -1},
            "angle": {"basis": "sin", "coeffs": [0, 1]}
        }}}"#;
        let r = RunConfig::from_json(text).unwrap().surface.resolve(None).unwrap();
        let p = crate::surface::Point::new(0.3, 0.2);
        assert!((crate::surface::curvature(&r.chart, p).unwrap() + 1.0).abs() < 1e-12);
        assert!(crate::angle::residual_m1(&r.angles[0].1, p).unwrap().abs() < 1e-12);
    }
}
