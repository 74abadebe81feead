//! Command-line interface.
//!
//! [`run`] parses arguments, merges them with an optional JSON config,
//! dispatches a subcommand and returns the process exit code:
//! [`EXIT_PASS`], [`EXIT_RESIDUAL`], [`EXIT_CONFIG`] or [`EXIT_EVAL`].
//! Every subcommand prints a JSON report on the output stream.

pub mod commands;
pub mod config;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::reconstruct::angle_range;
use crate::surface::Point;
use commands::{format_for, ReconstructJob};
use config::{grid_for, parse_angle, parse_floats, parse_grid, parse_thetas, Format, RunConfig};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_RESIDUAL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_EVAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "isomin", version, about = "Angle functions and minimal immersions in M2(c)xR")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the angle system, obstruction and compatibility residuals over a grid.
    Verify(SurfaceArgs),
    /// Candidate angle values at one point.
    Roots {
        #[command(flatten)]
        surface: SurfaceArgs,
        /// Evaluation point `u,v`; defaults to the domain center.
        #[arg(long, value_parser = parse_point)]
        at: Option<[f64; 2]>,
    },
    /// Reconstruct one associate member and export it.
    Reconstruct {
        #[command(flatten)]
        surface: SurfaceArgs,
        #[command(flatten)]
        out: OutputArgs,
        /// Associate angle.
        #[arg(long, default_value = "0", value_parser = parse_angle, allow_hyphen_values = true)]
        theta: f64,
    },
    /// Reconstruct the members `a, a + (b-a)/n, ..., b` of the associate family.
    Associate {
        #[command(flatten)]
        surface: SurfaceArgs,
        #[command(flatten)]
        out: OutputArgs,
        /// `a:b:n`; angles accept `pi`, `pi/k` and `k*pi`.
        #[arg(long, default_value = "0:pi:8", value_parser = parse_thetas, allow_hyphen_values = true)]
        thetas: (f64, f64, usize),
    },
    /// Ricci-condition residual of the chart metric over a grid.
    Ricci(SurfaceArgs),
}

fn parse_point(s: &str) -> std::result::Result<[f64; 2], String> {
    parse_floats(s, ',')
}

fn parse_domain(s: &str) -> std::result::Result<[f64; 4], String> {
    parse_floats(s, ':')
}

#[derive(Debug, Args)]
struct SurfaceArgs {
    /// Gallery fixture: parabolic-catenoid, catenoid, unduloid, saearp, horizontal-slice, vertical-plane.
    #[arg(long)]
    surface: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    l: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    d: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    t: Option<f64>,
    /// Ambient curvature.
    #[arg(long, allow_hyphen_values = true)]
    c: Option<f64>,
    /// Angle function of the fixture; prefix with `-` for its negation.
    #[arg(long, allow_hyphen_values = true)]
    angle: Option<String>,
    /// Grid size `NxM`.
    #[arg(long, value_parser = parse_grid)]
    grid: Option<(usize, usize)>,
    /// Chart domain `umin:umax:vmin:vmax`.
    #[arg(long, value_parser = parse_domain, allow_hyphen_values = true)]
    domain: Option<[f64; 4]>,
    /// JSON run configuration; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Output file; members of a sweep get an index suffix.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Runge-Kutta steps per grid interval; chosen automatically when absent.
    #[arg(long)]
    substeps: Option<usize>,
    /// Re-orthonormalize the frame after every step.
    #[arg(long)]
    reorthonormalize: bool,
}

impl SurfaceArgs {
    fn config(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
                RunConfig::from_json(&text)?
            }
            None => RunConfig::default(),
        };
        let s = &mut cfg.surface;
        if let Some(name) = &self.surface {
            s.fixture = Some(name.clone());
            s.chart = None;
        }
        let p = &mut s.params;
        for (dst, src) in [(&mut p.l, self.l), (&mut p.d, self.d), (&mut p.beta, self.beta), (&mut p.t, self.t), (&mut p.c, self.c)] {
            if src.is_some() {
                *dst = src;
            }
        }
        if let (Some(c), Some(chart)) = (self.c, s.chart.as_mut()) {
            chart.c = c;
        }
        if self.angle.is_some() {
            s.angle = self.angle.clone();
        }
        if let Some((nu, nv)) = self.grid {
            cfg.grid.nu = Some(nu);
            cfg.grid.nv = Some(nv);
        }
        if self.domain.is_some() {
            cfg.grid.domain = self.domain;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn emit<T: Serialize>(out: &mut dyn Write, report: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(report).map_err(|e| Error::Io(e.to_string()))?;
    writeln!(out, "{text}")?;
    Ok(())
}

fn verdict(pass: bool) -> i32 {
    if pass {
        EXIT_PASS
    } else {
        EXIT_RESIDUAL
    }
}

fn reconstruct_job(
    args: &SurfaceArgs,
    out: &OutputArgs,
    angles: Vec<f64>,
    w: &mut dyn Write,
) -> Result<i32> {
    let cfg = args.config()?;
    let surface = cfg.surface.resolve(cfg.grid.domain)?;
    let grid = grid_for(&surface, &cfg.grid, 201)?;
    let path = out.out.clone().or_else(|| cfg.output.path.as_ref().map(PathBuf::from));
    let format = out.format.or(cfg.output.format).unwrap_or_else(|| format_for(path.as_deref()));
    let job = ReconstructJob {
        surface: &surface,
        angle: cfg.surface.angle.as_deref(),
        grid,
        angles,
        tol: cfg.tolerances,
        substeps: out.substeps,
        reorthonormalize: out.reorthonormalize,
        out: path.clone(),
        format,
    };
    let report = commands::reconstruct_members(&job)?;
    if let (Some(p), Format::ReportJson) = (&path, format) {
        let text = serde_json::to_string_pretty(&report).map_err(|e| Error::Io(e.to_string()))?;
        std::fs::write(p, text + "\n")?;
    }
    emit(w, &report)?;
    Ok(verdict(report.pass))
}

fn dispatch(cmd: Command, w: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Verify(args) => {
            let cfg = args.config()?;
            let surface = cfg.surface.resolve(cfg.grid.domain)?;
            let grid = grid_for(&surface, &cfg.grid, 101)?;
            let report = commands::verify(&surface, &grid, &cfg.tolerances)?;
            emit(w, &report)?;
            Ok(verdict(report.pass))
        }
        Command::Roots { surface: args, at } => {
            let cfg = args.config()?;
            let surface = cfg.surface.resolve(cfg.grid.domain)?;
            let at = at.map_or_else(|| surface.chart.domain.center(), |[u, v]| Point::new(u, v));
            let report = commands::roots(&surface, at, &cfg.tolerances)?;
            emit(w, &report)?;
            Ok(EXIT_PASS)
        }
        Command::Reconstruct { surface, out, theta } => reconstruct_job(&surface, &out, vec![theta], w),
        Command::Associate { surface, out, thetas: (a, b, n) } => {
            if n == 0 {
                return Err(Error::Config("--thetas needs at least one step".into()));
            }
            reconstruct_job(&surface, &out, angle_range(a, b, n), w)
        }
        Command::Ricci(args) => {
            let cfg = args.config()?;
            let surface = cfg.surface.resolve(cfg.grid.domain)?;
            let grid = grid_for(&surface, &cfg.grid, 101)?;
            let report = commands::ricci(&surface, &grid, &cfg.tolerances)?;
            emit(w, &report)?;
            Ok(verdict(report.pass))
        }
    }
}

/// Exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::Parameter(_) | Error::UnknownFixture(_) => EXIT_CONFIG,
        _ => EXIT_EVAL,
    }
}

/// Runs the command line `args` (program name first), writing reports to
/// `out` and diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return EXIT_CONFIG;
            }
            let _ = write!(out, "{}", e.render());
            return EXIT_PASS;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(std::iter::once("isomin").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn bad_input_is_a_config_error() {
        assert_eq!(call(&["verify", "--surface", "torus"]).0, EXIT_CONFIG);
        assert_eq!(call(&["verify", "--surface", "saearp", "--grid", "5x5"]).0, EXIT_CONFIG);
        assert_eq!(call(&["verify", "--surface", "saearp", "--d", "0.5"]).0, EXIT_CONFIG);
        assert_eq!(call(&["frobnicate"]).0, EXIT_CONFIG);
        assert_eq!(call(&["verify"]).0, EXIT_CONFIG);
        assert_eq!(call(&["--help"]).0, EXIT_PASS);
    }

    #[test]
    fn horizontal_slice_verifies_on_the_constant_branch() {
        let (code, out, err) = call(&["verify", "--surface", "horizontal-slice", "--c", "-1", "--grid", "21x21"]);
        assert_eq!(code, EXIT_PASS, "{err}");
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["angles"][0]["q"]["evaluated"], 0);
        assert_eq!(v["data_compat"]["pass"], true);
    }

    #[test]
    fn roots_on_constant_curvature_is_an_evaluation_error() {
        let (code, _, err) = call(&["roots", "--surface", "horizontal-slice"]);
        assert_eq!(code, EXIT_EVAL);
        assert!(err.contains("degenerate: ∇K = 0"));
        let (code, out, _) = call(&["roots", "--surface", "saearp", "--at", "0.4,0"]);
        assert_eq!(code, EXIT_PASS);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["admissible"].as_array().unwrap().len(), 4);
    }

    #[test]
    fn reports_are_deterministic() {
        let a = call(&["ricci", "--surface", "catenoid", "--grid", "15x15"]);
        let b = call(&["ricci", "--surface", "catenoid", "--grid", "15x15"]);
        assert_eq!(a, b);
        assert_eq!(a.0, EXIT_PASS);
    }
}
