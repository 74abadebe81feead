use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use super::config::{Format, Resolved, Tolerances};
use crate::angle::{
    filtered_candidates, obstruction_coeffs, residual_ricci, AngleField, CandidateOptions, CandidateSet,
};
use crate::compat::{check_compatibility, GaussCodazziData};
use crate::error::{Error, Result};
use crate::reconstruct::{
    build_data, export, reconstruct_member, solve_theta, ImmersionGrid, IntegrateOptions, Reconstruction,
    ThetaGrid, ThetaOptions, VerifyReport, VerifyThresholds,
};
use crate::surface::{curvature, curvature_jet_with, GridSpec, Point};

/// Largest value of a residual over the grid against its bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Stat {
    pub max: f64,
    pub threshold: f64,
    pub evaluated: usize,
    /// Nodes where the residual is undefined.
    pub skipped: usize,
    pub pass: bool,
}

impl Stat {
    fn new(values: &[Option<f64>], threshold: f64) -> Self {
        let defined: Vec<f64> = values.iter().flatten().map(|x| x.abs()).collect();
        let max = defined.iter().copied().fold(0.0, f64::max);
        let pass = defined.iter().all(|x| *x <= threshold);
        Stat { max, threshold, evaluated: defined.len(), skipped: values.len() - defined.len(), pass }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AngleReport {
    pub angle: String,
    pub m1: Stat,
    pub m2: Stat,
    pub m3: Stat,
    pub e2: Stat,
    /// Relative obstruction residual `|Q(ν²)|`.
    pub q: Stat,
    /// Compatibility of the derived data, on a coarse subgrid.
    pub compat: Option<Stat>,
    pub note: Option<String>,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyOutput {
    pub command: &'static str,
    pub surface: String,
    pub c: f64,
    pub grid: [usize; 2],
    /// Chart curvature against the closed form, relative.
    pub curvature: Option<Stat>,
    /// Compatibility residuals of the explicit fixture data.
    pub data_compat: Option<Stat>,
    pub angles: Vec<AngleReport>,
    pub pass: bool,
}

fn undefined(e: &Error) -> bool {
    matches!(e, Error::GradientVanishes { .. } | Error::AngleGradientVanishes { .. } | Error::DegeneratePoint { .. })
}

/// `Ok(None)` for residuals that are undefined at a point.
fn optional(r: Result<f64>) -> Result<Option<f64>> {
    match r {
        Ok(x) => Ok(Some(x)),
        Err(e) if undefined(&e) => Ok(None),
        Err(e) => Err(e),
    }
}

fn coarse(grid: &GridSpec) -> GridSpec {
    GridSpec { nu: grid.nu.min(21), nv: grid.nv.min(21), base: (grid.nu.min(21) / 2, grid.nv.min(21) / 2), domain: grid.domain }
}

fn compat_stat(data: &GaussCodazziData, grid: &GridSpec, tol: f64) -> Result<Stat> {
    let pts: Vec<Point> = grid.points().collect();
    let vals = pts
        .par_iter()
        .map(|&p| check_compatibility(data, p).map(|r| Some(r.max_abs())))
        .collect::<Result<Vec<_>>>()?;
    Ok(Stat::new(&vals, tol))
}

fn verify_angle(name: &str, field: &AngleField, grid: &GridSpec, tol: &Tolerances) -> Result<AngleReport> {
    let pts: Vec<Point> = grid.points().collect();
    let c = field.chart.c;
    let rows = pts
        .par_iter()
        .map(|&p| {
            let ap = field.point(p)?;
            let q = optional(
                curvature_jet_with(&field.chart, p, tol.eps_grad)
                    .and_then(|j| obstruction_coeffs(&j, c))
                    .and_then(|co| {
                        if co.is_degenerate() {
                            Err(Error::DegeneratePoint { u: p.u, v: p.v })
                        } else {
                            Ok(co.relative_q(ap.nu * ap.nu))
                        }
                    }),
            )?;
            let e2 = ap.e2().map(|(a, b)| a.abs().max(b.abs()));
            Ok([Some(ap.m1()), Some(ap.m2()), Some(ap.m3()), e2, q])
        })
        .collect::<Result<Vec<[Option<f64>; 5]>>>()?;
    let column = |k: usize| rows.iter().map(|r| r[k]).collect::<Vec<_>>();
    let m1 = Stat::new(&column(0), tol.m1);
    let m2 = Stat::new(&column(1), tol.m2);
    let m3 = Stat::new(&column(2), tol.m3);
    let e2 = Stat::new(&column(3), tol.e2);
    let q = Stat::new(&column(4), tol.q);

    let mut note = None;
    let mut compat = None;
    if m1.pass && m2.pass {
        let g = coarse(grid);
        match solve_theta(field, &g, &ThetaOptions::default()) {
            Ok(theta) => compat = Some(compat_stat(&build_data(&theta, 0.0), &g, tol.compat)?),
            Err(Error::FlatPoint { u, v, .. }) => {
                note = Some(format!("no derived data: nu^2 reaches 1 near ({u}, {v})"));
            }
            Err(e) => return Err(e),
        }
    }
    let pass = m1.pass && m2.pass && m3.pass && e2.pass && q.pass && compat.is_none_or(|s| s.pass);
    Ok(AngleReport { angle: name.to_string(), m1, m2, m3, e2, q, compat, note, pass })
}

pub fn verify(r: &Resolved, grid: &GridSpec, tol: &Tolerances) -> Result<VerifyOutput> {
    let curvature_stat = match &r.curvature {
        Some(k) => {
            let pts: Vec<Point> = grid.points().collect();
            let vals = pts
                .par_iter()
                .map(|&p| {
                    let exact = k.value(p);
                    curvature(&r.chart, p).map(|x| Some((x - exact) / exact.abs().max(1.0)))
                })
                .collect::<Result<Vec<_>>>()?;
            Some(Stat::new(&vals, 1e-8))
        }
        None => None,
    };
    let data_compat = r.data.as_ref().map(|d| compat_stat(d, grid, tol.compat)).transpose()?;
    let angles = r
        .angles
        .iter()
        .map(|(name, field)| verify_angle(name, field, grid, tol))
        .collect::<Result<Vec<_>>>()?;
    let pass = curvature_stat.is_none_or(|s| s.pass)
        && data_compat.is_none_or(|s| s.pass)
        && angles.iter().all(|a| a.pass);
    Ok(VerifyOutput {
        command: "verify",
        surface: r.label.clone(),
        c: r.chart.c,
        grid: [grid.nu, grid.nv],
        curvature: curvature_stat,
        data_compat,
        angles,
        pass,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct RootsOutput {
    pub command: &'static str,
    pub surface: String,
    pub raw_count: usize,
    pub admissible: Vec<f64>,
    #[serde(flatten)]
    pub set: CandidateSet,
}

pub fn roots(r: &Resolved, at: Point, tol: &Tolerances) -> Result<RootsOutput> {
    let opts = CandidateOptions { eps_grad: tol.eps_grad, filter_tol: tol.filter, ..Default::default() };
    let set = filtered_candidates(&r.chart, at, &opts)?;
    Ok(RootsOutput { command: "roots", surface: r.label.clone(), raw_count: set.candidates.len(), admissible: set.admissible(), set })
}

#[derive(Debug, Clone, Serialize)]
pub struct RicciOutput {
    pub command: &'static str,
    pub surface: String,
    pub grid: [usize; 2],
    pub residual_max: f64,
    pub residual_mean: f64,
    pub reduction_gap: Stat,
    pub pass: bool,
}

pub fn ricci(r: &Resolved, grid: &GridSpec, tol: &Tolerances) -> Result<RicciOutput> {
    let pts: Vec<Point> = grid.points().collect();
    let reports = pts.par_iter().map(|&p| residual_ricci(&r.chart, p)).collect::<Result<Vec<_>>>()?;
    let abs: Vec<f64> = reports.iter().map(|x| x.residual.abs()).collect();
    let gap = Stat::new(&reports.iter().map(|x| Some(x.reduction_gap)).collect::<Vec<_>>(), tol.ricci_reduction);
    Ok(RicciOutput {
        command: "ricci",
        surface: r.label.clone(),
        grid: [grid.nu, grid.nv],
        residual_max: abs.iter().copied().fold(0.0, f64::max),
        residual_mean: abs.iter().sum::<f64>() / abs.len() as f64,
        pass: gap.pass,
        reduction_gap: gap,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct MemberOutput {
    pub assoc_angle: f64,
    pub model: String,
    pub report: VerifyReport,
    pub failures: Vec<&'static str>,
    pub output: Option<String>,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReconstructOutput {
    pub command: &'static str,
    pub surface: String,
    pub angle: String,
    pub grid: [usize; 2],
    pub substeps: usize,
    pub thresholds: VerifyThresholds,
    pub members: Vec<MemberOutput>,
    pub pass: bool,
}

/// Settings shared by `reconstruct` and `associate`.
#[derive(Debug, Clone)]
pub struct ReconstructJob<'a> {
    pub surface: &'a Resolved,
    pub angle: Option<&'a str>,
    pub grid: GridSpec,
    pub angles: Vec<f64>,
    pub tol: Tolerances,
    /// Runge-Kutta steps per interval; `None` doubles from 1 until the
    /// frame drift and quadric error meet their tolerances.
    pub substeps: Option<usize>,
    pub reorthonormalize: bool,
    pub out: Option<PathBuf>,
    pub format: Format,
}

/// Format implied by an output path.
pub fn format_for(path: Option<&Path>) -> Format {
    match path.and_then(|p| p.extension()).and_then(|e| e.to_str()) {
        Some("obj") => Format::Obj,
        Some("json") => Format::ReportJson,
        _ => Format::Csv,
    }
}

fn member_path(base: &Path, k: usize, count: usize) -> PathBuf {
    if count == 1 {
        return base.to_path_buf();
    }
    let stem = base.file_stem().and_then(|s| s.to_str()).unwrap_or("member");
    let name = match base.extension().and_then(|e| e.to_str()) {
        Some(ext) => format!("{stem}_{k:02}.{ext}"),
        None => format!("{stem}_{k:02}"),
    };
    base.with_file_name(name)
}

fn write_mesh(im: &ImmersionGrid, path: &Path, format: Format) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    match format {
        Format::Obj => export::write_obj(im, &mut w)?,
        _ => export::write_csv(im, &mut w)?,
    }
    w.flush()?;
    Ok(())
}

const MAX_SUBSTEPS: usize = 64;

/// Smallest power-of-two substep count for which the first member meets
/// the drift and quadric tolerances, extrapolating with the fourth-order
/// error rate of the integrator.
fn choose_substeps(theta: &ThetaGrid, grid: &GridSpec, assoc: f64, base: &IntegrateOptions, tol: &Tolerances) -> Result<usize> {
    let target = tol.drift.min(tol.quadric);
    let mut n = 1;
    while n < MAX_SUBSTEPS {
        let probe = IntegrateOptions { substeps: n, drift_abort: f64::INFINITY, ..*base };
        match reconstruct_member(theta, grid, assoc, &probe) {
            Ok(rec) => {
                let err = rec.report.gram_drift.max(rec.report.quadric_error);
                if err <= target {
                    return Ok(n);
                }
                let factor = (err / (0.5 * target)).powf(0.25);
                n = ((n as f64 * factor).ceil() as usize).next_power_of_two().max(2 * n);
            }
            Err(Error::IntegrationDiverged { .. } | Error::NonFinite { .. }) => n *= 2,
            Err(e) => return Err(e),
        }
    }
    Ok(MAX_SUBSTEPS)
}

pub fn reconstruct_members(job: &ReconstructJob<'_>) -> Result<ReconstructOutput> {
    let r = job.surface;
    let (angle_name, field) = match job.angle {
        Some(name) => r.angles.iter().find(|(n, _)| n == name),
        None => r.angles.first(),
    }
    .ok_or_else(|| Error::Config(format!("{} has no angle function to reconstruct", r.label)))?;
    let tol = &job.tol;
    let base = IntegrateOptions { reorthonormalize: job.reorthonormalize, drift_abort: tol.drift_abort, ..Default::default() };
    let theta = solve_theta(field, &job.grid, &ThetaOptions::default())?;
    let substeps = match job.substeps {
        Some(n) => n.max(1),
        None => choose_substeps(&theta, &job.grid, job.angles[0], &base, tol)?,
    };
    let opts = IntegrateOptions { substeps, ..base };
    let recs = job
        .angles
        .iter()
        .map(|&a| reconstruct_member(&theta, &job.grid, a, &opts))
        .collect::<Result<Vec<Reconstruction>>>()?;
    let thresholds = VerifyThresholds {
        metric: tol.metric,
        sff: tol.sff,
        mean_curvature: tol.mean_curvature,
        drift: tol.drift,
        normal: tol.normal,
        height: tol.height,
        quadric: tol.quadric,
    };
    let mut members = Vec::with_capacity(recs.len());
    for (k, rec) in recs.iter().enumerate() {
        let output = match (&job.out, job.format) {
            (Some(base), Format::Csv | Format::Obj) => {
                let path = member_path(base, k, recs.len());
                write_mesh(&rec.immersion, &path, job.format)?;
                Some(path.display().to_string())
            }
            _ => None,
        };
        let failures = rec.report.failures(&thresholds);
        let m = rec.immersion.model;
        members.push(MemberOutput {
            assoc_angle: rec.immersion.assoc_angle,
            model: format!("c={} signature={}", m.c, m.signature_label()),
            report: rec.report,
            pass: failures.is_empty(),
            failures,
            output,
        });
    }
    let pass = members.iter().all(|m| m.pass);
    Ok(ReconstructOutput {
        command: if job.angles.len() == 1 { "reconstruct" } else { "associate" },
        surface: r.label.clone(),
        angle: angle_name.clone(),
        grid: [job.grid.nu, job.grid.nv],
        substeps,
        thresholds,
        members,
        pass,
    })
}
