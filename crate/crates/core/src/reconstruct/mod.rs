//! From an angle function to a minimal immersion in `M²(c)×R`.
//!
//! The pipeline is: [`solve_theta`] integrates the rotation angle of the
//! tangential vertical field, [`build_data`] forms the Gauss–Codazzi data
//! `(ds², S, T, ν)` of an associate member, [`integrate_immersion`] runs
//! the ambient frame equations over a grid, and [`verify_immersion`]
//! checks the result by finite differences.

mod data;
pub mod export;
mod integrate;
mod model;
mod theta;
mod verify;

pub use data::build_data;
pub use integrate::{initial_state, integrate_immersion, FrameState, ImmersionGrid, IntegrateOptions};
pub use model::{AmbientModel, Vec4};
pub use theta::{integrate_segment, solve_theta, ThetaGrid, ThetaOptions};
pub use verify::{verify_immersion, VerifyReport, VerifyThresholds};

use crate::angle::AngleField;
use crate::compat::GaussCodazziData;
use crate::error::Result;
use crate::surface::GridSpec;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ReconstructOptions {
    pub theta: ThetaOptions,
    pub integrate: IntegrateOptions,
}

/// One reconstructed associate member with its data and report.
#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub data: GaussCodazziData,
    pub immersion: ImmersionGrid,
    pub report: VerifyReport,
}

/// Reconstructs one associate member from an already solved `θ`.
pub fn reconstruct_member(theta: &ThetaGrid, grid: &GridSpec, assoc: f64, opts: &IntegrateOptions) -> Result<Reconstruction> {
    let data = build_data(theta, assoc);
    let model = AmbientModel::new(data.chart.c)?;
    let mut immersion = integrate_immersion(&data, &model, grid, opts)?;
    immersion.assoc_angle = assoc;
    let report = verify_immersion(&immersion, &data)?;
    Ok(Reconstruction { data, immersion, report })
}

/// Reconstructs the associate member `assoc` of the immersion with angle
/// function `field`.
pub fn reconstruct(field: &AngleField, grid: &GridSpec, assoc: f64, opts: &ReconstructOptions) -> Result<Reconstruction> {
    let theta = solve_theta(field, grid, &opts.theta)?;
    reconstruct_member(&theta, grid, assoc, &opts.integrate)
}

/// One reconstruction per associate angle, sharing `θ` and the initial
/// frame conventions.
pub fn associate_sweep(
    field: &AngleField,
    grid: &GridSpec,
    angles: &[f64],
    opts: &ReconstructOptions,
) -> Result<Vec<Reconstruction>> {
    let theta = solve_theta(field, grid, &opts.theta)?;
    angles.iter().map(|&a| reconstruct_member(&theta, grid, a, &opts.integrate)).collect()
}

/// `n + 1` evenly spaced angles from `a` to `b`.
pub fn angle_range(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 0 {
        return vec![a];
    }
    (0..=n).map(|k| if k == n { b } else { a + (b - a) * k as f64 / n as f64 }).collect()
}
