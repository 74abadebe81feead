//! Minimal isometric immersions of Riemannian surfaces into `M²(c)×ℝ`,
//! the product of a space form of curvature `c ≠ 0` with the real line.
//!
//! An immersion of this kind is governed by its angle function `ν`, the
//! vertical component of the unit normal. The crate works through the
//! following steps:
//!
//! - [`surface`]: metric charts, orthonormal frames, Gaussian curvature
//!   and its derivatives, computed exactly with truncated Taylor jets
//!   ([`jet`]).
//! - [`angle`]: residuals of the angle-function system for a candidate
//!   `ν`, and the pointwise polynomial obstruction whose admissible roots
//!   are the only possible values of `ν` at a point.
//! - [`compat`]: Gauss–Codazzi compatibility of full data `(ν, T, S)`.
//! - [`reconstruct`]: given `ν`, rebuild `T` and `S`, integrate the frame
//!   equations in the ambient quadric model, export meshes, and measure
//!   how faithfully the result realizes the metric.
//! - [`gallery`]: closed-form test surfaces (catenoids, unduloids, screw
//!   motion surfaces, slices and planes).
//! - [`cli`]: the `isomin` command line.
//!
//! ```
//! use isomin::gallery::{fixture, Fixture};
//! use isomin::surface::Point;
//!
//! let g = fixture(Fixture::ParabolicCatenoid { t: 0.0 }).unwrap();
//! let nu = g.angle("mu").unwrap();
//! let r = nu.residuals(Point::new(0.3, -0.2)).unwrap();
//! assert!(r.m1.abs() < 1e-12 && r.m2.abs() < 1e-12);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod angle;
pub mod cli;
pub mod compat;
pub mod error;
pub mod gallery;
pub mod jet;
pub mod reconstruct;
pub mod surface;

pub use error::{Error, Result};
