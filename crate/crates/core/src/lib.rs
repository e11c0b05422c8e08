//! Kato-Sobolev (uniformly local Sobolev) machinery on periodized grids.
//!
//! Everything lives on the torus `[0, L)^n` sampled with `N` points per axis:
//! multi-order Sobolev norms, amalgam norms `K_p^s`, a contour-integral
//! holomorphic calculus for fields, and tau-quantized operators with
//! Schatten-norm estimates. Each module also exposes numerical checks of the
//! inequalities and identities that tie these objects together.

pub mod calculus;
pub mod ensemble;
pub mod error;
pub mod grid;
pub mod kato;
pub mod psido;
pub mod report;
pub mod sobolev;
pub mod weights;

pub use error::{Error, Result};
pub use grid::{Field, GridSpec, Spectrum};
pub use num_complex::Complex64;
pub use report::{CheckReport, EnsembleStats, Verdict};
pub use weights::MultiOrder;
