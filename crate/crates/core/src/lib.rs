//! Typical-user laws of the infinite Poisson cellular model, and the Monte
//! Carlo machinery that checks lattice networks under log-normal shadowing
//! against them.
//!
//! Module map:
//!
//! - [`numerics`]: special functions, quadrature, Laplace inversion and
//!   golden-section search.
//! - [`model`]: propagation parameters and the equivalent one-dimensional
//!   Poisson intensity of the propagation-loss process.
//! - [`analytic`]: path-loss, interference-factor, SIR/SINR, spectral and
//!   energy-efficiency distributions of the Poisson model.
//! - [`simulate`]: base-station patterns on a torus and typical-user sampling.
//! - [`stats`]: empirical CDFs, Kolmogorov-Smirnov testing and the
//!   shadowing-strength sweep.

// `!(x > 0.0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod error;
pub mod model;
pub mod numerics;
pub mod simulate;
pub mod stats;

pub use analytic::{PathLossLaw, SinrLaw, SirLaw};
pub use error::{Error, Result};
pub use model::{EquivalentPoisson, PropagationModel, ShadowingSpec};
pub use numerics::{InversionConfig, QuadratureConfig};
pub use simulate::{PatternKind, PatternSpec, Point, PointPattern, TruncationWindow, TypicalUserSample};
pub use stats::{EmpiricalCdf, KsResult};
