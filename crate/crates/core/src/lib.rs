//! Inertial Bregman proximal DC solver with Rician denoising and coded
//! diffraction phase retrieval problem builders.

// `!(x > 0.0)` rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod image_io;
pub mod kernel;
pub mod linalg;
pub mod metrics;
pub mod phantom;
pub mod phase;
pub mod point;
pub mod priors;
pub mod rician;
pub mod solver;

pub use error::{Error, Result};
pub use kernel::{bregman_distance, Kernel, KernelKind};
pub use point::{Point, Shape};
pub use solver::{solve, BetaSchedule, DcProblem, IterationRecord, SolverConfig, SolverResult};
