//! Derivative-free global minimization by the asymptotic proximal point
//! iteration, with a differential evolution baseline, closed-form analysis
//! helpers and an experiment harness.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::too_many_arguments, clippy::result_large_err)]

pub mod analysis;
pub mod app;
pub mod baselines;
pub mod error;
pub mod harness;
pub mod objectives;
pub mod sampling;

pub use app::{run, AppParams, ObjectiveSpec, RunTrace, Variant};
pub use baselines::{de_run, DeConfig};
pub use error::{Error, Result};
pub use sampling::SamplerKind;
