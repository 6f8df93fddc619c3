//! Supervised variable selection and clustering with latent-variable
//! prediction, plus the cluster-based regression baselines and the simulation
//! benchmark used to compare them.
//!
//! The pipeline has two stages. Stage one factorizes a supervision-weighted
//! predictor matrix into unit-variance latent variables and a sparse,
//! nonnegative, column-orthogonal membership matrix, so each variable joins
//! at most one cluster or is dropped entirely. Stage two regresses the
//! response on per-cluster latent variables built from the original
//! predictors and maps the cluster coefficients back to per-variable
//! coefficients.

pub mod baselines;
pub mod cv;
pub mod data;
pub mod error;
pub mod evaluation;
pub mod linalg;
pub mod pipeline;
pub mod report;
pub mod rng;
pub mod simulation;
pub mod solvers;
pub mod sosnmf;

pub use error::{Error, Result};
