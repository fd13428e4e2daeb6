//! Self-expressive models for drug-disease association prediction.
//!
//! A known association matrix `X` (drugs by diseases) is approximated by
//! `X * C`, where `C` is a non-negative disease-by-disease coefficient
//! matrix learned by multiplicative updates. An optional graph penalty
//! pulls coefficient profiles of similar diseases together, which lets
//! sparsely annotated diseases borrow evidence from their neighbours.
//!
//! The crate is organised around the pipeline stages:
//!
//! * [`data`], [`graph`], [`model`]: matrix containers, graph construction,
//!   objective and gradient.
//! * [`solver`]: multiplicative-update fitting loop.
//! * [`eval`]: cross-validated AUPR evaluation and hyperparameter search.
//! * [`interpret`]: disease-similarity analysis of a fitted model.
//! * [`io`], [`config`], [`cli`]: TSV formats, run configuration, command
//!   line front end.

pub mod cli;
pub mod config;
pub mod data;
pub mod error;
pub mod eval;
pub mod graph;
pub mod interpret;
pub mod io;
pub mod linalg;
pub mod model;
pub mod rng;
pub mod solver;
pub mod stats;
pub mod synth;

pub use data::AssociationMatrix;
pub use error::{Error, Result};
pub use eval::{EvalReport, FoldPlan};
pub use graph::SimilarityGraph;
pub use interpret::{DiseaseClassMap, SimilarityAnalysis};
pub use model::{CoefficientMatrix, FitOptions, Hyperparameters};
pub use solver::FitResult;
