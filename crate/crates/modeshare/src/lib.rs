//! Estimate city-level cycling and motorcycling mode shares from
//! street-view vehicle counts.
//!
//! The pipeline runs in stages:
//!
//! 1. [`dataset`] — ingest city mode-share tables, boundaries, and
//!    population grids; canonicalize shares to proportions in (0,1).
//! 2. [`sampler`] — place sample points along a road network, check
//!    image availability through a pluggable metadata client, and plan
//!    four-heading image requests per point.
//! 3. [`detections`] — aggregate per-image detector output into
//!    per-city vehicle counts; manual-validation comparison and
//!    saturation analysis.
//! 4. [`detmetrics`] — detector evaluation: IoU matching, per-class
//!    average precision, mAP@0.50, precision/recall/F1.
//! 5. [`betareg`] — beta-regression core: likelihood, analytic score,
//!    Fisher-scoring fit, prediction, AIC/BIC/pseudo-R² diagnostics.
//! 6. [`eval`] — correlation matrix, leave-one-out cross-validation,
//!    RMSE/MAE/MDAE error metrics, residual reports.
//! 7. [`cli`] — subcommand orchestration over a TOML config, with
//!    atomic artifact output.
//!
//! Each capability has a runnable demo under `examples/`; the `modeshare`
//! binary exposes the same stages as subcommands.

pub mod betareg;
pub mod cli;
pub mod client;
pub mod config;
pub mod dataset;
pub mod detections;
pub mod detmetrics;
pub mod error;
pub mod eval;
pub mod geo;
pub mod sampler;
pub mod special;

pub use error::{Error, Result};
