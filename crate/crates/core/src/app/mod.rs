//! Configuration, pipeline orchestration, field sampling and file output.

mod config;
mod field;
pub mod output;
mod pipeline;
mod studies;

use std::path::PathBuf;

use thiserror::Error;

use crate::assembly::AssemblyError;
use crate::geometry::GeometryError;
use crate::solver::SolverError;
use crate::spline::SplineError;

pub use config::{OutputConfig, RunConfig, SolverChoice};
pub use field::{
    axis_profile, bottom_profile, dirichlet_deviation, eval_field, local_maxima, local_minima, moving_average, sample_grid, FieldSample,
    SolutionField,
};
pub use pipeline::{
    prepare, run, solve, AxisSummary, BottomSummary, Derived, DirectComparison, Prepared, RunOptions, RunOutcome, RunReport, Timings,
    FULL_SCALE_DOFS,
};
pub use studies::{
    convergence_study, observed_order, pollution_study, ConvergenceRow, ConvergenceTable, MmsConfig,
    PollutionConfig, PollutionRow, PollutionTable,
};

#[derive(Debug, Error)]
pub enum AppError {
    #[error("config: {0}")]
    Config(String),
    #[error("geometry: {0}")]
    Geometry(#[from] GeometryError),
    #[error("spline: {0}")]
    Spline(#[from] SplineError),
    #[error("assembly: {0}")]
    Assembly(#[from] AssemblyError),
    #[error("solver: {0}")]
    Solver(#[from] SolverError),
    #[error("io: {}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{dofs} dofs needs --full-scale (estimated peak memory {:.1} GB)", estimate / 1e9)]
    NeedsFullScale { dofs: usize, estimate: f64 },
    #[error("solver did not converge: {0}")]
    NotConverged(String),
    #[error("check failed: {0}")]
    Check(String),
}

impl AppError {
    /// Process exit status per failure class.
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Config(_) | AppError::Json(_) => 2,
            AppError::Io { .. } => 3,
            AppError::Geometry(_) | AppError::Spline(_) => 4,
            AppError::Assembly(_) => 5,
            AppError::Solver(_) => 6,
            AppError::NotConverged(_) => 7,
            AppError::Check(_) => 8,
            AppError::NeedsFullScale { .. } => 9,
        }
    }
}

pub(crate) fn io_err(path: &std::path::Path) -> impl FnOnce(std::io::Error) -> AppError + '_ {
    move |source| AppError::Io { path: path.to_path_buf(), source }
}
