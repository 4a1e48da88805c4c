//! Convergence benchmarks, slope fits and the application pipelines behind
//! the `gilbert` command-line tool.

mod bench;
mod fit;
mod pipelines;
mod spec;

pub use bench::{
    convergence_bench, face_instance, BenchParams, BenchResult, BenchRun, FaceInstance, HullInstanceParams, Shape,
    EXPONENTIAL_FLOOR,
};
pub use fit::{
    end_above_floor, fit_exponential, fit_loglog_slope, ols, FitWindow, SlopeFit, DEFAULT_BURN_IN, MIN_FIT_POINTS,
};
pub use pipelines::{
    ghz_pipeline, steering_table, Certification, GhzConfig, GhzResult, SteerConfig, SteeringResult, SteeringRow,
};
pub use spec::{ExperimentSpec, Target};

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::engine::RunRecord;
use crate::Result;

/// Writes a trace as CSV, creating parent directories.
pub fn write_trace(record: &RunRecord, path: &Path) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let mut out = BufWriter::new(File::create(path)?);
    record.write_csv(&mut out)?;
    out.flush()?;
    Ok(())
}

/// Writes pretty-printed JSON, creating parent directories.
pub fn write_json<T: Serialize + ?Sized>(value: &T, path: &Path) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let mut out = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}
