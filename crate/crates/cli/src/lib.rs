//! Stream generation and the naive/batch/buffered comparison harness behind
//! the `stream-bench` binary.

pub mod bench;
pub mod stream;

pub use bench::{
    emit_report, render_report, run_bench, BenchReport, Engine, EngineReport, QueryErrors,
    ReportFormat,
};
pub use stream::{
    generate_stream, read_stream, write_stream, DeltaMode, KeyDistribution, StreamSpec,
};

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("invalid input: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Sketch(#[from] wordsketch::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}
