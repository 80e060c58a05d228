//! Batch runs, summary statistics and CSV records.

mod harness;
pub mod stats;

pub use harness::{
    aggregate, compare, deviations, format_summary, read_csv, run_algorithm, run_benchmark,
    seed_from_name, write_csv, AlgorithmSummary, BenchConfig, BenchInstance, BenchRecord,
    BenchReport, HeuristicComparison, RunStatus, SolveOptions, CSV_HEADER,
};
