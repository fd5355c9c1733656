//! Configured sweeps, bound validation and their CSV tables.

mod config;
mod output;
mod sweep;
mod validate;

pub use config::{default_distance_grid, SolverKind, SweepConfig, SweepVariable};
pub use output::{
    bound_rows_to_csv, emit_bound_csv, emit_csv, emit_summary_csv, format_float, parse_records,
    records_to_csv, summarize, summary_path, summary_to_csv, Stat, SummaryRow, BOUND_HEADER, RECORD_HEADER,
    SUMMARY_HEADER,
};
pub use sweep::{replication_seed, run_distance_sweep, run_sweep, run_uncertainty_sweep, SweepRecord};
pub use validate::{check_bound, validate_bound, BoundCheckRow, BoundReport, MIN_MC_SAMPLES};
