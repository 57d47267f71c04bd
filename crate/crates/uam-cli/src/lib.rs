//! Library surface of the command-line harness: config loading, the train /
//! eval / compare pipelines, and run manifests. The `uam` binary is a thin
//! argument parser over these functions.

mod commands;
mod config;
mod manifest;
mod util;

pub use commands::{
    cmd_compare, cmd_eval, cmd_print_config, cmd_train, summarize_comparison, ComparisonSummary,
    ModeMetrics, SeedComparison,
};
pub use config::FullConfig;
pub use manifest::RunManifest;
pub use util::write_atomic;
