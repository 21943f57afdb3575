//! Experiment configuration, the parallel Monte Carlo driver, output
//! writers and results-table reproduction.

mod config;
mod experiment;
mod table1;

pub use config::{parse_byzantine, parse_config, ExperimentSpec, Operation, KEYS};
pub use experiment::{
    all_to_all_experiment, operation_budget, run_experiment, thread_pool, BoundKind, BudgetCheck,
    CdfPoint, ExperimentSummary, Quantiles, SCHEMA_VERSION,
};
pub use table1::{table1_reproduce, Table1Report, Table1Result, Table1Row};
