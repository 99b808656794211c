//! Random instances, the fairness experiment, and instance files.

mod experiment;
mod generate;
mod io;

pub use experiment::{run_experiment, write_csv, ExperimentResult, ExperimentRow, ExperimentSummary, CSV_HEADER};
pub use generate::{gen_instance, ExperimentConfig};
pub use io::{instance_from_json, instance_to_json, load_instance, parse_instance, save_instance};
