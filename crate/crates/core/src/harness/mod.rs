//! Configuration, deterministic parallel execution, and report output.

pub mod commands;
pub mod config;
pub mod emit;
pub mod ensemble;
pub mod oracle;
pub mod svg;

pub use commands::{run_command, Command, Report, Run, SCHEMA_VERSION};
pub use config::{DosSettings, ExperimentConfig, Flavor, GreenSettings, OracleSettings};
pub use emit::{emit_report, parse_formats, read_json, write_csv, write_json, Format, CSV_HEADER};
pub use ensemble::{collect_samples, pilot_intensity, with_threads, Plan};
pub use oracle::{oracle_check, oracle_instance, OracleInstance};
