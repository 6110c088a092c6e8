//! Configuration and output files.

pub mod config;
pub mod output;

pub use config::{
    known_keys, load_config_file, merge, parse_config, parse_pair, parse_real, resolve, Command, Normalize,
    ParamMap, ResolvedRun, RunConfig,
};
pub use output::{
    csv_name, format_real, manifest_path, write_outputs, write_spectrum_csv, ConstantsTable, Manifest, CSV_COLUMNS,
};
