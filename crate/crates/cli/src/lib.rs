//! Parameter sweeps over electron-electron scattering entropies, written as
//! CSV or JSON tables.

pub mod config;
pub mod output;
pub mod run;

pub use config::{Command, ConfigError, Format, RunConfig, Settings};
pub use output::{render_csv, render_json, write_atomic, Row, Table, Value};
pub use run::{execute, run, summary_line, RunError};

/// Exit status for an invalid configuration or unwritable output.
pub const EXIT_CONFIG: i32 = 2;
/// Exit status when at least one row failed numerically.
pub const EXIT_NUMERIC: i32 = 3;

/// Renders `table` in the configured format.
pub fn render(cfg: &RunConfig, table: &Table) -> String {
    let hash = cfg.hash_hex();
    match cfg.format {
        Format::Csv => render_csv(table, &hash),
        Format::Json => render_json(table, &hash),
    }
}
