//! Command-line front end: installability reports, the weather summary,
//! file-overwrite candidates and cross-architecture aggregation.

mod aggregate;
mod args;
mod conflicts;
mod report;
mod run;
pub mod weather;

pub use aggregate::{aggregate_reports, Aggregate, ArchitectureCount};
pub use args::{Cli, Command, Format};
pub use report::{JsonReport, JsonResult, RunReport, Timings};
pub use run::{read_input, run, run_debcheck, Selector};
pub use weather::{summarize, weather_category, Summary, WeatherCategory};
