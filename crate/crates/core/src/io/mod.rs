//! Files in and out: hourly CSV data, synthetic scenarios, configuration,
//! dispatch traces and run summaries.

pub mod config;
pub mod hourly;
pub mod report;
pub mod synth;

pub use config::{Config, RenewableSource};
pub use hourly::{load_hourly_csv, read_hourly_csv, write_hourly_csv};
pub use report::{linspace, write_report, write_surface_csv};
pub use synth::{generate_synthetic, SyntheticProfile};
