//! Run configuration, file formats and the synthetic-truth generator.

mod config;
mod fronts;
mod synth;
mod wind;

pub use config::{RunConfig, SyntheticConfig, WindConfig};
pub use fronts::{load_front_records, load_fronts_json, write_fronts_json, FrontRecord, FrontTag};
pub use synth::{generate_synthetic, jitter_front, simulate_fronts};
pub use wind::{load_wind_csv, write_wind_csv};
