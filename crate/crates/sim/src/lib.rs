//! Configuration, path-list ingestion, result files and a rayon executor for
//! the `isi-core` experiments.

pub mod config;
pub mod executor;
pub mod pathlist;
pub mod results;
pub mod selftest;

pub use config::{load_config, CdfSource, Config, ConfigError, ZetaPlan};
pub use executor::RayonExecutor;
pub use pathlist::{read_pathlist, write_pathlist, PathListError};
