//! Instance generation, the text file format, benchmarks and the CLI.

pub mod bench;
pub mod cli;
pub mod format;
pub mod gen;

pub use bench::{bench_run, estimate_failure_rate, BenchConfig, BenchRow};
pub use format::{parse_document, parse_instance, parse_kinstance, write_instance, write_kinstance, Document};
pub use gen::{gen_planted, PlantedConfig};
