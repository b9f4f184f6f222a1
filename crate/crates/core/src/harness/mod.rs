//! Dataset generators, fixtures and the benchmark driver.

pub mod bench;
pub mod fixtures;
mod generators;
pub mod manifest;
pub mod synth;

pub use bench::{run_benchmark, Algorithm, BenchConfig, BenchReport, BenchRow, GraphSpec};
pub use generators::{generate_copurchase_graph, generate_social_graph, SOCIAL_TRIPLES};
pub use manifest::{Manifest, ManifestEntry};
