//! Benchmark harness: synthetic aligned instances, prior profiles, target
//! diagnoses, and strategy comparison with simulated oracles.

pub mod bundle;
pub mod instance;
pub mod profile;
pub mod run;
pub mod target;

pub use bundle::{load_dataset, read_bundle, write_bundle, BundleError};
pub use instance::{generate_instance, AlignedInstance, Correspondence, GenerateError, InstanceSpec, Relation};
pub use profile::PriorProfile;
pub use run::{run_benchmark, Aggregate, BenchConfig, BenchReport, BenchRow, Trend};
pub use target::{fix_target, TargetError, TargetMode};
