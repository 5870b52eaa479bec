//! Stream ingestion and synthetic generation.

pub mod libsvm;
pub mod synthetic;

pub use libsvm::{format_libsvm_line, parse_libsvm_line, LibsvmReader};
pub use synthetic::{SyntheticSpec, SyntheticStream, WeightLaw};
