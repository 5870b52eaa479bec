//! Streaming applications built on the learners: explaining outliers by
//! relative risk, relative-deltoid detection, and streaming PMI.

pub mod deltoid;
pub mod explain;
pub mod pmi;
pub mod reservoir;
pub mod risk;

pub use deltoid::{deltoid_detect, interleave, DeltoidReport, DeltoidSpec, PairedCountMin};
pub use explain::{explain_stream, pearson, AttributeRow, AttributeSpec, ExplainEntry, ExplainReport};
pub use pmi::{PairGeneratorSpec, PmiConfig, PmiEntry, PmiStream};
pub use reservoir::UnigramReservoir;
pub use risk::{relative_risk, RiskCounts, RiskTable};
