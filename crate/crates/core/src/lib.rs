//! Numerical laboratory for step-function spaces on countable ordinal
//! intervals and the overlap embeddings between them.

pub mod embeddings;
pub mod funcspace;
pub mod ordinal;
pub mod overlap;
pub mod spr;
pub mod verify;

pub use funcspace::{Field, FuncError, StepFun, C64};
pub use ordinal::{parse_ordinal, Ordinal, OrdinalError, OrdinalKind};
pub use overlap::{decompose_point, overlap_map, witness_point, OverlapError, WitnessPoint};
