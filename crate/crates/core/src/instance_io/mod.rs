//! Reading, writing and generating instances.

mod generator;
mod rilp;

pub use generator::{generate_instance, GeneratorParams, SplitMix64};
pub use rilp::{parse_rilp, write_rilp};
