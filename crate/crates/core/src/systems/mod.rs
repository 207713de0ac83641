//! Built-in systems with closed-form or oracle-computable entropies.

mod cloud;
mod doubling;
mod grid;
mod nifs;
mod shift;

pub use cloud::PointCloudSystem;
pub use doubling::{DoublingChain, DoublingChainSpec, MetricKind};
pub use grid::{GridMapSystem, IntervalGrid};
pub use nifs::{box_counting_dimension, BoxDimension, Contraction, NifsPoint, NifsRepeller, NifsSpec};
pub use shift::{bernoulli_measure, symbol_potential, AlphabetSeq, NaShift, ShiftSpec, Word};
