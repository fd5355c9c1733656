// `!(x > 0.0)` guards are meant to reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod error;
pub mod experiment;
pub mod game;
pub mod linalg;
pub mod multinode;
pub mod rng;
pub mod single_antenna;

pub use channel::{ChannelState, PhaseModel, Point, Rect, Scenario};
pub use error::{Error, Result};
pub use experiment::{SolverKind, SweepConfig, SweepRecord, SweepVariable};
pub use game::{EffectiveGameParams, Equilibrium};
pub use linalg::{ComplexVector, EigenDecomposition, HermitianMatrix};
pub use multinode::{BoundSet, WeightedInstance};
pub use rng::RandomStream;
pub use single_antenna::ChiSquareParams;
