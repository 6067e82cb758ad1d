//! Truss decomposition of undirected simple graphs, maintained under
//! streaming edge insertions.
//!
//! - [`graph`]: the mutable graph and triangle enumeration.
//! - [`decompose`]: support peeling from scratch, the reference for everything else.
//! - [`incremental`]: single-edge maintenance ([`Variant::Hcqty`] and [`Variant::JkInc`]).
//! - [`batch`]: inserting many edges at once.
//! - [`stream`]: temporal edge lists, prefix graphs and synthetic streams.
//! - [`bench`]: replay benchmarks, oracle sweeps and their reports.

pub mod batch;
pub mod bench;
pub mod decompose;
pub mod error;
pub mod graph;
pub mod incremental;
pub mod stream;

pub use batch::{BatchResult, SkipReason};
pub use decompose::{
    extract_truss, truss_decompose, truss_decompose_with, verify_state, TieBreak, TrussState,
    TrussSubgraph, Verdict, Violation,
};
pub use error::{Result, TrussError};
pub use graph::{AddOutcome, Edge, EdgeId, Graph, Triangle, VertexId};
pub use incremental::{
    min_truss_of_triangle, DynamicTruss, InsertionResult, LevelOrder, Rejection,
    TrussDegreeIndex, Variant,
};
