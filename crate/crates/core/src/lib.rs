//! Counting weighted independent sets in (claw, odd hole)-free and
//! (fork, odd hole)-free graphs.

pub mod atom;
pub mod cutset;
pub mod dot;
pub mod engine;
pub mod error;
pub mod fork;
pub mod generate;
pub mod graph;
pub mod io;
pub mod matching;
pub mod modular;
pub mod oracle;
pub mod permanent;
pub mod weight;

pub use cutset::count_claw_odd_hole_free;
pub use engine::{Engine, EngineKind, Estimate, Trace};
pub use error::{CountError, GraphClass};
pub use fork::{count_fork_free, count_max_weight, Driver};
pub use graph::{GraphError, VertexId, WeightVector, WeightedGraph};
pub use weight::Weight;
