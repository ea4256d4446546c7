pub mod cli;
pub mod error;
pub mod experiments;
pub mod graph;
pub mod names;
pub mod observables;
pub mod render;
pub mod rulecheck;
pub mod steps;

pub use error::{Error, ParseError, Result};
pub use graph::{Configuration, Vertex};
pub use names::Name;
pub use steps::{Direction, Dynamics, Rules, Step, StepKind};
