//! Path planning on a lattice with two coupled neural layers: a spiking layer
//! that sends activity waves out from the target, and a rate-coded attractor
//! whose activity bump follows incoming fronts back to their source.

pub mod analysis;
pub mod attractor;
pub mod config;
pub mod error;
pub mod io;
pub mod manifold;
pub mod oracle;
pub mod planner;
pub mod wave;

pub use error::{Error, Result};
pub use manifold::{Manifold, NodeId, Rect};
pub use planner::{run_planner, Outcome, PlanResult, Planner, PlannerSetup};
