//! Passivity-based gradient-play dynamics for generalized Nash equilibrium
//! seeking under coupled constraints.
//!
//! The crate is organised bottom-up: [`game`] and [`graph`] describe the
//! problem, [`compensators`] builds and verifies LTI blocks, [`dynamics`]
//! assembles the vector fields over a flat state, [`integrator`] steps them,
//! [`diagnostics`] measures the results and [`bench`] ties everything to the
//! benchmark games and the experiment format used by the CLI.

pub mod bench;
pub mod compensators;
pub mod cones;
pub mod diagnostics;
pub mod dynamics;
pub mod error;
pub mod game;
pub mod graph;
pub mod integrator;
pub mod linalg;

pub use error::{Error, Result};
