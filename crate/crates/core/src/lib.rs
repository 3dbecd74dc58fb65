//! Spatial mapping with relation graphs.
//!
//! An agent attends to discrete parts of a 2-D environment. Each part gets a
//! memory node bound to its descriptor and its location on a single grid
//! module; transitions between parts store coarse displacement bins on graph
//! edges. Together with the grid module the graph predicts which
//! object-vector cell becomes active during movement and attention shifts.

pub mod codes;
pub mod config;
pub mod engine;
pub mod error;
pub mod graph;
pub mod harness;
pub mod rng;
pub mod world;

pub use config::Config;
