pub mod entropy;
pub mod error;
pub mod experiments;
pub mod factor_graph;
pub mod gf2;
pub mod group;
pub mod microstate;
pub mod rng;

pub use error::{Error, Result};
