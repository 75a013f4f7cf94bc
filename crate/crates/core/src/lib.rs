//! Nested stochastic block model for collections of networks.
//!
//! Networks are clustered into classes; within each network, nodes are
//! clustered into communities whose connectivity is shared by every network
//! in the same class. Both levels use truncated stick-breaking priors.

pub mod cli;
pub mod error;
pub mod io;
pub mod metrics;
pub mod model;
pub mod netcore;
pub mod numerics;
pub mod samplers;
pub mod simgen;

pub use error::{NsbmError, Result};
