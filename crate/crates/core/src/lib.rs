//! Graph invariants, reversible spectral positional encodings, and a small
//! structural encoder trained to regress invariants.

pub mod analysis;
pub mod augment;
pub mod cli;
pub mod error;
pub mod generate;
pub mod graph;
pub mod invariants;
pub mod io;
pub mod linalg;
pub mod local;
pub mod model;
pub mod rng;
pub mod spectral;
pub mod stats;

pub use error::{Error, Result};
pub use graph::{Corpus, Graph};
pub use linalg::Matrix;
