//! Exact simulation and verification toolkit for Hamiltonian cellular automata.

pub mod ca;
pub mod error;
pub mod experiment;
pub mod gaussian;
pub mod gup;
pub mod io;
pub mod ising;
pub mod linalg;
pub mod multitime;
pub mod ontology;
pub mod propagator;
pub mod sampling;
pub mod suite;

pub use error::{Error, Result};
