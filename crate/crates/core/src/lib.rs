//! Exact laboratory for finite Cayley graphs.
//!
//! Builds groups from short text specs, enumerates balls, and measures growth,
//! progressions, spectra and random-walk mixing, checking the standard
//! inequalities between them as it goes.

pub mod error;
pub mod group;

pub use error::{LabError, Result};
pub use group::{Element, GeneratingSet, GroupHandle, GroupSpec, SubgroupOracle};
pub mod cayley;
pub mod cli;
pub mod growth;
pub mod mixing;
pub mod nilprog;
pub mod report;
pub mod spectral;
pub mod zoo;
