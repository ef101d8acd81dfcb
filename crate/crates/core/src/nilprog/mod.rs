//! Commutator lists and the four progression constructions in nilpotent groups.

mod hall;
mod progression;
mod verify;

pub use hall::*;
pub use progression::*;
pub use verify::*;
