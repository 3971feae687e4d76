//! Persistent homology of Vietoris-Rips snapshot sequences, accelerated by
//! strong collapse.
//!
//! Each snapshot complex is reduced to its core using only its maximal
//! simplices ([`collapse`]). The cores are chained into a tower through the
//! retraction maps ([`tower`]), the tower is turned into an equivalent
//! filtration by coning, and the filtration is reduced over GF(2)
//! ([`persistence`]). An uncollapsed pipeline is kept alongside as a
//! reference.

pub mod collapse;
pub mod complex;
pub mod filtration;
pub mod io;
pub mod persistence;
pub mod pipeline;
pub mod rips;
mod sorted;
pub mod tower;

#[cfg(test)]
mod testing;

pub use collapse::{core, nerve_step, Collapse, CollapseMatrix, CollapseTrace, RetractionMap};
pub use complex::{ComplexError, ComplexMatrix, ComplexStats, Simplex, VertexId, DEFAULT_EXPANSION_CAP};
pub use sorted::is_subset;
