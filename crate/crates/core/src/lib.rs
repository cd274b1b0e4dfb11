//! Bounded-degree and k-matching complexes of graphs: construction, discrete
//! Morse theory, the matching tree algorithm and reduced homology.

pub mod complex;
pub mod graph;
pub mod homology;
pub mod morse;
pub mod mta;
pub mod predictions;
pub mod suite;

pub use complex::{Budget, ComplexError, DegreeBound, Face, SimplicialComplex};
pub use graph::{Graph, GraphError};
pub use homology::{betti, BettiProfile, HomologyError, SphereWedge};
