//! Exact, desk-scale toolkit for topological graph drawings: beyond-planar
//! parameter recognition, transparent edge colourings, coloured
//! planarisations, explicit minor models into strong products, and the
//! treewidth machinery used to certify the resulting bounds.

pub mod colouring;
pub mod drawing;
pub mod error;
pub mod families;
pub mod forests;
pub mod geometry;
pub mod graph;
pub mod matching;
pub mod minors;
pub mod planarise;
pub mod planarity;
pub mod product_structure;
pub mod treewidth;

pub use error::{Error, Result};
pub use graph::{EdgeId, Graph, VertexId};
