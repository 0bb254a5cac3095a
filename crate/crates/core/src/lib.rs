//! Hyperbolic Coxeter polyhedra from their combinatorics.
//!
//! Given a planar trivalent graph with integer edge labels `n` (dihedral
//! angle `π/n`), this crate decides realizability through Andreev's
//! conditions, classifies the polyhedron as large (Haken) or small, realizes
//! it in the hyperboloid model and integrates Schläfli's differential to get
//! its volume.

pub mod andreev;
pub mod census;
pub mod circuits;
pub mod corpus;
pub mod haken;
pub mod lobachevsky;
pub mod poly_model;
pub mod quadrature;
pub mod realization;
pub mod volume;

pub use andreev::{check, AndreevReport, Outcome, Regime, VertexType};
pub use circuits::{enumerate_circuits, separating_triangles, Circuit};
pub use haken::{classify, HakenVerdict};
pub use realization::{realize, RealizeOptions, Realization};
pub use volume::{schlafli_volume, DeformationPath, VolumeResult};
pub use poly_model::{
    automorphisms, parse_polyhedron, serialize, validate, AbstractPolyhedron, LabeledPolyhedron,
};
