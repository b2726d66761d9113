//! Exact computations with complex reflection groups: the imprimitive series
//! G(de,e,r), small exceptional groups given by matrices, their characters,
//! automorphisms, and Galois-equivariant models.
pub mod automorphisms;
pub mod battery;
pub mod characters;
pub mod cyclotomic;
pub mod data;
pub mod descent;
pub mod equivariant;
pub mod groups;
pub mod invariants;
pub mod linalg;
pub mod tableau;

pub use cyclotomic::{Cyclotomic, GaloisAuto, Rational};
pub use linalg::CycMatrix;
