//! Finite-dimensional verification of skew-product graph and groupoid
//! C*-algebras, their coaction and action crossed products, and the
//! isomorphisms and equivalences relating them.

pub mod crossed;
pub mod descriptors;
pub mod duality;
pub mod graphalg;
pub mod graphs;
pub mod groupoids;
pub mod groups;
pub mod matalg;
pub mod report;
pub mod suite;
