//! Exact-arithmetic toolkit deciding existence of oriented 2-plane
//! distributions and realizability of embedded surfaces as closed leaves of
//! foliations on 4-manifolds from their intersection form, Euler
//! characteristic and signature, together with closed-form multisection
//! bounds and an exact-rational quasimorphism calculus on Dehn-twist classes.

pub mod bounds;
pub mod distribution;
pub mod document;
pub mod error;
pub mod lattice;
pub mod leaf;
pub mod qm;
pub mod report;

pub use error::{Error, Result};
pub use lattice::{build_form, Block, ClassVector, IntersectionForm};
