//! Cellular sheaves of finite-dimensional vector spaces on finite posets.
//!
//! A finite preorder carries the Alexandrov topology, whose open sets are the
//! up-closed subsets and whose smallest neighbourhoods are the open stars
//! `U_x = {y : x <= y}`. A cellular sheaf (one vector space per element and
//! one restriction map per relation) is a sheaf on the stars, and it extends
//! to every open set as an inverse limit. This crate computes that extension
//! exactly and checks the sheaf laws by finite enumeration.

pub mod error;
pub mod linalg;
pub mod morphism;
pub mod order;
pub mod random;
pub mod sheaf;
pub mod topology;

pub use error::{Error, PathProduct, Result};
pub use linalg::{Field, Matrix, Scalar, SubspaceBasis};
pub use morphism::{Classification, SheafMorphism};
pub use order::{MonotoneMap, Poset, PreOrder, QuotientResult};
pub use sheaf::{CellularSheaf, Section, SectionSpace, StalkReport};
pub use topology::{BasisIndex, OpenSet, DEFAULT_MAX_ELEMENTS};
