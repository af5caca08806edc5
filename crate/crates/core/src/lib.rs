//! Finite-field combinatorics workbench: intersecting families of
//! polynomial graphs over `F_q`, quadratic character sums, direction sets,
//! and exhaustive oracles that check the associated size bounds and
//! identities over small fields.

pub mod charsum;
pub mod directions;
pub mod error;
pub mod families;
pub mod gf;
pub mod polyfun;
pub mod report;
pub mod search;

pub use error::{Error, Result};
pub use gf::{Fe, FieldCtx, FieldSpec, QuadRoots};
pub use polyfun::{PointAG, PolyK};
pub use report::{Report, Verdict};
