//! Exact enumeration of braid-group orbits of Nielsen tuples over finite
//! groups, with closed-form predictions for the number of connected
//! components of Hurwitz spaces of marked G-covers.

pub mod classes;
pub mod counting;
pub mod decomposition;
pub mod error;
pub mod group;
pub mod nielsen;
pub mod orbit;
pub mod quasipoly;
pub mod setup;
pub mod subgroup;
pub mod verification;

pub use error::{Error, Result};
pub use group::{ElemId, FiniteGroup, GroupSpec};
pub use setup::ClassSetup;
