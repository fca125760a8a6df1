//! Combinatorial differential forms on polytopal meshes.
//!
//! A mesh `M` is refined into its Forman subdivision `K`, whose cochains are
//! discrete differential forms on `M`. On top of that sit the cup and wedge
//! products, a curvature-weighted diagonal metric, the Hodge operators, and a
//! diffusion solver where every K-edge can carry its own diffusivity.

pub mod algebra;
pub mod composites;
pub mod diffusion;
pub mod error;
pub mod forman;
pub mod io;
pub mod mesh;
pub mod metric;
pub mod orientation;

pub use error::{Error, Result};
pub use mesh::{CellId, Mesh, Point};
