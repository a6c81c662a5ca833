//! Ball-polyhedra in 3-space and numerical certificates of their local
//! rigidity with respect to inner dihedral angles.
//!
//! The pipeline builds `P = B(C)` from a center set, checks that it is simple
//! and standard, constructs the farthest-point Delaunay complex of `C` and its
//! truncation by `P`, extracts the polyhedron `Q` and decides infinitesimal
//! rigidity of the edge graph of its boundary.

pub mod angles;
pub mod ball;
pub mod error;
pub mod exec;
pub mod geom;
pub mod pipeline;
pub mod polyhedron;
pub mod rigidity;
pub mod simplicial;
pub mod truncated;
pub mod voronoi;

pub use ball::{build, reduce, BallPolyhedron, CenterSet};
pub use error::{Error, Result};
pub use exec::Execution;
pub use geom::{Point3, Tolerance, Vec3};
