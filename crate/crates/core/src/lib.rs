//! Indirect optimal control for differentially flat systems.
//!
//! Trajectories are assembled from closed-form motion primitives in flat
//! coordinates, stitched at constraint junctions, and certified through
//! costate reconstruction and Euler-Lagrange residuals. Two worked systems
//! are included: an overhead crane with a payload position bound and a
//! planar double integrator avoiding a circular obstacle.

pub mod crane_solver;
pub mod di_solver;
pub mod error;
pub mod flat_model;
pub mod numerics;
pub mod optimality;
pub mod simulate;

pub use error::{Error, Result};
