//! Numerical verification engine for explicit minimal submanifold families.
//!
//! Immersions are written once against [`derivkit::Scalar`] and evaluated
//! with exact second-order jets; [`geom`] turns the jets into the induced
//! metric, the Laplace–Beltrami operator and the mean curvature vector.

pub mod derivkit;
pub mod families;
pub mod geom;
pub mod harness;
pub mod identities;
pub mod io;
