//! Conforming `C^1` solutions of Kirchhoff plate and biharmonic problems
//! computed with `C^0` Lagrange elements only.
//!
//! A solve runs three steps: a scalar projection of the load, an iterated
//! penalty solve for the discrete gradient on a vector Lagrange space, and a
//! scalar projection of that gradient back to a displacement.

pub mod algorithm;
pub mod assembly;
pub mod cli;
pub mod config;
pub mod mesh;
pub mod postproc;
pub mod solver;
pub mod spaces;
