//! Post-processing of solutions: error norms and convergence studies,
//! bending moments and von Mises stress, and field export.

mod export;
mod moments;
mod norms;

pub use export::{export_field, field_to_csv, field_to_vtk, ElementField, ExportFormat, ScalarField, VectorField};
pub use moments::{
    bending_moments, moment_from_gradient, von_mises, von_mises_stress, MomentField, Tensor, VonMisesField,
};
pub use norms::{
    convergence_study, error_norms, field_errors, manufactured_load, scalar_h1_norm, ErrorNorms, ErrorReport,
    ErrorRow, ExactSolution, SinSquared, StudySpec,
};

use crate::algorithm::AlgorithmError;
use crate::assembly::AssemblyError;
use crate::mesh::MeshError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PostprocError {
    #[error("bending moments need the Kirchhoff form")]
    WrongFormVariant,
    #[error("height {z} lies outside the plate (|z| <= {half_thickness})")]
    HeightOutOfPlate { z: f64, half_thickness: f64 },
    #[error("i/o: {0}")]
    Io(String),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Assembly(#[from] AssemblyError),
    #[error(transparent)]
    Algorithm(#[from] AlgorithmError),
}
