//! Kirchhoff bending moments and von Mises stress.

use super::PostprocError;
use crate::assembly::{vector_on_element, FormSpec, Material};
use crate::spaces::VectorSpace;

pub type Tensor = [[f64; 2]; 2];

/// `M(theta) = -D [(1 - nu) eps(theta) + nu div(theta) I]` for a gradient
/// matrix `g[i][j] = d theta_i / d x_j`.
pub fn moment_from_gradient(g: &Tensor, material: &Material) -> Tensor {
    let d = material.rigidity();
    let nu = material.poisson_ratio;
    let div = g[0][0] + g[1][1];
    let off = 0.5 * (g[0][1] + g[1][0]);
    [
        [-d * ((1.0 - nu) * g[0][0] + nu * div), -d * (1.0 - nu) * off],
        [-d * (1.0 - nu) * off, -d * ((1.0 - nu) * g[1][1] + nu * div)],
    ]
}

/// `sigma_v` for stress `sigma = 12 z / tau^3 M`.
pub fn von_mises(m: &Tensor, thickness: f64, z: f64) -> f64 {
    let s = 12.0 * z / thickness.powi(3);
    let (a, b, c) = (s * m[0][0], s * m[1][1], s * m[0][1]);
    (a * a + b * b - a * b + 3.0 * c * c).max(0.0).sqrt()
}

/// Moment tensor of a discrete `theta`, evaluated exactly element by element.
#[derive(Debug, Clone)]
pub struct MomentField {
    pub space: VectorSpace,
    pub theta: Vec<f64>,
    pub material: Material,
}

impl MomentField {
    pub fn at(&self, t: usize, xi: [f64; 2]) -> Tensor {
        let s = vector_on_element(&self.space, t, &self.theta, xi);
        moment_from_gradient(&s.grad, &self.material)
    }
}

pub fn bending_moments(theta: &[f64], space: &VectorSpace, form: &FormSpec) -> Result<MomentField, PostprocError> {
    match form {
        FormSpec::Kirchhoff(m) => {
            m.validate()?;
            Ok(MomentField { space: space.clone(), theta: theta.to_vec(), material: *m })
        }
        FormSpec::Biharmonic => Err(PostprocError::WrongFormVariant),
    }
}

#[derive(Debug, Clone)]
pub struct VonMisesField {
    pub moments: MomentField,
    pub height: f64,
}

impl VonMisesField {
    pub fn at(&self, t: usize, xi: [f64; 2]) -> f64 {
        von_mises(&self.moments.at(t, xi), self.moments.material.thickness, self.height)
    }
}

/// Von Mises stress at height `z` (default: top surface `tau / 2`).
pub fn von_mises_stress(moments: &MomentField, z: Option<f64>) -> Result<VonMisesField, PostprocError> {
    let half = 0.5 * moments.material.thickness;
    let z = z.unwrap_or(half);
    if !(z.abs() <= half * (1.0 + 1e-12)) {
        return Err(PostprocError::HeightOutOfPlate { z, half_thickness: half });
    }
    Ok(VonMisesField { moments: moments.clone(), height: z })
}
