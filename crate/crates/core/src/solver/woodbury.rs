//! Solves with `A + lambda U U^T` given a factorization of `A`, via the
//! Sherman-Morrison-Woodbury identity.

use super::{CholeskyFactor, SolverError};
use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone)]
pub struct WoodburyFactor<'a> {
    base: &'a CholeskyFactor,
    /// Update vectors `u_i`.
    u: Vec<Vec<f64>>,
    /// `A^{-1} u_i`.
    z: Vec<Vec<f64>>,
    capacitance: Option<nalgebra::Cholesky<f64, nalgebra::Dyn>>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl<'a> WoodburyFactor<'a> {
    pub fn new(base: &'a CholeskyFactor, lambda: f64, u: &[Vec<f64>]) -> Result<Self, SolverError> {
        for ui in u {
            if ui.len() != base.dim() {
                return Err(SolverError::DimensionMismatch { expected: base.dim(), got: ui.len() });
            }
        }
        if u.is_empty() || lambda == 0.0 {
            return Ok(WoodburyFactor { base, u: Vec::new(), z: Vec::new(), capacitance: None });
        }
        let z: Vec<Vec<f64>> = u.iter().map(|ui| base.solve(ui)).collect::<Result<_, _>>()?;
        let k = u.len();
        let s = DMatrix::from_fn(k, k, |i, j| {
            dot(&u[i], &z[j]) + if i == j { 1.0 / lambda } else { 0.0 }
        });
        let s = 0.5 * (&s + s.transpose());
        let chol = nalgebra::Cholesky::new(s).ok_or(SolverError::SingularCapacitance)?;
        Ok(WoodburyFactor { base, u: u.to_vec(), z, capacitance: Some(chol) })
    }

    pub fn rank(&self) -> usize {
        self.u.len()
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>, SolverError> {
        let mut x = self.base.solve(b)?;
        if let Some(chol) = &self.capacitance {
            let w = DVector::from_iterator(self.u.len(), self.u.iter().map(|ui| dot(ui, &x)));
            let s = chol.solve(&w);
            for (zi, si) in self.z.iter().zip(s.iter()) {
                for (xv, zv) in x.iter_mut().zip(zi) {
                    *xv -= si * zv;
                }
            }
        }
        Ok(x)
    }
}

/// One-shot `(A + lambda U U^T) x = b`.
pub fn woodbury_solve(
    f: &CholeskyFactor,
    lambda: f64,
    u: &[Vec<f64>],
    b: &[f64],
) -> Result<Vec<f64>, SolverError> {
    WoodburyFactor::new(f, lambda, u)?.solve(b)
}
