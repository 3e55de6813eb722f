//! Iterated penalty solve of the Stokes-like system
//! `a(theta, psi) + b(phi, psi) = (grad z, psi)`, `b(theta, r) = 0`.

use super::{AlgorithmError, PenaltyConfig};
use crate::assembly::{assemble_a, assemble_b, assemble_coupling, assemble_rot_sampler, FormSpec};
use crate::mesh::BoundaryPartition;
use crate::solver::{factorize_spd, CholeskyFactor, CsrMatrix, WoodburyFactor};
use crate::spaces::{ScalarSpace, VectorSpace};

/// Per-iteration stopping quantity `||rot theta^n|| + sum_i |(t . theta^n, 1)_i|`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct IterationTrace {
    pub eps: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

impl IterationTrace {
    pub fn final_eps(&self) -> f64 {
        self.eps.last().copied().unwrap_or(0.0)
    }
}

#[derive(Debug, Clone)]
pub struct PenaltyOutcome {
    pub theta: Vec<f64>,
    /// Accumulated multiplier potential; `r_X = rot phi`.
    pub phi: Vec<f64>,
    /// Circulation multipliers `kappa_i = (t . phi, 1)` on free components `1..N-1`.
    pub kappa: Vec<f64>,
    pub trace: IterationTrace,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Matrices of the penalized system with `a + lambda * rot-gram` factored once.
#[derive(Debug, Clone)]
pub struct PenaltySystem {
    pub a: CsrMatrix,
    pub rot_gram: CsrMatrix,
    pub circulations: Vec<Vec<f64>>,
    pub coupling: CsrMatrix,
    /// Weighted quadrature samples of `rot`; `rot_gram = E^T E`.
    pub rot_sampler: CsrMatrix,
    lambda: f64,
    factor: CholeskyFactor,
}

impl PenaltySystem {
    pub fn new(
        vspace: &VectorSpace,
        sspace: &ScalarSpace,
        form: &FormSpec,
        partition: &BoundaryPartition,
        lambda: f64,
    ) -> Result<Self, AlgorithmError> {
        let coupling = assemble_coupling(vspace, sspace)?;
        Self::with_coupling(vspace, form, partition, lambda, coupling)
    }

    pub fn with_coupling(
        vspace: &VectorSpace,
        form: &FormSpec,
        partition: &BoundaryPartition,
        lambda: f64,
        coupling: CsrMatrix,
    ) -> Result<Self, AlgorithmError> {
        if !(lambda > 0.0) {
            return Err(AlgorithmError::InvalidConfig(format!("penalty parameter {lambda} must be positive")));
        }
        let a = assemble_a(vspace, form)?.matrix;
        let b = assemble_b(vspace, partition);
        let factor = factorize_spd(&a.add_scaled(&b.matrix, lambda))?;
        let rot_sampler = assemble_rot_sampler(vspace);
        Ok(PenaltySystem { a, rot_gram: b.matrix, circulations: b.circulations, coupling, rot_sampler, lambda, factor })
    }

    /// Drops the circulation part of `b`. Only meaningful for exercising the
    /// constraint: the resulting solution need not be a gradient when `N > 1`.
    pub fn without_circulations(mut self) -> Self {
        self.circulations.clear();
        self
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// `b(x, .)` as a coefficient vector.
    pub fn apply_b(&self, x: &[f64]) -> Vec<f64> {
        let mut y = self.rot_gram.mul_vec(x);
        for c in &self.circulations {
            let s = dot(c, x);
            for (yi, ci) in y.iter_mut().zip(c) {
                *yi += s * ci;
            }
        }
        y
    }

    /// `||rot x||_{L^2}`, summed pointwise.
    pub fn rot_norm(&self, x: &[f64]) -> f64 {
        self.rot_sampler.mul_vec(x).iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn circulation_values(&self, x: &[f64]) -> Vec<f64> {
        self.circulations.iter().map(|c| dot(c, x)).collect()
    }

    pub fn solve(&self, z: &[f64], cfg: &PenaltyConfig) -> Result<PenaltyOutcome, AlgorithmError> {
        cfg.validate()?;
        let n = self.a.n_rows();
        let woodbury = WoodburyFactor::new(&self.factor, self.lambda, &self.circulations)?;
        let data = self.coupling.mul_vec(z);
        let mut phi = match &cfg.initial {
            Some(p) if p.len() == n => p.clone(),
            Some(p) => {
                return Err(AlgorithmError::InvalidConfig(format!(
                    "initial iterate has length {}, expected {n}",
                    p.len()
                )))
            }
            None => vec![0.0; n],
        };
        let mut trace = IterationTrace::default();
        let mut theta = vec![0.0; n];
        for it in 0..cfg.max_iters {
            let bphi = self.apply_b(&phi);
            let rhs: Vec<f64> = data.iter().zip(&bphi).map(|(d, b)| d - b).collect();
            theta = woodbury.solve(&rhs)?;
            let eps = self.rot_norm(&theta) + self.circulation_values(&theta).iter().map(|c| c.abs()).sum::<f64>();
            if it > 1 && eps > trace.final_eps() {
                log::warn!("penalty residual increased at iteration {}: {:e} -> {:e}", it + 1, trace.final_eps(), eps);
            }
            log::debug!("iteration {}: eps = {:e}", it + 1, eps);
            trace.eps.push(eps);
            trace.iterations = it + 1;
            for (p, t) in phi.iter_mut().zip(&theta) {
                *p += self.lambda * t;
            }
            if eps < cfg.tol {
                trace.converged = true;
                break;
            }
        }
        if !trace.converged {
            return Err(AlgorithmError::NoConvergence { iterations: trace.iterations, eps: trace.final_eps() });
        }
        let kappa = self.circulation_values(&phi);
        Ok(PenaltyOutcome { theta, phi, kappa, trace })
    }
}
