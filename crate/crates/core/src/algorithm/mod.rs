//! The three-step method: a scalar `H^1` projection of the data, an iterated
//! penalty Stokes-like solve on the vector space, and a scalar `H^1`
//! projection of the resulting gradient. Dense oracles for small meshes
//! live in [`oracle`].

pub mod oracle;
mod penalty;

pub use oracle::{
    estimate_inf_sup, oracle_c1_solve, verify_exact_sequence, ExactSequenceReport, OracleSolution,
    ORACLE_MAX_DOFS,
};
pub use penalty::{IterationTrace, PenaltyOutcome, PenaltySystem};

use crate::assembly::{
    assemble_coupling, assemble_grad_grad, assemble_load, quadrature_rule, scalar_on_element,
    vector_on_element, AssemblyError, FormSpec, LoadSpec,
};
use crate::mesh::{BoundaryPartition, TriMesh};
use crate::solver::{factorize_spd, CholeskyFactor, CsrMatrix, SolverError};
use crate::spaces::{
    build_scalar_space_with_max, build_vector_space_with_max, ScalarSpace, SpaceError, VectorSpace,
    DEFAULT_MAX_DEGREE,
};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgorithmError {
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Assembly(#[from] AssemblyError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("iterated penalty did not converge in {iterations} iterations (final eps {eps:e}); try a larger penalty parameter")]
    NoConvergence { iterations: usize, eps: f64 },
    #[error("{dofs} degrees of freedom exceed the dense oracle limit of {limit}")]
    TooLargeForOracle { dofs: usize, limit: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PenaltyConfig {
    pub lambda: f64,
    pub tol: f64,
    pub max_iters: usize,
    /// Starting multiplier potential; zero when absent.
    pub initial: Option<Vec<f64>>,
}

impl Default for PenaltyConfig {
    fn default() -> Self {
        PenaltyConfig { lambda: 1e3, tol: 1e-10, max_iters: 100, initial: None }
    }
}

impl PenaltyConfig {
    pub fn validate(&self) -> Result<(), AlgorithmError> {
        if !(self.lambda > 0.0) || !(self.tol > 0.0) {
            return Err(AlgorithmError::InvalidConfig(format!(
                "lambda ({}) and tol ({}) must be positive",
                self.lambda, self.tol
            )));
        }
        Ok(())
    }
}

/// Spaces and the factored scalar stiffness shared by the pre- and post-processing steps.
#[derive(Debug, Clone)]
pub struct Discretization {
    pub sspace: ScalarSpace,
    pub vspace: VectorSpace,
    pub partition: BoundaryPartition,
    pub grad_grad: CsrMatrix,
    pub grad_factor: CholeskyFactor,
    pub coupling: CsrMatrix,
}

impl Discretization {
    pub fn new(mesh: &Arc<TriMesh>, p: usize, partition: &BoundaryPartition) -> Result<Self, AlgorithmError> {
        Self::with_max_degree(mesh, p, partition, DEFAULT_MAX_DEGREE)
    }

    pub fn with_max_degree(
        mesh: &Arc<TriMesh>,
        p: usize,
        partition: &BoundaryPartition,
        max_degree: usize,
    ) -> Result<Self, AlgorithmError> {
        if p < 2 {
            return Err(SpaceError::UnsupportedDegree { degree: p, min: 2, max: max_degree }.into());
        }
        let sspace = build_scalar_space_with_max(mesh, p, partition, max_degree)?;
        let vspace = build_vector_space_with_max(mesh, p - 1, partition, max_degree - 1)?;
        let grad_grad = assemble_grad_grad(&sspace).matrix;
        let grad_factor = factorize_spd(&grad_grad)?;
        let coupling = assemble_coupling(&vspace, &sspace)?;
        Ok(Discretization { sspace, vspace, partition: partition.clone(), grad_grad, grad_factor, coupling })
    }

    pub fn degree(&self) -> usize {
        self.sspace.degree()
    }

    pub fn penalty_system(&self, form: &FormSpec, lambda: f64) -> Result<PenaltySystem, AlgorithmError> {
        PenaltySystem::with_coupling(&self.vspace, form, &self.partition, lambda, self.coupling.clone())
    }

    /// Step 1: `(grad z, grad v) = F(v)`.
    pub fn preprocess(&self, load: &LoadSpec) -> Result<Vec<f64>, AlgorithmError> {
        let f = assemble_load(&self.sspace, load)?;
        Ok(self.grad_factor.solve(&f)?)
    }

    /// Step 3: `(grad w, grad v) = (theta, grad v)`.
    pub fn postprocess(&self, theta: &[f64]) -> Result<Vec<f64>, AlgorithmError> {
        let rhs = self.coupling.tr_mul_vec(theta);
        Ok(self.grad_factor.solve(&rhs)?)
    }

    /// All three steps with the given penalty system.
    pub fn solve(
        &self,
        system: &PenaltySystem,
        load: &LoadSpec,
        cfg: &PenaltyConfig,
    ) -> Result<SolutionBundle, AlgorithmError> {
        let z = self.preprocess(load)?;
        let out = system.solve(&z, cfg)?;
        let w = self.postprocess(&out.theta)?;
        Ok(SolutionBundle {
            sspace: self.sspace.clone(),
            vspace: self.vspace.clone(),
            z,
            theta: out.theta,
            w,
            phi: out.phi,
            kappa: out.kappa,
            trace: out.trace,
        })
    }
}

/// Output of the three steps together with the spaces the coefficients refer to.
#[derive(Debug, Clone)]
pub struct SolutionBundle {
    pub sspace: ScalarSpace,
    pub vspace: VectorSpace,
    /// Pre-processed data, scalar space.
    pub z: Vec<f64>,
    /// Discrete gradient, vector space.
    pub theta: Vec<f64>,
    /// Displacement, scalar space.
    pub w: Vec<f64>,
    /// Multiplier potential: `r_X = rot phi`.
    pub phi: Vec<f64>,
    pub kappa: Vec<f64>,
    pub trace: IterationTrace,
}

impl SolutionBundle {
    /// Multiplier field `r_X = rot phi` on triangle `t` at reference point `xi`.
    pub fn multiplier_at(&self, t: usize, xi: [f64; 2]) -> f64 {
        let s = vector_on_element(&self.vspace, t, &self.phi, xi);
        s.grad[1][0] - s.grad[0][1]
    }
}

pub fn preprocess_data(sspace: &ScalarSpace, load: &LoadSpec) -> Result<Vec<f64>, AlgorithmError> {
    let k = assemble_grad_grad(sspace).matrix;
    let f = assemble_load(sspace, load)?;
    Ok(factorize_spd(&k)?.solve(&f)?)
}

pub fn iterated_penalty_solve(
    vspace: &VectorSpace,
    sspace: &ScalarSpace,
    form: &FormSpec,
    partition: &BoundaryPartition,
    z: &[f64],
    cfg: &PenaltyConfig,
) -> Result<PenaltyOutcome, AlgorithmError> {
    PenaltySystem::new(vspace, sspace, form, partition, cfg.lambda)?.solve(z, cfg)
}

pub fn postprocess_gradient(
    sspace: &ScalarSpace,
    vspace: &VectorSpace,
    theta: &[f64],
) -> Result<Vec<f64>, AlgorithmError> {
    let k = assemble_grad_grad(sspace).matrix;
    let c = assemble_coupling(vspace, sspace)?;
    Ok(factorize_spd(&k)?.solve(&c.tr_mul_vec(theta))?)
}

pub fn run_algorithm1(
    mesh: &Arc<TriMesh>,
    p: usize,
    partition: &BoundaryPartition,
    form: &FormSpec,
    load: &LoadSpec,
    cfg: &PenaltyConfig,
) -> Result<SolutionBundle, AlgorithmError> {
    cfg.validate()?;
    let disc = Discretization::new(mesh, p, partition)?;
    let system = disc.penalty_system(form, cfg.lambda)?;
    disc.solve(&system, load, cfg)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    pub rot_norm: f64,
    pub circulations: Vec<f64>,
    /// `||grad w - theta||_{L^2}`.
    pub gradient_mismatch: f64,
    pub theta_l2: f64,
    /// `||A theta + B phi - C z|| / max(||C z||, tiny)`.
    pub galerkin_residual: f64,
    pub iterations: usize,
    pub final_eps: f64,
}

impl Diagnostics {
    pub fn max_circulation(&self) -> f64 {
        self.circulations.iter().fold(0.0, |m, c| m.max(c.abs()))
    }
}

fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// `||grad w - theta||_{L^2}` and `||theta||_{L^2}` by quadrature.
pub fn gradient_mismatch(sspace: &ScalarSpace, vspace: &VectorSpace, w: &[f64], theta: &[f64]) -> (f64, f64) {
    let mesh = sspace.mesh();
    let rule = quadrature_rule((2 * sspace.degree()).min(20)).expect("degree in range");
    let (mut diff, mut norm) = (0.0, 0.0);
    for t in 0..mesh.num_triangles() {
        let area = mesh.area(t);
        for (x, wq) in rule.points.iter().zip(&rule.weights) {
            let g = scalar_on_element(sspace, t, w, *x).grad;
            let th = vector_on_element(vspace, t, theta, *x).value;
            diff += area * wq * ((g[0] - th[0]).powi(2) + (g[1] - th[1]).powi(2));
            norm += area * wq * (th[0] * th[0] + th[1] * th[1]);
        }
    }
    (diff.sqrt(), norm.sqrt())
}

/// Identities expected of a converged solution, plus the Galerkin residual
/// of the Stokes-like system.
pub fn verify_solution(bundle: &SolutionBundle, system: &PenaltySystem) -> Diagnostics {
    let th = &bundle.theta;
    let (gradient_mismatch, theta_l2) = gradient_mismatch(&bundle.sspace, &bundle.vspace, &bundle.w, th);
    let data = system.coupling.mul_vec(&bundle.z);
    let at = system.a.mul_vec(th);
    let bphi = system.apply_b(&bundle.phi);
    let res: Vec<f64> = at.iter().zip(&bphi).zip(&data).map(|((a, b), d)| a + b - d).collect();
    let scale = l2(&data).max(f64::MIN_POSITIVE);
    Diagnostics {
        rot_norm: system.rot_norm(th),
        circulations: system.circulation_values(th),
        gradient_mismatch,
        theta_l2,
        galerkin_residual: if l2(&data) == 0.0 { l2(&res) } else { l2(&res) / scale },
        iterations: bundle.trace.iterations,
        final_eps: bundle.trace.final_eps(),
    }
}
