//! Command-line driver: single solves and convergence studies from a config file.

use crate::algorithm::{verify_solution, AlgorithmError, Diagnostics, Discretization, SolutionBundle};
use crate::assembly::AssemblyError;
use crate::config::{ConfigError, LoadKind, RunConfig, StudyMode};
use crate::mesh::{classify_boundary, MeshError};
use crate::postproc::{
    bending_moments, error_norms, export_field, von_mises_stress, ErrorReport, ErrorRow, ExportFormat,
    PostprocError, ScalarField, SinSquared, VectorField,
};
use crate::solver::SolverError;
use crate::spaces::SpaceError;
use clap::Parser;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Parser)]
#[command(name = "c1free", version, about = "C1 plate solutions from C0 Lagrange elements")]
pub struct Cli {
    /// Run configuration file.
    #[arg(long)]
    pub config: PathBuf,
    /// `section.key=value`, applied after the file is read.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    #[arg(long, short)]
    pub verbose: bool,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Algorithm(#[from] AlgorithmError),
    #[error(transparent)]
    Postproc(#[from] PostprocError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Config,
    Mesh,
    Space,
    Assembly,
    Solver,
    Algorithm,
    Output,
}

impl Stage {
    pub fn exit_code(self) -> i32 {
        match self {
            Stage::Config => 2,
            Stage::Mesh => 3,
            Stage::Space => 4,
            Stage::Assembly => 5,
            Stage::Solver => 6,
            Stage::Algorithm => 7,
            Stage::Output => 8,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Stage::Config => "configuration",
            Stage::Mesh => "mesh",
            Stage::Space => "finite element spaces",
            Stage::Assembly => "assembly",
            Stage::Solver => "linear solver",
            Stage::Algorithm => "iterated penalty",
            Stage::Output => "post-processing",
        }
    }
}

fn algorithm_stage(e: &AlgorithmError) -> Stage {
    match e {
        AlgorithmError::Space(_) => Stage::Space,
        AlgorithmError::Assembly(_) => Stage::Assembly,
        AlgorithmError::Solver(_) => Stage::Solver,
        _ => Stage::Algorithm,
    }
}

impl CliError {
    pub fn stage(&self) -> Stage {
        match self {
            CliError::Config(_) => Stage::Config,
            CliError::Mesh(_) => Stage::Mesh,
            CliError::Algorithm(e) => algorithm_stage(e),
            CliError::Postproc(PostprocError::Mesh(_)) => Stage::Mesh,
            CliError::Postproc(PostprocError::Algorithm(e)) => algorithm_stage(e),
            CliError::Postproc(PostprocError::Assembly(_)) => Stage::Assembly,
            CliError::Postproc(_) => Stage::Output,
        }
    }
}

impl From<SpaceError> for CliError {
    fn from(e: SpaceError) -> Self {
        CliError::Algorithm(e.into())
    }
}

impl From<AssemblyError> for CliError {
    fn from(e: AssemblyError) -> Self {
        CliError::Algorithm(e.into())
    }
}

impl From<SolverError> for CliError {
    fn from(e: SolverError) -> Self {
        CliError::Algorithm(e.into())
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunSummary {
    pub report: Option<ErrorReport>,
    pub diagnostics: Vec<(usize, Diagnostics)>,
    pub written: Vec<PathBuf>,
}

struct LevelResult {
    level: usize,
    bundle: SolutionBundle,
    diagnostics: Diagnostics,
}

fn solve_level(cfg: &RunConfig, level: usize) -> Result<LevelResult, CliError> {
    let mesh = Arc::new(cfg.build_mesh(level)?);
    let partition = classify_boundary(&mesh, &cfg.boundary_rules(&mesh))?;
    let disc = Discretization::new(&mesh, cfg.degree, &partition)?;
    let system = disc.penalty_system(&cfg.form, cfg.penalty.lambda)?;
    let bundle = disc.solve(&system, &cfg.load_spec(), &cfg.penalty)?;
    let diagnostics = verify_solution(&bundle, &system);
    log::info!(
        "level {level}: {} scalar / {} vector dofs, {} iterations, rot norm {:e}",
        bundle.sspace.dim(),
        bundle.vspace.dim(),
        bundle.trace.iterations,
        diagnostics.rot_norm
    );
    Ok(LevelResult { level, bundle, diagnostics })
}

fn error_row(r: &LevelResult) -> ErrorRow {
    let e = error_norms(&r.bundle, &SinSquared);
    ErrorRow {
        level: r.level,
        h: r.bundle.sspace.mesh().h(),
        dim: r.bundle.sspace.dim(),
        vector_dim: r.bundle.vspace.dim(),
        l2: e.l2,
        h1: e.h1(),
        h2: e.h2(),
        iterations: r.bundle.trace.iterations,
    }
}

pub fn diagnostics_csv(rows: &[(usize, Diagnostics)], traces: &[Vec<f64>]) -> String {
    let mut s = String::from(
        "level,iterations,final_eps,rot_norm,max_circulation,gradient_mismatch,theta_l2,galerkin_residual,eps_trace\n",
    );
    for ((level, d), trace) in rows.iter().zip(traces) {
        let trace: Vec<String> = trace.iter().map(|e| format!("{e:.16e}")).collect();
        writeln!(
            s,
            "{level},{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}",
            d.iterations,
            d.final_eps,
            d.rot_norm,
            d.max_circulation(),
            d.gradient_mismatch,
            d.theta_l2,
            d.galerkin_residual,
            trace.join(";")
        )
        .expect("writing to a string");
    }
    s
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| PostprocError::Io(format!("{}: {e}", path.display())).into())
}

fn export_format(path: &Path) -> Result<ExportFormat, CliError> {
    ExportFormat::from_path(path).ok_or_else(|| {
        CliError::Postproc(PostprocError::Io(format!("{}: extension must be .csv or .vtk", path.display())))
    })
}

fn exports(cfg: &RunConfig, r: &LevelResult, out: &Path, written: &mut Vec<PathBuf>) -> Result<(), CliError> {
    let b = &r.bundle;
    if let Some(name) = &cfg.output.displacement {
        let p = out.join(name);
        export_field(&ScalarField { space: &b.sspace, coeffs: &b.w, name: "displacement" }, &p, export_format(&p)?)?;
        written.push(p);
    }
    if let Some(name) = &cfg.output.gradient {
        let p = out.join(name);
        export_field(&VectorField { space: &b.vspace, coeffs: &b.theta, name: "theta" }, &p, export_format(&p)?)?;
        written.push(p);
    }
    if cfg.output.moments.is_some() || cfg.output.von_mises.is_some() {
        let m = bending_moments(&b.theta, &b.vspace, &cfg.form)?;
        if let Some(name) = &cfg.output.moments {
            let p = out.join(name);
            export_field(&m, &p, export_format(&p)?)?;
            written.push(p);
        }
        if let Some(name) = &cfg.output.von_mises {
            let p = out.join(name);
            let vm = von_mises_stress(&m, cfg.output.height)?;
            export_field(&vm, &p, export_format(&p)?)?;
            written.push(p);
        }
    }
    Ok(())
}

/// Runs the configured solve or study and writes its outputs.
pub fn execute(cfg: &RunConfig) -> Result<RunSummary, CliError> {
    let out = &cfg.output.dir;
    std::fs::create_dir_all(out).map_err(|e| PostprocError::Io(format!("{}: {e}", out.display())))?;
    let mut summary = RunSummary::default();
    let results: Vec<LevelResult> = match &cfg.study {
        StudyMode::Single => vec![solve_level(cfg, cfg.level)?],
        StudyMode::Convergence { levels } if cfg.parallel => {
            use rayon::prelude::*;
            levels.par_iter().map(|&l| solve_level(cfg, l)).collect::<Result<_, _>>()?
        }
        StudyMode::Convergence { levels } => levels.iter().map(|&l| solve_level(cfg, l)).collect::<Result<_, _>>()?,
    };
    if cfg.load == LoadKind::Manufactured {
        let report = ErrorReport { degree: cfg.degree, rows: results.iter().map(error_row).collect() };
        let p = out.join(&cfg.output.report);
        write_file(&p, &report.to_csv())?;
        summary.written.push(p);
        summary.report = Some(report);
    }
    summary.diagnostics = results.iter().map(|r| (r.level, r.diagnostics.clone())).collect();
    let traces: Vec<Vec<f64>> = results.iter().map(|r| r.bundle.trace.eps.clone()).collect();
    let p = out.join(&cfg.output.diagnostics);
    write_file(&p, &diagnostics_csv(&summary.diagnostics, &traces))?;
    summary.written.push(p);
    if let Some(last) = results.last() {
        exports(cfg, last, out, &mut summary.written)?;
    }
    Ok(summary)
}

/// Parses `args`, runs, and returns the process exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { Stage::Config.exit_code() } else { 0 };
        }
    };
    let level = if cli.verbose { log::LevelFilter::Debug } else { log::LevelFilter::Info };
    let _ = env_logger::Builder::new().filter_level(level).parse_default_env().try_init();
    let result = RunConfig::load(&cli.config, &cli.overrides).map_err(CliError::from).and_then(|cfg| execute(&cfg));
    match result {
        Ok(summary) => {
            for p in &summary.written {
                log::info!("wrote {}", p.display());
            }
            0
        }
        Err(e) => {
            let stage = e.stage();
            eprintln!("c1free: {} failed: {e}", stage.name());
            stage.exit_code()
        }
    }
}
