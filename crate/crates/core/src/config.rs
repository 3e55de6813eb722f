//! Run configuration read from INI-style files.
//!
//! ```text
//! [mesh]
//! source = unit_square      # unit_square | lshape | criss_cross | file
//! level = 3
//!
//! [problem]
//! degree = 5
//! boundary = clamped
//! boundary.2 = free       # or simply `2 = free`
//! load = manufactured
//! study = convergence
//! levels = 1-5
//! ```

use crate::algorithm::PenaltyConfig;
use crate::assembly::{FormSpec, LoadSpec, Material};
use crate::mesh::{
    criss_cross_square, generate_lshape, generate_unit_square, read_mesh, refine_barycentric, refine_uniform,
    BoundaryClass, MeshError, Point, TriMesh,
};
use ini::Ini;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("cannot read config {path}: {reason}")]
    Read { path: String, reason: String },
    #[error("config syntax: {0}")]
    Syntax(String),
    #[error("unknown key [{section}] {key}")]
    UnknownKey { section: String, key: String },
    #[error("missing key [{section}] {key}")]
    MissingKey { section: String, key: String },
    #[error("invalid value for [{section}] {key} = {value:?}: {reason}")]
    InvalidValue { section: String, key: String, value: String, reason: String },
    #[error("override {0:?} is not of the form section.key=value")]
    BadOverride(String),
    #[error("file {0} does not exist")]
    MissingFile(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum MeshSource {
    UnitSquare,
    LShape,
    CrissCross,
    File(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoadKind {
    Uniform,
    Point,
    Manufactured,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StudyMode {
    Single,
    Convergence { levels: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub report: String,
    pub diagnostics: String,
    pub displacement: Option<String>,
    pub gradient: Option<String>,
    pub moments: Option<String>,
    pub von_mises: Option<String>,
    pub height: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mesh: MeshSource,
    pub level: usize,
    pub barycentric: bool,
    pub degree: usize,
    pub default_boundary: Option<BoundaryClass>,
    pub boundary: BTreeMap<i32, BoundaryClass>,
    pub form: FormSpec,
    pub load: LoadKind,
    pub load_value: f64,
    pub load_point: Point,
    pub penalty: PenaltyConfig,
    pub study: StudyMode,
    pub parallel: bool,
    pub output: OutputConfig,
}

const KEYS: &[(&str, &[&str])] = &[
    ("mesh", &["source", "level", "path", "barycentric"]),
    (
        "problem",
        &[
            "degree",
            "boundary",
            "form",
            "youngs_modulus",
            "poisson_ratio",
            "thickness",
            "load",
            "load_value",
            "load_x",
            "load_y",
            "study",
            "levels",
            "parallel",
        ],
    ),
    ("penalty", &["lambda", "tol", "max_iters"]),
    ("output", &["dir", "report", "diagnostics", "displacement", "gradient", "moments", "von_mises", "height"]),
];

struct Reader<'a> {
    ini: &'a Ini,
}

impl Reader<'_> {
    fn raw(&self, section: &str, key: &str) -> Option<&str> {
        self.ini.get_from(Some(section), key).map(str::trim).filter(|v| !v.is_empty())
    }

    fn invalid(section: &str, key: &str, value: &str, reason: impl ToString) -> ConfigError {
        ConfigError::InvalidValue {
            section: section.into(),
            key: key.into(),
            value: value.into(),
            reason: reason.to_string(),
        }
    }

    fn parse<T: std::str::FromStr>(&self, section: &str, key: &str, default: T) -> Result<T, ConfigError>
    where
        T::Err: std::fmt::Display,
    {
        match self.raw(section, key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|e| Self::invalid(section, key, v, e)),
        }
    }

    fn required<T: std::str::FromStr>(&self, section: &str, key: &str) -> Result<T, ConfigError>
    where
        T::Err: std::fmt::Display,
    {
        let v = self
            .raw(section, key)
            .ok_or_else(|| ConfigError::MissingKey { section: section.into(), key: key.into() })?;
        v.parse().map_err(|e| Self::invalid(section, key, v, e))
    }
}

/// `"1-5"` or `"1,2,4"`.
pub fn parse_levels(s: &str) -> Option<Vec<usize>> {
    if let Some((a, b)) = s.split_once('-') {
        let (a, b): (usize, usize) = (a.trim().parse().ok()?, b.trim().parse().ok()?);
        return (a <= b).then(|| (a..=b).collect());
    }
    s.split(',').map(|x| x.trim().parse().ok()).collect()
}

fn check_keys(ini: &Ini) -> Result<(), ConfigError> {
    for (section, props) in ini.iter() {
        let name = section.unwrap_or("");
        let allowed = KEYS.iter().find(|(s, _)| *s == name).map(|(_, k)| *k);
        for (key, _) in props.iter() {
            let ok = match allowed {
                Some(keys) => keys.contains(&key) || (name == "problem" && boundary_label(key).is_some()),
                None => false,
            };
            if !ok {
                return Err(ConfigError::UnknownKey { section: name.into(), key: key.into() });
            }
        }
    }
    Ok(())
}

/// Label part of a boundary rule key: `boundary.<label>` or a bare `<label>`.
fn boundary_label(key: &str) -> Option<&str> {
    let label = key.strip_prefix("boundary.").unwrap_or(key);
    let digits = label.strip_prefix('-').unwrap_or(label);
    (!digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()) || key.starts_with("boundary.")).then_some(label)
}

/// Applies `section.key=value` overrides.
pub fn apply_overrides(ini: &mut Ini, overrides: &[String]) -> Result<(), ConfigError> {
    for o in overrides {
        let (lhs, value) = o.split_once('=').ok_or_else(|| ConfigError::BadOverride(o.clone()))?;
        let (section, key) = lhs.trim().split_once('.').ok_or_else(|| ConfigError::BadOverride(o.clone()))?;
        ini.with_section(Some(section)).set(key, value.trim());
    }
    Ok(())
}

impl RunConfig {
    pub fn from_str_with(text: &str, base: &Path, overrides: &[String]) -> Result<Self, ConfigError> {
        let mut ini = Ini::load_from_str_noescape(text).map_err(|e| ConfigError::Syntax(e.to_string()))?;
        apply_overrides(&mut ini, overrides)?;
        check_keys(&ini)?;
        Self::from_ini(&ini, base)
    }

    pub fn load(path: &Path, overrides: &[String]) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Read { path: path.display().to_string(), reason: e.to_string() })?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_str_with(&text, base, overrides)
    }

    fn from_ini(ini: &Ini, base: &Path) -> Result<Self, ConfigError> {
        let r = Reader { ini };
        let source: String = r.parse("mesh", "source", "unit_square".to_string())?;
        let mesh = match source.as_str() {
            "unit_square" => MeshSource::UnitSquare,
            "lshape" => MeshSource::LShape,
            "criss_cross" => MeshSource::CrissCross,
            "file" => {
                let p: String = r.required("mesh", "path")?;
                let full = base.join(&p);
                if !full.is_file() {
                    return Err(ConfigError::MissingFile(full.display().to_string()));
                }
                MeshSource::File(full)
            }
            other => return Err(Reader::invalid("mesh", "source", other, "unknown mesh source")),
        };
        let level = r.parse("mesh", "level", 1usize)?;
        let barycentric = r.parse("mesh", "barycentric", false)?;

        let degree = r.parse("problem", "degree", 5usize)?;
        let default_boundary = match r.raw("problem", "boundary") {
            None => None,
            Some(v) => Some(v.parse::<BoundaryClass>().map_err(|e| Reader::invalid("problem", "boundary", v, e))?),
        };
        let mut boundary = BTreeMap::new();
        if let Some(props) = ini.section(Some("problem")) {
            for (k, v) in props.iter() {
                if let Some(label) = boundary_label(k) {
                    let l: i32 = label.parse().map_err(|e| Reader::invalid("problem", k, v, e))?;
                    let c: BoundaryClass = v.trim().parse().map_err(|e| Reader::invalid("problem", k, v, e))?;
                    boundary.insert(l, c);
                }
            }
        }
        let form_name: String = r.parse("problem", "form", "biharmonic".to_string())?;
        let form = match form_name.as_str() {
            "biharmonic" => FormSpec::Biharmonic,
            "kirchhoff" => {
                let m = Material {
                    youngs_modulus: r.required("problem", "youngs_modulus")?,
                    poisson_ratio: r.required("problem", "poisson_ratio")?,
                    thickness: r.required("problem", "thickness")?,
                };
                m.validate().map_err(|e| Reader::invalid("problem", "form", "kirchhoff", e))?;
                FormSpec::Kirchhoff(m)
            }
            other => return Err(Reader::invalid("problem", "form", other, "expected biharmonic or kirchhoff")),
        };
        let load_name: String = r.parse("problem", "load", "uniform".to_string())?;
        let load = match load_name.as_str() {
            "uniform" => LoadKind::Uniform,
            "point" => LoadKind::Point,
            "manufactured" => LoadKind::Manufactured,
            other => return Err(Reader::invalid("problem", "load", other, "expected uniform, point or manufactured")),
        };
        let load_value = r.parse("problem", "load_value", 1.0)?;
        let load_point = if load == LoadKind::Point {
            [r.required("problem", "load_x")?, r.required("problem", "load_y")?]
        } else {
            [r.parse("problem", "load_x", 0.0)?, r.parse("problem", "load_y", 0.0)?]
        };
        let study_name: String = r.parse("problem", "study", "single".to_string())?;
        let study = match study_name.as_str() {
            "single" => StudyMode::Single,
            "convergence" => {
                let raw: String = r.required("problem", "levels")?;
                let levels = parse_levels(&raw)
                    .filter(|l| !l.is_empty() && l.iter().all(|&x| x >= 1))
                    .ok_or_else(|| Reader::invalid("problem", "levels", &raw, "expected a-b or a,b,c with levels >= 1"))?;
                if load != LoadKind::Manufactured {
                    return Err(Reader::invalid("problem", "load", &load_name, "a convergence study needs load = manufactured"));
                }
                StudyMode::Convergence { levels }
            }
            other => return Err(Reader::invalid("problem", "study", other, "expected single or convergence")),
        };
        let parallel = r.parse("problem", "parallel", false)?;

        let defaults = PenaltyConfig::default();
        let penalty = PenaltyConfig {
            lambda: r.parse("penalty", "lambda", defaults.lambda)?,
            tol: r.parse("penalty", "tol", defaults.tol)?,
            max_iters: r.parse("penalty", "max_iters", defaults.max_iters)?,
            initial: None,
        };
        penalty.validate().map_err(|e| Reader::invalid("penalty", "lambda", "", e))?;

        let opt = |k: &str| r.raw("output", k).map(String::from);
        let output = OutputConfig {
            dir: PathBuf::from(r.parse("output", "dir", ".".to_string())?),
            report: r.parse("output", "report", "report.csv".to_string())?,
            diagnostics: r.parse("output", "diagnostics", "diagnostics.csv".to_string())?,
            displacement: opt("displacement"),
            gradient: opt("gradient"),
            moments: opt("moments"),
            von_mises: opt("von_mises"),
            height: match r.raw("output", "height") {
                None => None,
                Some(v) => Some(v.parse().map_err(|e| Reader::invalid("output", "height", v, e))?),
            },
        };
        Ok(RunConfig {
            mesh,
            level,
            barycentric,
            degree,
            default_boundary,
            boundary,
            form,
            load,
            load_value,
            load_point,
            penalty,
            study,
            parallel,
            output,
        })
    }

    /// Mesh at refinement `level` of the configured source.
    pub fn build_mesh(&self, level: usize) -> Result<TriMesh, MeshError> {
        let mut m = match &self.mesh {
            MeshSource::UnitSquare => generate_unit_square(level.max(1)),
            MeshSource::LShape => generate_lshape(level),
            MeshSource::CrissCross => {
                let mut m = criss_cross_square([0.5, 0.5]);
                for _ in 1..level.max(1) {
                    m = refine_uniform(&m);
                }
                m
            }
            MeshSource::File(p) => {
                let mut m = read_mesh(p)?;
                for _ in 1..level.max(1) {
                    m = refine_uniform(&m);
                }
                m
            }
        };
        if self.barycentric {
            m = refine_barycentric(&m);
        }
        Ok(m)
    }

    /// Label rules for `mesh`: explicit labels, then the default class.
    pub fn boundary_rules(&self, mesh: &TriMesh) -> BTreeMap<i32, BoundaryClass> {
        let mut rules = self.boundary.clone();
        if let Some(d) = self.default_boundary {
            for seg in mesh.boundary_cycle() {
                rules.entry(seg.label).or_insert(d);
            }
        }
        rules
    }

    pub fn load_spec(&self) -> LoadSpec {
        match self.load {
            LoadKind::Uniform => LoadSpec::Uniform(self.load_value),
            LoadKind::Point => LoadSpec::PointLoad { at: self.load_point, magnitude: self.load_value },
            LoadKind::Manufactured => crate::postproc::manufactured_load(
                std::sync::Arc::new(crate::postproc::SinSquared),
                &self.form,
            ),
        }
    }
}
