use std::fs;
use std::path::{Path, PathBuf};

use anosov_core::automaton::{builtin_f2_abc, builtin_f2_standard, GraphJson, LabeledGraph};
use anosov_core::pants::{holonomy, shear_family, FGParams};
use anosov_core::rep::{Representation, RepresentationJson};
use anosov_core::weyl::{Functional, FunctionalSpec};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::{Builtin, Cli, CliError, Command, Format, SourceArgs};

pub const DEFAULT_EPSILON: f64 = 0.1;
pub const DEFAULT_DEPTH: usize = 2;
pub const DEFAULT_MAX_LEN: usize = 8;
pub const DEFAULT_PERIODIC_N: usize = 6;
pub const DEFAULT_SAMPLES: usize = 1000;
pub const DEFAULT_CODING_DEPTH: usize = 6;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    #[default]
    Pressure,
    PantsExponent,
    Sweep,
    Certify,
    Thurston,
    ValidateCoding,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Coding {
    Abc,
    Standard,
}

impl Coding {
    pub fn graph(self) -> LabeledGraph {
        match self {
            Self::Abc => builtin_f2_abc(),
            Self::Standard => builtin_f2_standard(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Fixed,
    Shear,
}

/// `{"X": [..], "Z": [..], "W": [..]}`, optionally with `"mode": "shear", "t": ..`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    #[serde(flatten)]
    pub params: FGParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
}

impl FamilySpec {
    pub fn fixed(params: FGParams) -> Self {
        Self {
            params,
            mode: None,
            t: None,
        }
    }

    pub fn shear(t: f64, base: FGParams) -> Self {
        Self {
            params: base,
            mode: Some(Mode::Shear),
            t: Some(t),
        }
    }

    pub fn resolve(&self) -> Result<FGParams, CliError> {
        self.params.validate()?;
        match self.mode {
            Some(Mode::Shear) => {
                let t = self
                    .t
                    .filter(|t| t.is_finite())
                    .ok_or_else(|| CliError::input("shear mode needs a finite `t`"))?;
                Ok(shear_family(t, &self.params))
            }
            _ => Ok(self.params),
        }
    }
}

/// `steps` equally spaced points from `t0` to `t1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub t0: f64,
    pub t1: f64,
    pub steps: usize,
}

impl Default for Grid {
    fn default() -> Self {
        Self {
            t0: 2.0,
            t1: 8.0,
            steps: 7,
        }
    }
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        match self.steps {
            0 => Vec::new(),
            1 => vec![self.t0],
            n => (0..n)
                .map(|i| self.t0 + (self.t1 - self.t0) * i as f64 / (n - 1) as f64)
                .collect(),
        }
    }
}

/// Merged run configuration: a JSON file given by `--config`, overridden by flags.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: CommandKind,
    pub graph: Option<PathBuf>,
    pub coding: Option<Coding>,
    pub representation: Option<PathBuf>,
    pub weights: Option<PathBuf>,
    pub params: Option<FamilySpec>,
    pub compare: Option<FamilySpec>,
    /// Triple ratios of the second slice in a sweep.
    pub compare_x: Option<[f64; 2]>,
    pub phi: Option<String>,
    pub epsilon: Option<f64>,
    pub grid: Option<Grid>,
    /// Element budget of the brute-force column; the column is skipped without it.
    pub budget: Option<usize>,
    /// Threshold of the brute-force count; chosen from the budget if absent.
    pub t_max: Option<f64>,
    pub block_budget: Option<usize>,
    pub depth: Option<usize>,
    pub max_len: Option<usize>,
    pub periodic_n: Option<usize>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn rebase(dir: &Path, p: &mut Option<PathBuf>) {
    if let Some(path) = p {
        if path.is_relative() {
            *path = dir.join(&*path);
        }
    }
}

fn apply_source(cfg: &mut RunConfig, s: &SourceArgs) -> Result<(), CliError> {
    if s.graph.is_some() {
        cfg.graph = s.graph.clone();
    }
    if let Some(b) = s.builtin {
        cfg.graph = None;
        cfg.coding = Some(match b {
            Builtin::Abc => Coding::Abc,
            Builtin::Standard => Coding::Standard,
        });
    }
    if s.representation.is_some() {
        cfg.representation = s.representation.clone();
        cfg.params = None;
    }
    if let Some(p) = &s.params {
        cfg.params = Some(read_json(p)?);
        cfg.representation = None;
    }
    Ok(())
}

impl RunConfig {
    pub fn load(cli: &Cli) -> Result<Self, CliError> {
        let mut cfg = match &cli.common.config {
            Some(path) => {
                let mut c: Self = read_json(path)?;
                let dir = path.parent().unwrap_or(Path::new("."));
                for p in [&mut c.graph, &mut c.representation, &mut c.weights, &mut c.out] {
                    rebase(dir, p);
                }
                c
            }
            None => Self::default(),
        };
        let c = &cli.common;
        cfg.out = c.out.clone().or(cfg.out);
        cfg.format = c.format.or(cfg.format);
        cfg.epsilon = c.epsilon.or(cfg.epsilon);
        cfg.phi = c.phi.clone().or(cfg.phi);
        cfg.budget = c.budget.or(cfg.budget);
        cfg.seed = c.seed.or(cfg.seed);
        match &cli.command {
            Command::Pressure { source, weights } => {
                cfg.command = CommandKind::Pressure;
                apply_source(&mut cfg, source)?;
                cfg.weights = weights.clone().or(cfg.weights);
            }
            Command::PantsExponent { params, depth } => {
                cfg.command = CommandKind::PantsExponent;
                if let Some(p) = params {
                    cfg.params = Some(read_json(p)?);
                }
                cfg.depth = depth.or(cfg.depth);
            }
            Command::Sweep {
                params,
                t0,
                t1,
                steps,
                compare_x,
            } => {
                cfg.command = CommandKind::Sweep;
                if let Some(p) = params {
                    cfg.params = Some(read_json(p)?);
                }
                let mut grid = cfg.grid.unwrap_or_default();
                grid.t0 = t0.unwrap_or(grid.t0);
                grid.t1 = t1.unwrap_or(grid.t1);
                grid.steps = steps.unwrap_or(grid.steps);
                cfg.grid = Some(grid);
                if let Some(x) = compare_x {
                    let [a, b] = x[..] else {
                        return Err(CliError::input("--compare-x takes two values `X1,X2`"));
                    };
                    cfg.compare_x = Some([a, b]);
                }
            }
            Command::Certify { source, samples } => {
                cfg.command = CommandKind::Certify;
                apply_source(&mut cfg, source)?;
                cfg.samples = samples.or(cfg.samples);
            }
            Command::Thurston {
                params,
                compare,
                max_len,
                depth,
            } => {
                cfg.command = CommandKind::Thurston;
                if let Some(p) = params {
                    cfg.params = Some(read_json(p)?);
                }
                if let Some(p) = compare {
                    cfg.compare = Some(read_json(p)?);
                }
                cfg.max_len = max_len.or(cfg.max_len);
                cfg.depth = depth.or(cfg.depth);
            }
            Command::ValidateCoding { source, depth } => {
                cfg.command = CommandKind::ValidateCoding;
                apply_source(&mut cfg, source)?;
                cfg.depth = depth.or(cfg.depth);
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let eps = self.epsilon();
        if !(eps > 0.0 && eps <= std::f64::consts::FRAC_PI_2) {
            return Err(CliError::input(format!("epsilon must lie in (0, pi/2], got {eps}")));
        }
        for (name, v) in [
            ("budget", self.budget),
            ("block_budget", self.block_budget),
            ("depth", self.depth),
            ("max_len", self.max_len),
            ("periodic_n", self.periodic_n),
            ("samples", self.samples),
        ] {
            if v == Some(0) {
                return Err(CliError::input(format!("{name} must be positive")));
            }
        }
        if let Some(t) = self.t_max {
            if !(t > 0.0 && t.is_finite()) {
                return Err(CliError::input(format!("t_max must be positive, got {t}")));
            }
        }
        if let Some(g) = &self.grid {
            if !(g.t0.is_finite() && g.t1.is_finite()) {
                return Err(CliError::input("grid endpoints must be finite"));
            }
        }
        Ok(())
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon.unwrap_or(DEFAULT_EPSILON)
    }

    pub fn depth(&self) -> usize {
        self.depth.unwrap_or(DEFAULT_DEPTH)
    }

    pub fn block_budget(&self) -> usize {
        self.block_budget.unwrap_or(anosov_core::BLOCK_BUDGET)
    }

    pub fn format(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }

    /// The functional, defaulting to the sum of the simple roots.
    pub fn functional(&self, n: usize) -> Result<Functional, CliError> {
        let spec = match &self.phi {
            Some(s) => FunctionalSpec::parse(s).map_err(CliError::input)?,
            None if n == 2 => FunctionalSpec::parse("roots:1").map_err(CliError::input)?,
            None => FunctionalSpec::parse("roots:1,1").map_err(CliError::input)?,
        };
        Ok(spec.resolve(n)?)
    }

    /// The coding: a graph file, else the named builtin, else `abc` for pants
    /// parameters and `standard` otherwise.
    pub fn graph(&self) -> Result<LabeledGraph, CliError> {
        if let Some(path) = &self.graph {
            let j: GraphJson = read_json(path)?;
            return Ok(LabeledGraph::from_json(&j)?);
        }
        let coding = self.coding.unwrap_or(if self.params.is_some() {
            Coding::Abc
        } else {
            Coding::Standard
        });
        Ok(coding.graph())
    }

    pub fn pants_params(&self) -> Result<FGParams, CliError> {
        self.params
            .as_ref()
            .ok_or_else(|| CliError::input("no pair-of-pants parameters given"))?
            .resolve()
    }

    /// The representation from a file, or the holonomy of the pants parameters.
    pub fn representation(&self) -> Result<Representation, CliError> {
        if let Some(path) = &self.representation {
            let j: RepresentationJson = read_json(path)?;
            return Ok(Representation::from_json(&j)?);
        }
        if self.params.is_some() {
            return Ok(holonomy(&self.pants_params()?)?.rep);
        }
        Err(CliError::input("no representation or pair-of-pants parameters given"))
    }
}
