//! Run configuration: a TOML file with `[scheme]`, `[game]`, `[evolution]`,
//! `[solver]`, `[montecarlo]`, `[sweep]` and `[output]` sections.
//!
//! ```toml
//! [scheme]
//! kind = ["peer_punishment", "peer_reward"]   # or a single name
//! epsilon = 1.0
//! delta = 2.0
//!
//! [game]            # optional, defaults to R=1, S=-1, T=2, P=0
//! R = 1.0
//! S = -1.0
//! T = 2.0
//! P = 0.0
//!
//! [evolution]
//! N = 50
//! mu = 0.01
//! beta = 0.1
//!
//! [solver]          # optional
//! method = "exact"  # or "montecarlo"
//! algorithm = "direct"  # or "power"
//! tol = 1e-12
//! max_iter = 1000000
//!
//! [montecarlo]      # used when method = "montecarlo"
//! steps = 10000000
//! burn_in = 50000   # default 1000 N
//! stride = 50       # default N
//! seed = 1
//! batches = 20
//!
//! [[sweep.axis]]    # at most two; the first is the outer loop
//! name = "beta"
//! values = [0.01, 0.1, 1.0]
//!
//! [[sweep.axis]]
//! name = "delta"
//! start = 0.5
//! stop = 4.0
//! step = 0.5
//!
//! [output]
//! path = "sweep.csv"
//! ```
//!
//! Unknown keys anywhere are rejected.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use welfare_core::engine::{SolverMethod, SolverOptions};
use welfare_core::simulate::{SimConfig, MIN_BATCHES};
use welfare_core::{EvolutionParams, IncentiveScheme, ModelSpec, PdPayoffs};

use crate::error::{CliError, Result};

/// Names that may appear as sweep axes.
pub const PARAMETERS: [&str; 11] = [
    "N", "mu", "beta", "R", "S", "T", "P", "epsilon", "delta", "a", "b",
];

/// Upper bound on the number of grid points in one sweep.
const MAX_POINTS: usize = 1_000_000;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    scheme: SchemeSection,
    #[serde(default)]
    game: GameSection,
    evolution: EvolutionSection,
    #[serde(default)]
    solver: SolverSection,
    montecarlo: Option<MonteCarloSection>,
    #[serde(default)]
    sweep: SweepSection,
    #[serde(default)]
    output: OutputSection,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(String),
    Many(Vec<String>),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SchemeSection {
    kind: OneOrMany,
    epsilon: Option<f64>,
    delta: Option<f64>,
    a: Option<f64>,
    b: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GameSection {
    #[serde(rename = "R")]
    r: f64,
    #[serde(rename = "S")]
    s: f64,
    #[serde(rename = "T")]
    t: f64,
    #[serde(rename = "P")]
    p: f64,
}

impl Default for GameSection {
    fn default() -> Self {
        let pd = PdPayoffs::standard();
        Self {
            r: pd.r,
            s: pd.s,
            t: pd.t,
            p: pd.p,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct EvolutionSection {
    #[serde(rename = "N")]
    n: usize,
    mu: f64,
    beta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodKind {
    #[default]
    Exact,
    Montecarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Algorithm {
    #[default]
    Direct,
    Power,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SolverSection {
    #[serde(default)]
    method: MethodKind,
    #[serde(default)]
    algorithm: Algorithm,
    tol: Option<f64>,
    max_iter: Option<usize>,
}

impl Default for SolverSection {
    fn default() -> Self {
        Self {
            method: MethodKind::Exact,
            algorithm: Algorithm::Direct,
            tol: None,
            max_iter: None,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MonteCarloSection {
    steps: u64,
    burn_in: Option<u64>,
    stride: Option<u64>,
    #[serde(default)]
    seed: u64,
    batches: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepSection {
    #[serde(default)]
    axis: Vec<AxisSection>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AxisSection {
    name: String,
    start: Option<f64>,
    stop: Option<f64>,
    step: Option<f64>,
    values: Option<Vec<f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct OutputSection {
    path: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeKind {
    None,
    PeerPunishment,
    PeerReward,
    InstitutionalReward,
    InstitutionalPunishment,
}

impl SchemeKind {
    const ALL: [SchemeKind; 5] = [
        Self::None,
        Self::PeerPunishment,
        Self::PeerReward,
        Self::InstitutionalReward,
        Self::InstitutionalPunishment,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::None => "none",
            Self::PeerPunishment => "peer_punishment",
            Self::PeerReward => "peer_reward",
            Self::InstitutionalReward => "institutional_reward",
            Self::InstitutionalPunishment => "institutional_punishment",
        }
    }

    fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Self::ALL.iter().map(|k| k.name()).collect();
                CliError::Config(format!(
                    "scheme.kind: unknown scheme '{s}' (expected one of {})",
                    names.join(", ")
                ))
            })
    }

    /// Scheme-specific parameters this kind takes.
    pub fn parameters(self) -> &'static [&'static str] {
        match self {
            Self::None => &[],
            Self::PeerPunishment | Self::PeerReward => &["epsilon", "delta"],
            Self::InstitutionalReward => &["delta", "a"],
            Self::InstitutionalPunishment => &["delta", "b"],
        }
    }

    fn is_scheme_parameter(name: &str) -> bool {
        matches!(name, "epsilon" | "delta" | "a" | "b")
    }
}

/// Parameter values for one grid point before the scheme is assembled.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Values {
    n: f64,
    mu: f64,
    beta: f64,
    r: f64,
    s: f64,
    t: f64,
    p: f64,
    epsilon: Option<f64>,
    delta: Option<f64>,
    a: Option<f64>,
    b: Option<f64>,
}

impl Values {
    fn set(&mut self, name: &str, v: f64) {
        match name {
            "N" => self.n = v,
            "mu" => self.mu = v,
            "beta" => self.beta = v,
            "R" => self.r = v,
            "S" => self.s = v,
            "T" => self.t = v,
            "P" => self.p = v,
            "epsilon" => self.epsilon = Some(v),
            "delta" => self.delta = Some(v),
            "a" => self.a = Some(v),
            "b" => self.b = Some(v),
            _ => unreachable!("axis names are checked on load"),
        }
    }

    fn point(&self, kind: SchemeKind) -> Result<Point> {
        let need = |name: &str, v: Option<f64>| {
            v.ok_or_else(|| {
                CliError::Config(format!(
                    "scheme.{name} is required for {} (set it or sweep it)",
                    kind.name()
                ))
            })
        };
        let scheme = match kind {
            SchemeKind::None => IncentiveScheme::None,
            SchemeKind::PeerPunishment => IncentiveScheme::PeerPunishment {
                epsilon: need("epsilon", self.epsilon)?,
                delta: need("delta", self.delta)?,
            },
            SchemeKind::PeerReward => IncentiveScheme::PeerReward {
                epsilon: need("epsilon", self.epsilon)?,
                delta: need("delta", self.delta)?,
            },
            SchemeKind::InstitutionalReward => IncentiveScheme::InstitutionalReward {
                delta: need("delta", self.delta)?,
                a: need("a", self.a)?,
            },
            SchemeKind::InstitutionalPunishment => IncentiveScheme::InstitutionalPunishment {
                delta: need("delta", self.delta)?,
                b: need("b", self.b)?,
            },
        };
        if self.n.fract() != 0.0 || self.n < 0.0 || !self.n.is_finite() {
            return Err(CliError::Config(format!(
                "evolution.N must be a whole number, got {}",
                self.n
            )));
        }
        let point = Point {
            scheme,
            pd: PdPayoffs {
                r: self.r,
                s: self.s,
                t: self.t,
                p: self.p,
            },
            params: EvolutionParams {
                population: self.n as usize,
                mu: self.mu,
                beta: self.beta,
            },
        };
        point.spec()?;
        Ok(point)
    }
}

/// One fully resolved parameter combination.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub scheme: IncentiveScheme,
    pub pd: PdPayoffs,
    pub params: EvolutionParams,
}

impl Point {
    pub fn spec(&self) -> Result<ModelSpec> {
        let params =
            EvolutionParams::new(self.params.population, self.params.mu, self.params.beta)?;
        let pd = PdPayoffs::new(self.pd.r, self.pd.s, self.pd.t, self.pd.p)?;
        Ok(ModelSpec::for_scheme(&pd, self.scheme, params)?)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub name: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloSettings {
    pub steps: u64,
    pub burn_in: Option<u64>,
    pub stride: Option<u64>,
    pub seed: u64,
    pub batches: usize,
}

impl MonteCarloSettings {
    pub fn sim_config(&self, spec: ModelSpec, seed: u64) -> SimConfig {
        let mut cfg = SimConfig::new(spec, self.steps, seed);
        if let Some(b) = self.burn_in {
            cfg.burn_in = b;
        }
        if let Some(s) = self.stride {
            cfg.sample_stride = s;
        }
        cfg.batches = self.batches;
        cfg
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    Exact(SolverOptions),
    MonteCarlo(MonteCarloSettings),
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Exact(_) => "exact",
            Self::MonteCarlo(_) => "montecarlo",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub kinds: Vec<SchemeKind>,
    base: Values,
    pub axes: Vec<Axis>,
    pub method: Method,
    pub output: Option<PathBuf>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let file: ConfigFile =
            toml::from_str(text).map_err(|e| CliError::Config(e.to_string().trim().to_owned()))?;
        Self::from_file(file)
    }

    fn from_file(file: ConfigFile) -> Result<Self> {
        let names = match file.scheme.kind {
            OneOrMany::One(s) => vec![s],
            OneOrMany::Many(v) => v,
        };
        if names.is_empty() {
            return Err(CliError::Config(
                "scheme.kind: at least one scheme is required".into(),
            ));
        }
        let mut kinds = Vec::with_capacity(names.len());
        for n in &names {
            let k = SchemeKind::parse(n)?;
            if kinds.contains(&k) {
                return Err(CliError::Config(format!("scheme.kind: '{n}' listed twice")));
            }
            kinds.push(k);
        }

        let base = Values {
            n: file.evolution.n as f64,
            mu: file.evolution.mu,
            beta: file.evolution.beta,
            r: file.game.r,
            s: file.game.s,
            t: file.game.t,
            p: file.game.p,
            epsilon: file.scheme.epsilon,
            delta: file.scheme.delta,
            a: file.scheme.a,
            b: file.scheme.b,
        };
        for (name, v) in [
            ("epsilon", base.epsilon),
            ("delta", base.delta),
            ("a", base.a),
            ("b", base.b),
        ] {
            if v.is_some() && !kinds.iter().any(|k| k.parameters().contains(&name)) {
                return Err(CliError::Config(format!(
                    "scheme.{name} is not a parameter of {}",
                    names.join(", ")
                )));
            }
        }

        if file.sweep.axis.len() > 2 {
            return Err(CliError::Config(format!(
                "sweep.axis: at most two axes are supported, got {}",
                file.sweep.axis.len()
            )));
        }
        let mut axes: Vec<Axis> = Vec::new();
        for a in &file.sweep.axis {
            let axis = expand_axis(a)?;
            if axes.iter().any(|x| x.name == axis.name) {
                return Err(CliError::Config(format!(
                    "sweep.axis: '{}' swept twice",
                    axis.name
                )));
            }
            if SchemeKind::is_scheme_parameter(&axis.name) {
                if let Some(k) = kinds
                    .iter()
                    .find(|k| !k.parameters().contains(&axis.name.as_str()))
                {
                    return Err(CliError::Config(format!(
                        "sweep.axis: '{}' is not a parameter of {}",
                        axis.name,
                        k.name()
                    )));
                }
            }
            axes.push(axis);
        }
        let total = axes
            .iter()
            .try_fold(kinds.len(), |acc, a| acc.checked_mul(a.values.len()))
            .filter(|&t| t <= MAX_POINTS);
        if total.is_none() {
            return Err(CliError::Config(format!(
                "sweep grid exceeds {MAX_POINTS} points"
            )));
        }

        let method = match file.solver.method {
            MethodKind::Exact => {
                let defaults = SolverOptions::default();
                let tol = file.solver.tol.unwrap_or(defaults.tol);
                if !(tol.is_finite() && tol > 0.0) {
                    return Err(CliError::Config(format!(
                        "solver.tol must be > 0, got {tol}"
                    )));
                }
                Method::Exact(SolverOptions {
                    method: match file.solver.algorithm {
                        Algorithm::Direct => SolverMethod::Direct,
                        Algorithm::Power => SolverMethod::PowerIteration,
                    },
                    tol,
                    max_iter: file.solver.max_iter.unwrap_or(defaults.max_iter),
                    ..defaults
                })
            }
            MethodKind::Montecarlo => {
                let mc = file.montecarlo.ok_or_else(|| {
                    CliError::Config(
                        "solver.method = \"montecarlo\" needs a [montecarlo] section".into(),
                    )
                })?;
                Method::MonteCarlo(MonteCarloSettings {
                    steps: mc.steps,
                    burn_in: mc.burn_in,
                    stride: mc.stride,
                    seed: mc.seed,
                    batches: mc.batches.unwrap_or(MIN_BATCHES),
                })
            }
        };

        let config = Self {
            kinds,
            base,
            axes,
            method,
            output: file.output.path,
        };
        // Resolve the whole grid once so that bad values fail before any work.
        let points = config.points()?;
        if let Method::MonteCarlo(mc) = &config.method {
            for p in &points {
                mc.sim_config(p.spec()?, 0)
                    .validate()
                    .map_err(|e| CliError::Config(format!("montecarlo: {e}")))?;
            }
        }
        Ok(config)
    }

    pub fn is_single_point(&self) -> bool {
        self.kinds.len() == 1 && self.axes.iter().all(|a| a.values.len() == 1)
    }

    /// All grid points: scheme kinds outermost, then the axes in the order
    /// they were declared.
    pub fn points(&self) -> Result<Vec<Point>> {
        let total: usize = self.axes.iter().map(|a| a.values.len()).product();
        let mut out = Vec::with_capacity(total * self.kinds.len());
        for &kind in &self.kinds {
            for flat in 0..total {
                // last axis varies fastest
                let mut v = self.base;
                let mut rem = flat;
                for a in self.axes.iter().rev() {
                    v.set(&a.name, a.values[rem % a.values.len()]);
                    rem /= a.values.len();
                }
                out.push(v.point(kind)?);
            }
        }
        Ok(out)
    }
}

/// Removes binary noise from `start + k * step` so grid values print as the
/// user wrote them.
fn tidy(v: f64) -> f64 {
    format!("{v:.12}").parse().unwrap_or(v)
}

fn expand_axis(a: &AxisSection) -> Result<Axis> {
    if !PARAMETERS.contains(&a.name.as_str()) {
        return Err(CliError::Config(format!(
            "sweep.axis: unknown parameter '{}' (expected one of {})",
            a.name,
            PARAMETERS.join(", ")
        )));
    }
    let bad = |msg: String| CliError::Config(format!("sweep.axis '{}': {msg}", a.name));
    let values = match (&a.values, a.start, a.stop) {
        (Some(v), None, None) if a.step.is_none() => {
            if v.is_empty() {
                return Err(bad("values must not be empty".into()));
            }
            v.clone()
        }
        (None, Some(start), Some(stop)) => {
            if let Some(step) = a.step {
                if !(step.is_finite() && step > 0.0) {
                    return Err(bad(format!("step must be > 0, got {step}")));
                }
            }
            if !(start.is_finite() && stop.is_finite()) {
                return Err(bad("start and stop must be finite".into()));
            }
            if stop < start {
                return Err(bad(format!("stop ({stop}) is below start ({start})")));
            }
            if stop == start {
                vec![start]
            } else {
                let step = a
                    .step
                    .ok_or_else(|| bad("step is required when stop differs from start".into()))?;
                let n = ((stop - start) / step + 1e-9).floor();
                if n >= MAX_POINTS as f64 {
                    return Err(bad(format!("more than {MAX_POINTS} values")));
                }
                (0..=n as usize)
                    .map(|k| tidy(start + k as f64 * step))
                    .collect()
            }
        }
        _ => {
            return Err(bad(
                "give either `values` or `start` and `stop` (with `step`)".into(),
            ))
        }
    };
    if let Some(v) = values.iter().find(|v| !v.is_finite()) {
        return Err(bad(format!("non-finite value {v}")));
    }
    Ok(Axis {
        name: a.name.clone(),
        values,
    })
}
