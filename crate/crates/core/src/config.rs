//! Experiment configuration, read from TOML.
//!
//! Every key belongs to a fixed set. Unknown keys and sections are rejected
//! with the location reported by the TOML reader.
//!
//! ```toml
//! task = "simulate"
//!
//! [group]
//! kind = "torus"      # torus, torus:2, torus:3, su2
//! resolution = 8      # Haar quadrature resolution
//! cutoff = 4          # irrep band
//!
//! [process]
//! family = "heat"     # see `Family`
//! diffusion = 0.5
//!
//! [run]
//! seed = 7
//! t = 0.5
//! paths = 100000
//! ```

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::group::GroupKind;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Task {
    FourierRoundtrip,
    Symbol,
    Evolve,
    Resolvent,
    Simulate,
    Dirichlet,
    Verify,
}

impl Task {
    pub const ALL: [Task; 7] = [
        Task::FourierRoundtrip,
        Task::Symbol,
        Task::Evolve,
        Task::Resolvent,
        Task::Simulate,
        Task::Dirichlet,
        Task::Verify,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Task::FourierRoundtrip => "fourier-roundtrip",
            Task::Symbol => "symbol",
            Task::Evolve => "evolve",
            Task::Resolvent => "resolvent",
            Task::Simulate => "simulate",
            Task::Dirichlet => "dirichlet",
            Task::Verify => "verify",
        }
    }

    /// Tolerance used when neither the config nor the command line sets one.
    pub fn default_tol(self) -> f64 {
        match self {
            Task::FourierRoundtrip => 1e-9,
            Task::Symbol => 1e-8,
            Task::Evolve => 1e-10,
            Task::Resolvent => 1e-6,
            // number of standard errors
            Task::Simulate => 4.0,
            Task::Dirichlet => 1e-7,
            Task::Verify => 0.0,
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Task::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown task '{s}'")))
    }
}

/// Built-in process and operator instances.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// `c Δ`.
    Heat,
    /// Left-invariant drift `b^i X_i`.
    Drift,
    /// Two symmetric atoms `τ₀^{±1}` on the first one-parameter subgroup.
    CompoundPoisson,
    /// Pseudo-Poisson with Haar-distributed jumps.
    HaarPoisson,
    /// Pseudo-Poisson with a state-dependent shift on `T^1`.
    ShiftPoisson,
    /// Marcus SDE with left-invariant fields and one driving jump.
    Marcus,
    /// Symmetric Courrège–Hunt operator with a state-dependent diffusion.
    Courrege,
    /// Heat subordinated by a stable subordinator.
    StableHeat,
}

impl Family {
    pub const ALL: [Family; 8] = [
        Family::Heat,
        Family::Drift,
        Family::CompoundPoisson,
        Family::HaarPoisson,
        Family::ShiftPoisson,
        Family::Marcus,
        Family::Courrege,
        Family::StableHeat,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Heat => "heat",
            Family::Drift => "drift",
            Family::CompoundPoisson => "compound-poisson",
            Family::HaarPoisson => "haar-poisson",
            Family::ShiftPoisson => "shift-poisson",
            Family::Marcus => "marcus",
            Family::Courrege => "courrege",
            Family::StableHeat => "stable-heat",
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown process family '{s}'")))
    }
}

/// Numeric overrides for a family; `None` keeps the family default.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ProcessParams {
    pub rate: Option<f64>,
    pub diffusion: Option<f64>,
    pub drift: Option<Vec<f64>>,
    pub jump: Option<f64>,
    pub amplitude: Option<f64>,
    pub offset: Option<f64>,
    pub alpha: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub task: Option<Task>,
    pub kind: GroupKind,
    pub resolution: u32,
    pub cutoff: u32,
    pub family: Family,
    pub params: ProcessParams,
    pub seed: u64,
    pub out: PathBuf,
    pub tol: Option<f64>,
    pub t: f64,
    pub s: f64,
    pub lambda: f64,
    pub t0: f64,
    pub paths: usize,
    pub dt: Option<f64>,
    pub samples: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            task: None,
            kind: GroupKind::Torus(1),
            resolution: 16,
            cutoff: 4,
            family: Family::Heat,
            params: ProcessParams::default(),
            seed: 1,
            out: PathBuf::from("results"),
            tol: None,
            t: 0.5,
            s: 0.3,
            lambda: 1.0,
            t0: 1e-3,
            paths: 10_000,
            dt: None,
            samples: 20,
        }
    }
}

fn parse_kind(v: &str) -> Result<GroupKind> {
    match v {
        "su2" => Ok(GroupKind::SU2),
        "torus" => Ok(GroupKind::Torus(1)),
        _ => {
            let d = v
                .strip_prefix("torus:")
                .and_then(|d| d.parse::<usize>().ok())
                .filter(|d| (1..=3).contains(d))
                .ok_or_else(|| Error::Config(format!("unknown group kind '{v}'")))?;
            Ok(GroupKind::Torus(d))
        }
    }
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    task: Option<String>,
    #[serde(default)]
    group: RawGroup,
    #[serde(default)]
    process: RawProcess,
    #[serde(default)]
    run: RawRun,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawGroup {
    kind: Option<String>,
    resolution: Option<u32>,
    cutoff: Option<u32>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawProcess {
    family: Option<String>,
    rate: Option<f64>,
    diffusion: Option<f64>,
    drift: Option<Vec<f64>>,
    jump: Option<f64>,
    amplitude: Option<f64>,
    offset: Option<f64>,
    alpha: Option<f64>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawRun {
    seed: Option<u64>,
    out: Option<PathBuf>,
    tol: Option<f64>,
    t: Option<f64>,
    s: Option<f64>,
    lambda: Option<f64>,
    t0: Option<f64>,
    paths: Option<usize>,
    dt: Option<f64>,
    samples: Option<usize>,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string().trim_end().to_string()))?;
        let mut cfg = Self::default();
        if let Some(t) = raw.task {
            cfg.task = Some(t.parse()?);
        }
        let g = raw.group;
        if let Some(k) = g.kind {
            cfg.kind = parse_kind(&k)?;
        }
        cfg.resolution = g.resolution.unwrap_or(cfg.resolution);
        cfg.cutoff = g.cutoff.unwrap_or(cfg.cutoff);
        let p = raw.process;
        if let Some(f) = p.family {
            cfg.family = f.parse()?;
        }
        cfg.params = ProcessParams {
            rate: p.rate,
            diffusion: p.diffusion,
            drift: p.drift,
            jump: p.jump,
            amplitude: p.amplitude,
            offset: p.offset,
            alpha: p.alpha,
        };
        let r = raw.run;
        cfg.seed = r.seed.unwrap_or(cfg.seed);
        cfg.out = r.out.unwrap_or(cfg.out);
        cfg.tol = r.tol;
        cfg.t = r.t.unwrap_or(cfg.t);
        cfg.s = r.s.unwrap_or(cfg.s);
        cfg.lambda = r.lambda.unwrap_or(cfg.lambda);
        cfg.t0 = r.t0.unwrap_or(cfg.t0);
        cfg.paths = r.paths.unwrap_or(cfg.paths);
        cfg.dt = r.dt;
        cfg.samples = r.samples.unwrap_or(cfg.samples);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.into()));
        let p = &self.params;
        let scalars = [self.t, self.s, self.lambda, self.t0]
            .into_iter()
            .chain(self.tol)
            .chain(self.dt)
            .chain([p.rate, p.diffusion, p.jump, p.amplitude, p.offset, p.alpha].into_iter().flatten())
            .chain(p.drift.iter().flatten().copied());
        if scalars.into_iter().any(|x| !x.is_finite()) {
            return bad("numeric values must be finite");
        }
        if self.resolution == 0 {
            return bad("key 'resolution' must be at least 1");
        }
        if self.paths == 0 {
            return bad("key 'paths' must be at least 1");
        }
        if self.samples == 0 {
            return bad("key 'samples' must be at least 1");
        }
        if !(self.t > 0.0 && self.s > 0.0 && self.t0 > 0.0 && self.lambda > 0.0) {
            return bad("keys 't', 's', 't0' and 'lambda' must be positive");
        }
        if let Some(dt) = self.dt {
            if !(dt > 0.0 && dt <= self.t) {
                return bad("key 'dt' must lie in (0, t]");
            }
        }
        if let Some(d) = &self.params.drift {
            if d.len() != self.kind.dim() {
                return Err(Error::Config(format!(
                    "key 'drift' needs {} components on {}",
                    self.kind.dim(),
                    self.kind
                )));
            }
        }
        Ok(())
    }

    pub fn tol_for(&self, task: Task) -> f64 {
        self.tol.unwrap_or_else(|| task.default_tol())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_every_section() {
        let cfg = ExperimentConfig::parse(
            "task = \"simulate\"  # trailing comment\n\n[group]\nkind = \"torus:2\"\ncutoff = 3\n\
             [process]\nfamily = \"compound-poisson\"\ndrift = [1, -0.5]\nrate = 2\n[run]\nseed = 9\npaths = 500\ndt = 0.01\n",
        )
        .unwrap();
        assert_eq!(cfg.task, Some(Task::Simulate));
        assert_eq!(cfg.kind, GroupKind::Torus(2));
        assert_eq!(cfg.cutoff, 3);
        assert_eq!(cfg.family, Family::CompoundPoisson);
        assert_eq!(cfg.params.drift, Some(vec![1.0, -0.5]));
        assert_eq!(cfg.params.rate, Some(2.0));
        assert_eq!((cfg.seed, cfg.paths, cfg.dt), (9, 500, Some(0.01)));
    }

    #[test]
    fn unknown_keys_name_the_offender() {
        let err = ExperimentConfig::parse("[run]\nsede = 3\n").unwrap_err().to_string();
        assert!(err.contains("sede") && err.contains("line 2"), "{err}");
        let err = ExperimentConfig::parse("kind = \"su2\"\n").unwrap_err().to_string();
        assert!(err.contains("kind"), "{err}");
        assert!(ExperimentConfig::parse("[nope]\n").is_err());
        assert!(ExperimentConfig::parse("[group]\nkind = \"sphere\"\n").is_err());
        assert!(ExperimentConfig::parse("[run]\nt = \"abc\"\n").is_err());
        assert!(ExperimentConfig::parse("[run]\nt = inf\n").is_err());
        assert!(ExperimentConfig::parse("[process]\ndrift = [1, 2]\n").is_err());
    }

    #[test]
    fn names_roundtrip() {
        for t in Task::ALL {
            assert_eq!(t.name().parse::<Task>().unwrap(), t);
        }
        for f in Family::ALL {
            assert_eq!(f.name().parse::<Family>().unwrap(), f);
        }
    }
}
