//! Run configuration: TOML file plus command-line overrides.
//!
//! The file uses exactly the key paths below; any flag given on the command
//! line wins over the file value.
//!
//! ```toml
//! [state]
//! kind = "coherent"        # coherent | kphoton | orthogonal_even | even | odd
//! alpha = 5.0
//! k = 3                    # kphoton only
//!
//! [atom]
//! theta = 0.0              # radians
//! phi = 0.0
//!
//! [model]
//! m = 1
//! approach = "eha"         # eha | meha
//! beta1 = 0.0
//! beta2 = 0.0
//! lambda = 1.0
//!
//! [grid]
//! t_max = 50.0             # scaled time T = λt
//! steps = 2001
//!
//! [truncation]
//! n_max = "auto"           # or an integer
//!
//! observables = ["inversion"]
//! output = "run.csv"
//! ```

use serde::Deserialize;
use std::path::{Path, PathBuf};

use mjcm::states::{self, default_n_max};
use mjcm::{AtomState, FieldState, ModelConfig, Observable, Parity};

use crate::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub state: StateSection,
    pub atom: AtomSection,
    pub model: ModelSection,
    pub grid: GridSection,
    pub truncation: TruncationSection,
    pub observables: Vec<String>,
    pub output: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            state: StateSection::default(),
            atom: AtomSection::default(),
            model: ModelSection::default(),
            grid: GridSection::default(),
            truncation: TruncationSection::default(),
            observables: vec!["inversion".to_string()],
            output: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StateSection {
    pub kind: String,
    pub alpha: f64,
    pub k: u32,
}

impl Default for StateSection {
    fn default() -> Self {
        Self { kind: "coherent".into(), alpha: 1.0, k: 3 }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AtomSection {
    pub theta: f64,
    pub phi: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSection {
    pub m: u32,
    pub approach: String,
    pub beta1: f64,
    pub beta2: f64,
    pub lambda: f64,
}

impl Default for ModelSection {
    fn default() -> Self {
        Self { m: 1, approach: "eha".into(), beta1: 0.0, beta2: 0.0, lambda: 1.0 }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    pub t_max: f64,
    pub steps: usize,
}

impl Default for GridSection {
    fn default() -> Self {
        Self { t_max: 50.0, steps: 2001 }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TruncationSection {
    pub n_max: NmaxSetting,
}

impl Default for TruncationSection {
    fn default() -> Self {
        Self { n_max: NmaxSetting::Auto }
    }
}

/// `"auto"` or an explicit level count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NmaxSetting {
    Auto,
    Fixed(usize),
}

impl<'de> Deserialize<'de> for NmaxSetting {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Word(String),
            Count(i64),
        }
        match Raw::deserialize(de)? {
            Raw::Word(w) if w == "auto" => Ok(NmaxSetting::Auto),
            Raw::Word(w) => Err(serde::de::Error::custom(format!(
                "truncation.n_max must be \"auto\" or an integer, got \"{w}\""
            ))),
            Raw::Count(c) if c >= 1 => Ok(NmaxSetting::Fixed(c as usize)),
            Raw::Count(c) => Err(serde::de::Error::custom(format!(
                "truncation.n_max must be >= 1, got {c}"
            ))),
        }
    }
}

impl std::str::FromStr for NmaxSetting {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "auto" {
            return Ok(NmaxSetting::Auto);
        }
        s.parse::<usize>()
            .map(NmaxSetting::Fixed)
            .map_err(|_| format!("expected \"auto\" or an integer, got \"{s}\""))
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

/// A fully validated run: constructed state, atom, model, grid and columns.
pub struct Resolved {
    pub field: FieldState,
    pub atom: AtomState,
    pub model: ModelConfig,
    pub t_max: f64,
    pub steps: usize,
    pub observables: Vec<Observable>,
    pub n_max: usize,
    pub n_max_was_auto: bool,
    pub output: PathBuf,
    pub config: RunConfig,
}

/// Applies the truncation policy for each state kind: the policy runs on the
/// occupied-index grid, so ladder states scale it by their spacing.
pub fn auto_n_max(kind: &str, alpha: f64, k: u32, m: u32) -> usize {
    let a2 = alpha * alpha;
    match kind {
        "kphoton" => {
            k as usize * (a2 + 10.0 * (a2 + 1.0).sqrt()).ceil() as usize + m as usize + 4
        }
        // parity cats keep at least one photon in the odd branch
        "odd" => default_n_max(a2.max(1.0), m),
        _ => default_n_max(a2, m),
    }
}

pub fn resolve(cfg: RunConfig) -> Result<Resolved, CliError> {
    let m = cfg.model.m;
    let (n_max, was_auto) = match cfg.truncation.n_max {
        NmaxSetting::Auto => (auto_n_max(&cfg.state.kind, cfg.state.alpha, cfg.state.k, m), true),
        NmaxSetting::Fixed(n) => (n, false),
    };

    let field = match cfg.state.kind.as_str() {
        "coherent" => states::coherent_state(cfg.state.alpha, n_max),
        "kphoton" => states::k_photon_coherent_state(cfg.state.alpha, cfg.state.k, n_max),
        "orthogonal_even" => states::orthogonal_even_coherent_state(cfg.state.alpha, n_max),
        "even" => states::parity_coherent_state(cfg.state.alpha, Parity::Even, n_max),
        "odd" => states::parity_coherent_state(cfg.state.alpha, Parity::Odd, n_max),
        other => {
            return Err(CliError::Config(format!(
                "unknown state.kind \"{other}\" (expected coherent | kphoton | orthogonal_even | even | odd)"
            )))
        }
    }
    .map_err(CliError::from_construction)?;

    let atom = AtomState::new(cfg.atom.theta, cfg.atom.phi)
        .map_err(|e| CliError::Config(e.to_string()))?;

    if !(cfg.model.lambda.is_finite() && cfg.model.lambda > 0.0) {
        return Err(CliError::Config(format!(
            "model.lambda must be > 0, got {}",
            cfg.model.lambda
        )));
    }
    let model = match cfg.model.approach.as_str() {
        "eha" => ModelConfig::eha(m).map(|base| ModelConfig { lambda: cfg.model.lambda, ..base }),
        "meha" => ModelConfig::meha(m, cfg.model.beta1, cfg.model.beta2, cfg.model.lambda),
        other => {
            return Err(CliError::Config(format!(
                "unknown model.approach \"{other}\" (expected eha | meha)"
            )))
        }
    }
    .map_err(|e| CliError::Config(e.to_string()))?;

    let observables = cfg
        .observables
        .iter()
        .map(|name| Observable::parse(name))
        .collect::<mjcm::Result<Vec<_>>>()
        .map_err(|e| CliError::Config(e.to_string()))?;

    let output = cfg.output.clone().unwrap_or_else(|| PathBuf::from("run.csv"));
    Ok(Resolved {
        field,
        atom,
        model,
        t_max: cfg.grid.t_max,
        steps: cfg.grid.steps,
        observables,
        n_max,
        n_max_was_auto: was_auto,
        output,
        config: cfg,
    })
}
