//! Experiment configuration files (TOML).
//!
//! ```toml
//! [model]
//! lambda_inf_per_time = 1.45
//!
//! [model.kernel]
//! kind = "exponential"
//! rate_per_time = 2.15
//!
//! [model.marks]
//! kind = "deterministic"
//! value = 0.98
//!
//! [model.service]
//! kind = "exponential"
//! rate_per_time = 1.25
//!
//! [settings]
//! horizon_time = 10.0
//! ```
//!
//! Kernel kinds: `exponential { rate_per_time }`, `tabulated { step_time, samples, tail_bound }`.
//! Mark kinds: `deterministic { value }`, `exponential { rate }`, `pareto { alpha, scale }`.
//! Service kinds: `exponential { rate_per_time }`, `deterministic { duration_time }`,
//! `tabulated { step_time, survival }`.
//!
//! Every `[settings]` key is optional; [`Settings::default`] lists the defaults. Unknown keys
//! anywhere are rejected. A free-form `[metadata]` table is accepted and ignored, so the sidecar
//! written next to every output can be fed back in unchanged.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{HawkesError, Result};
use crate::model::{
    ExcitationKernel, MarkDistribution, ModelConfig, ServiceDistribution, TabulatedKernel, TabulatedSurvival,
};
use crate::sim::Backend;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelSection,
    #[serde(default)]
    pub settings: Settings,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<toml::Table>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub lambda_inf_per_time: f64,
    pub kernel: KernelSpec,
    pub marks: MarkSpec,
    pub service: ServiceSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum KernelSpec {
    Exponential { rate_per_time: f64 },
    Tabulated { step_time: f64, samples: Vec<f64>, tail_bound: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MarkSpec {
    Deterministic { value: f64 },
    Exponential { rate: f64 },
    Pareto { alpha: f64, scale: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ServiceSpec {
    Exponential { rate_per_time: f64 },
    Deterministic { duration_time: f64 },
    Tabulated { step_time: f64, survival: Vec<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackendName {
    Cluster,
    Thinning,
}

impl From<BackendName> for Backend {
    fn from(b: BackendName) -> Self {
        match b {
            BackendName::Cluster => Backend::Cluster,
            BackendName::Thinning => Backend::Thinning,
        }
    }
}

/// Command settings. Defaults reproduce the worked example at `t = 10`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Settings {
    /// Observation time `t` (default 10).
    pub horizon_time: f64,
    /// Largest `k` reported (default 13).
    pub k_max: usize,
    /// Inversion accuracy exponent (default 4).
    pub gamma: f64,
    /// Half the lattice size `K`; defaults to the smallest power of two `>= 2(k_max + 1)`, at least 16.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lattice_size: Option<usize>,
    /// RK4 step for the characteristic ODE (default 1e-4).
    pub ode_step_time: f64,
    /// Fixed-point iterations (default 10).
    pub n_iter: usize,
    /// Cluster grid step is `t * 2^-grid_exponent` (default 12).
    pub grid_exponent: u32,
    /// Runs per simulation batch (default 10 000; `--paper-exact` sets 100 000).
    pub runs: usize,
    /// Simulation batches (default 100).
    pub batches: usize,
    /// Master seed (default 1).
    pub seed: u64,
    /// Arrival sampler (default cluster).
    pub backend: BackendName,
    /// Arrivals allowed per run before reporting a runaway (default 1e7).
    pub event_cap: usize,
    /// Highest moment order for `transient-moments` and `stationary` (default 2).
    pub moment_order: usize,
    /// Number of equally spaced output times on `[0, t]` for `transient-moments` (default 101).
    pub output_points: usize,
    /// Loads for `heavy-traffic`; marks are rescaled to each (default [0.9, 0.99]).
    pub rho_sweep: Vec<f64>,
    /// Upper end of the transform-argument grid for `heavy-traffic` (default 5).
    pub lst_s_max: f64,
    /// Points on that grid (default 51).
    pub lst_points: usize,
    /// Long paths for the occupancy part of `heavy-traffic` (default 20).
    pub ht_batches: usize,
    /// Observations per path (default 1000).
    pub ht_samples_per_batch: usize,
    /// Tail index for `tail` when the marks are not Pareto (default 1.5).
    pub alpha: f64,
    /// Slowly varying constant for `tail` when the marks are not Pareto (default 1).
    pub ell_inf: f64,
    /// `tail` evaluates the residual at `z = 1 - 10^-j` for these `j` (default [2, 3, 4, 5]).
    pub tail_z_exponents: Vec<u32>,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            horizon_time: 10.0,
            k_max: 13,
            gamma: crate::inversion::DEFAULT_GAMMA,
            lattice_size: None,
            ode_step_time: crate::markov::DEFAULT_ODE_STEP,
            n_iter: crate::cluster::DEFAULT_ITERATIONS,
            grid_exponent: crate::cluster::DEFAULT_GRID_EXPONENT,
            runs: 10_000,
            batches: 100,
            seed: 1,
            backend: BackendName::Cluster,
            event_cap: crate::sim::DEFAULT_EVENT_CAP,
            moment_order: 2,
            output_points: 101,
            rho_sweep: vec![0.9, 0.99],
            lst_s_max: 5.0,
            lst_points: 51,
            ht_batches: 20,
            ht_samples_per_batch: 1000,
            alpha: 1.5,
            ell_inf: 1.0,
            tail_z_exponents: vec![2, 3, 4, 5],
        }
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(HawkesError::Config(format!("settings.{name} must be positive and finite, got {v}")))
    }
}

fn at_least(name: &str, v: usize, min: usize) -> Result<()> {
    if v >= min {
        Ok(())
    } else {
        Err(HawkesError::Config(format!("settings.{name} must be at least {min}, got {v}")))
    }
}

impl Settings {
    pub fn validate(&self) -> Result<()> {
        positive("horizon_time", self.horizon_time)?;
        positive("gamma", self.gamma)?;
        positive("ode_step_time", self.ode_step_time)?;
        positive("lst_s_max", self.lst_s_max)?;
        positive("ell_inf", self.ell_inf)?;
        at_least("n_iter", self.n_iter, 1)?;
        at_least("runs", self.runs, 1)?;
        at_least("batches", self.batches, 2)?;
        at_least("event_cap", self.event_cap, 1)?;
        at_least("moment_order", self.moment_order, 1)?;
        at_least("output_points", self.output_points, 2)?;
        at_least("lst_points", self.lst_points, 2)?;
        at_least("ht_batches", self.ht_batches, 2)?;
        at_least("ht_samples_per_batch", self.ht_samples_per_batch, 1)?;
        if !(1..=20).contains(&self.grid_exponent) {
            return Err(HawkesError::Config(format!(
                "settings.grid_exponent must be in 1..=20, got {}",
                self.grid_exponent
            )));
        }
        if self.moment_order > 8 {
            return Err(HawkesError::Config(format!(
                "settings.moment_order must be at most 8, got {}",
                self.moment_order
            )));
        }
        if self.rho_sweep.is_empty() || self.rho_sweep.iter().any(|r| !(*r > 0.0 && *r < 1.0)) {
            return Err(HawkesError::Config(format!(
                "settings.rho_sweep must be a non-empty list of loads in (0, 1), got {:?}",
                self.rho_sweep
            )));
        }
        if !(self.alpha > 1.0 && self.alpha < 2.0) {
            return Err(HawkesError::Config(format!("settings.alpha must lie in (1, 2), got {}", self.alpha)));
        }
        if self.tail_z_exponents.is_empty() || self.tail_z_exponents.iter().any(|j| !(1..=8).contains(j)) {
            return Err(HawkesError::Config(format!(
                "settings.tail_z_exponents must be a non-empty list in 1..=8, got {:?}",
                self.tail_z_exponents
            )));
        }
        if self.seed > i64::MAX as u64 {
            return Err(HawkesError::Config(format!("settings.seed must be at most {}, got {}", i64::MAX, self.seed)));
        }
        self.inversion().map(|_| ())
    }

    pub fn inversion(&self) -> Result<crate::inversion::InversionSettings> {
        match self.lattice_size {
            Some(k) => crate::inversion::InversionSettings::with_lattice(self.gamma, self.k_max, k),
            None => crate::inversion::InversionSettings::new(self.gamma, self.k_max),
        }
    }

    pub fn cluster(&self) -> crate::cluster::ClusterSettings {
        crate::cluster::ClusterSettings { iterations: self.n_iter, grid_exponent: self.grid_exponent, tolerance: None }
    }

    pub fn batch(&self) -> crate::sim::BatchSettings {
        crate::sim::BatchSettings {
            runs_per_batch: self.runs,
            batches: self.batches,
            seed: self.seed,
            backend: self.backend.into(),
            event_cap: self.event_cap,
        }
    }
}

impl ModelSection {
    pub fn to_model(&self) -> Result<ModelConfig> {
        let kernel = match &self.kernel {
            KernelSpec::Exponential { rate_per_time } => ExcitationKernel::Exponential { rate: *rate_per_time },
            KernelSpec::Tabulated { step_time, samples, tail_bound } => {
                ExcitationKernel::Tabulated(TabulatedKernel::new(*step_time, samples.clone(), *tail_bound)?)
            }
        };
        let marks = match self.marks {
            MarkSpec::Deterministic { value } => MarkDistribution::Deterministic { value },
            MarkSpec::Exponential { rate } => MarkDistribution::Exponential { rate },
            MarkSpec::Pareto { alpha, scale } => MarkDistribution::Pareto { alpha, scale },
        };
        let service = match &self.service {
            ServiceSpec::Exponential { rate_per_time } => ServiceDistribution::Exponential { rate: *rate_per_time },
            ServiceSpec::Deterministic { duration_time } => {
                ServiceDistribution::Deterministic { duration: *duration_time }
            }
            ServiceSpec::Tabulated { step_time, survival } => {
                ServiceDistribution::Tabulated(TabulatedSurvival::new(*step_time, survival.clone())?)
            }
        };
        ModelConfig::new(self.lambda_inf_per_time, kernel, marks, service)
    }

    pub fn from_model(cfg: &ModelConfig) -> Self {
        let kernel = match &cfg.kernel {
            ExcitationKernel::Exponential { rate } => KernelSpec::Exponential { rate_per_time: *rate },
            ExcitationKernel::Tabulated(t) => KernelSpec::Tabulated {
                step_time: t.step(),
                samples: t.samples().to_vec(),
                tail_bound: t.tail_bound(),
            },
        };
        let marks = match cfg.marks {
            MarkDistribution::Deterministic { value } => MarkSpec::Deterministic { value },
            MarkDistribution::Exponential { rate } => MarkSpec::Exponential { rate },
            MarkDistribution::Pareto { alpha, scale } => MarkSpec::Pareto { alpha, scale },
        };
        let service = match &cfg.service {
            ServiceDistribution::Exponential { rate } => ServiceSpec::Exponential { rate_per_time: *rate },
            ServiceDistribution::Deterministic { duration } => ServiceSpec::Deterministic { duration_time: *duration },
            ServiceDistribution::Tabulated(t) => {
                ServiceSpec::Tabulated { step_time: t.step(), survival: t.samples().to_vec() }
            }
        };
        Self { lambda_inf_per_time: cfg.lambda_inf, kernel, marks, service }
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| HawkesError::Config(e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HawkesError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.model.to_model()?;
        self.settings.validate()
    }

    pub fn model(&self) -> Result<ModelConfig> {
        self.model.to_model()
    }

    pub fn table1() -> Self {
        Self { model: ModelSection::from_model(&ModelConfig::table1()), settings: Settings::default(), metadata: None }
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| HawkesError::Numeric(format!("cannot serialise configuration: {e}")))
    }
}
