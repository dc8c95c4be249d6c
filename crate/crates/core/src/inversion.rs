//! Damped-lattice inversion of probability generating functions, and PMF bounds from CDF bounds.
//!
//! `p̂_k = (1 / (2K ρ^k)) Σ_{j<2K} P(ρ e^{πij/K}) e^{-πijk/K}` with `ρ = 10^{-γ/(2K)}`; the aliasing
//! error is at most `ρ^{2K} / (1 - ρ^{2K})`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::cluster::{ClusterSettings, FixedPointOperator, Seed};
use crate::error::{HawkesError, Result};
use crate::markov::pgf_n_markov;
use crate::model::ModelConfig;

pub const DEFAULT_GAMMA: f64 = 4.0;
/// Imaginary parts below this are treated as rounding and dropped silently.
pub const IMAG_DISCARD: f64 = 1e-10;
/// Imaginary parts above this mean the evaluator is not conjugate symmetric.
pub const IMAG_ERROR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InversionSettings {
    pub gamma: f64,
    pub k_max: usize,
    /// `K`: the lattice has `2K` points on the circle.
    pub lattice_size: usize,
}

impl InversionSettings {
    /// `K` defaults to the smallest power of two `>= 2(k_max + 1)`, and at least 16.
    pub fn new(gamma: f64, k_max: usize) -> Result<Self> {
        let k = (2 * (k_max + 1)).next_power_of_two().max(16);
        Self::with_lattice(gamma, k_max, k)
    }

    pub fn with_lattice(gamma: f64, k_max: usize, lattice_size: usize) -> Result<Self> {
        let s = Self { gamma, k_max, lattice_size };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(HawkesError::Config(format!("gamma must be positive, got {}", self.gamma)));
        }
        if self.lattice_size < self.k_max.max(1) {
            return Err(HawkesError::Config(format!(
                "lattice size {} must be at least max(k_max, 1) = {}",
                self.lattice_size,
                self.k_max.max(1)
            )));
        }
        Ok(())
    }

    pub fn radius(&self) -> f64 {
        10f64.powf(-self.gamma / (2.0 * self.lattice_size as f64))
    }

    pub fn aliasing_bound(&self) -> f64 {
        let a = self.radius().powi(2 * self.lattice_size as i32);
        a / (1.0 - a)
    }

    fn node(&self, j: usize) -> Complex64 {
        Complex64::from_polar(self.radius(), PI * j as f64 / self.lattice_size as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LatticeMode {
    /// Evaluate `j = 0..=K` and fill the rest by conjugation.
    Half,
    /// Evaluate all `2K` nodes and check the imaginary residue.
    Full,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PmfEstimate {
    /// Masses for `k = 0..=k_max`, clamped at zero.
    pub masses: Vec<f64>,
    /// Masses before clamping.
    pub raw: Vec<f64>,
    pub method: String,
    pub aliasing_bound: f64,
    pub max_imag_residue: f64,
}

impl PmfEstimate {
    pub fn total(&self) -> f64 {
        self.masses.iter().sum()
    }

    pub fn most_negative(&self) -> f64 {
        self.raw.iter().copied().fold(0.0, f64::min)
    }

    pub fn cdf(&self) -> Vec<f64> {
        self.masses
            .iter()
            .scan(0.0, |acc, p| {
                *acc += p;
                Some(*acc)
            })
            .collect()
    }

    pub fn mean(&self) -> f64 {
        self.masses.iter().enumerate().map(|(k, p)| k as f64 * p).sum()
    }
}

/// Per-k intervals around a point estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct PmfBounds {
    pub point: PmfEstimate,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

/// Inverts several PGFs that share one evaluator call per lattice node.
pub fn invert_pgf_many<F>(
    pgfs: F,
    count: usize,
    settings: &InversionSettings,
    mode: LatticeMode,
    method: &[&str],
) -> Result<Vec<PmfEstimate>>
where
    F: Fn(Complex64) -> Result<Vec<Complex64>> + Sync,
{
    settings.validate()?;
    let big_k = settings.lattice_size;
    let nodes = match mode {
        LatticeMode::Half => big_k + 1,
        LatticeMode::Full => 2 * big_k,
    };
    let values: Vec<Vec<Complex64>> = (0..nodes)
        .into_par_iter()
        .map(|j| pgfs(settings.node(j)))
        .collect::<Vec<_>>()
        .into_iter()
        .collect::<Result<_>>()?;
    if let Some(bad) = values.iter().find(|v| v.len() != count) {
        return Err(HawkesError::Numeric(format!("evaluator returned {} values, expected {count}", bad.len())));
    }
    let rho = settings.radius();
    let mut out = Vec::with_capacity(count);
    for m in 0..count {
        let mut raw = Vec::with_capacity(settings.k_max + 1);
        let mut max_imag = 0.0f64;
        for k in 0..=settings.k_max {
            let angle = |j: usize| Complex64::from_polar(1.0, -PI * ((j * k) % (2 * big_k)) as f64 / big_k as f64);
            let sum = match mode {
                LatticeMode::Half => {
                    let mut acc = values[0][m].re;
                    acc += if k % 2 == 0 { values[big_k][m].re } else { -values[big_k][m].re };
                    for j in 1..big_k {
                        acc += 2.0 * (values[j][m] * angle(j)).re;
                    }
                    Complex64::new(acc, 0.0)
                }
                LatticeMode::Full => (0..2 * big_k).fold(Complex64::default(), |acc, j| acc + values[j][m] * angle(j)),
            };
            let scale = 1.0 / (2.0 * big_k as f64 * rho.powi(k as i32));
            let p = sum * scale;
            max_imag = max_imag.max(p.im.abs());
            if p.im.abs() > IMAG_ERROR {
                return Err(HawkesError::SymmetryViolation { residue: p.im.abs() });
            }
            raw.push(p.re);
        }
        out.push(PmfEstimate {
            masses: raw.iter().map(|p| p.max(0.0)).collect(),
            raw,
            method: method.get(m).copied().unwrap_or("pgf").to_string(),
            aliasing_bound: settings.aliasing_bound(),
            max_imag_residue: if max_imag <= IMAG_DISCARD { 0.0 } else { max_imag },
        });
    }
    Ok(out)
}

pub fn invert_pgf<F>(pgf: F, settings: &InversionSettings) -> Result<PmfEstimate>
where
    F: Fn(Complex64) -> Result<Complex64> + Sync,
{
    invert_pgf_with(pgf, settings, LatticeMode::Half)
}

pub fn invert_pgf_with<F>(pgf: F, settings: &InversionSettings, mode: LatticeMode) -> Result<PmfEstimate>
where
    F: Fn(Complex64) -> Result<Complex64> + Sync,
{
    let mut v = invert_pgf_many(|z| pgf(z).map(|p| vec![p]), 1, settings, mode, &["pgf"])?;
    Ok(v.remove(0))
}

/// Running maximum, then clamp to `[0, 1]`. Defective totals are kept.
pub fn monotone_repair(cdf: &[f64]) -> Vec<f64> {
    cdf.iter()
        .scan(f64::NEG_INFINITY, |m, &v| {
            *m = m.max(v);
            Some(*m)
        })
        .map(|v| v.clamp(0.0, 1.0))
        .collect()
}

/// From `L(k) <= F(k) <= U(k)`: `p_0 ∈ [L(0), U(0)]`, `p_k ∈ [L(k) - U(k-1), U(k) - L(k-1)]`.
pub fn pmf_bounds_from_cdf_bounds(lower_cdf: &[f64], upper_cdf: &[f64], tolerance: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    if lower_cdf.len() != upper_cdf.len() {
        return Err(HawkesError::Numeric(format!(
            "CDF bounds have different lengths ({} and {})",
            lower_cdf.len(),
            upper_cdf.len()
        )));
    }
    for (k, (l, u)) in lower_cdf.iter().zip(upper_cdf).enumerate() {
        if l - u > tolerance {
            return Err(HawkesError::Ordering { k, gap: l - u });
        }
    }
    let mut lo = Vec::with_capacity(lower_cdf.len());
    let mut hi = Vec::with_capacity(lower_cdf.len());
    for k in 0..lower_cdf.len() {
        let (l, u) = if k == 0 {
            (lower_cdf[0], upper_cdf[0])
        } else {
            (lower_cdf[k] - upper_cdf[k - 1], upper_cdf[k] - lower_cdf[k - 1])
        };
        lo.push(l.clamp(0.0, 1.0));
        hi.push(u.clamp(0.0, 1.0));
    }
    Ok((lo, hi))
}

/// Tail mass beyond the last index from the geometric decay of the last three masses.
pub fn geometric_tail_estimate(masses: &[f64]) -> Option<f64> {
    let n = masses.len();
    if n < 3 || masses[n - 3] <= 0.0 || masses[n - 2] <= 0.0 {
        return None;
    }
    let q = 0.5 * (masses[n - 2] / masses[n - 3] + masses[n - 1] / masses[n - 2]);
    (q > 0.0 && q < 1.0).then(|| masses[n - 1] * q / (1.0 - q))
}

/// PMF of `N(t)` through the characteristic ODE.
pub fn pmf_markov(cfg: &ModelConfig, t: f64, ode_step: f64, settings: &InversionSettings) -> Result<PmfEstimate> {
    cfg.markov_rates()?;
    let mut est = invert_pgf(|z| pgf_n_markov(cfg, t, z, ode_step), settings)?;
    est.method = "diff_eqn".into();
    Ok(est)
}

/// Lower, point and upper CDFs of `N(t)` from the two cluster chains.
#[derive(Debug, Clone, PartialEq)]
pub struct CdfBounds {
    pub lower: Vec<f64>,
    pub point: Vec<f64>,
    pub upper: Vec<f64>,
    pub point_pmf: PmfEstimate,
    pub apriori_error: f64,
}

/// The point estimate is the seed-one chain, so it coincides with the upper CDF before repair.
pub fn cdf_bounds_n(
    cfg: &ModelConfig,
    t: f64,
    cluster: &ClusterSettings,
    settings: &InversionSettings,
) -> Result<CdfBounds> {
    let op = FixedPointOperator::for_horizon(cfg, t, cluster.grid_exponent)?;
    let fixed = ClusterSettings { tolerance: None, ..*cluster };
    let est = invert_pgf_many(
        |z| {
            let up = op.solve(z, Seed::One, &fixed)?;
            let lo = op.solve(z, Seed::Zero, &fixed)?;
            Ok(vec![op.pgf_from_eta(&up.eta.values), op.pgf_from_eta(&lo.eta.values)])
        },
        2,
        settings,
        LatticeMode::Half,
        &["cluster_point", "cluster_lower_chain"],
    )?;
    let (upper_pmf, lower_pmf) = (&est[0], &est[1]);
    let cum = |p: &[f64]| -> Vec<f64> {
        p.iter()
            .scan(0.0, |a, v| {
                *a += v;
                Some(*a)
            })
            .collect()
    };
    let upper = monotone_repair(&cum(&upper_pmf.raw));
    let lower = monotone_repair(&cum(&lower_pmf.raw));
    Ok(CdfBounds {
        point: upper.clone(),
        lower,
        upper,
        point_pmf: upper_pmf.clone(),
        apriori_error: crate::cluster::apriori_bound(op.contraction_constant(), t, cluster.iterations),
    })
}

/// Cluster-route PMF with per-k intervals.
pub fn pmf_cluster(
    cfg: &ModelConfig,
    t: f64,
    cluster: &ClusterSettings,
    settings: &InversionSettings,
) -> Result<PmfBounds> {
    let cdf = cdf_bounds_n(cfg, t, cluster, settings)?;
    let tol = 10.0 * settings.aliasing_bound().max(10f64.powf(-settings.gamma));
    let (lower, upper) = pmf_bounds_from_cdf_bounds(&cdf.lower, &cdf.upper, tol)?;
    Ok(PmfBounds { point: cdf.point_pmf, lower, upper })
}
