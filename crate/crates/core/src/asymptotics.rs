//! Heavy-tail expansion of the PGF of `N(t)` and heavy-traffic Gamma limits.
//!
//! `R₁ = 𝒥 + b₁ h⋆R₁` is the mean cluster size in service, `Rα = b₁ h⋆Rα + Γ(1-α) ℓ(∞) (h⋆R₁)^α`
//! its heavy-tail correction; both are second-kind Volterra equations solved by trapezoidal
//! marching on a uniform grid.

use rayon::prelude::*;
use statrs::function::beta::ln_beta;
use statrs::function::gamma::gamma;

use crate::error::{HawkesError, Result};
use crate::grid::{convolve_trapezoid, trapezoid, TimeGrid};
use crate::model::{HeavyTailSpec, MarkDistribution, ModelConfig};
use crate::quad::adaptive_simpson;
use crate::sim::{run_rng, MarkovQueuePath};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VolterraMethod {
    NeumannSeries,
    ClosedForm,
    DirectVolterra,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VolterraSolution {
    pub grid: TimeGrid,
    pub values: Vec<f64>,
    pub method: VolterraMethod,
    /// Truncation bound for the Neumann series, zero otherwise.
    pub error_bound: f64,
}

impl VolterraSolution {
    pub fn integral(&self) -> f64 {
        trapezoid(&self.values, self.grid.step())
    }
}

/// Solves `x = forcing + b₁ h⋆x` on `grid` by marching; the trapezoid weight on the current node
/// is moved to the left-hand side.
fn march(cfg: &ModelConfig, grid: TimeGrid, forcing: &[f64]) -> Vec<f64> {
    let b1 = cfg.marks.mean();
    let step = grid.step();
    let h: Vec<f64> = grid.points().map(|u| cfg.kernel.density(u)).collect();
    let denom = 1.0 - 0.5 * b1 * step * h[0];
    let mut x = Vec::with_capacity(grid.len());
    x.push(forcing[0]);
    for i in 1..grid.len() {
        let mut acc = 0.5 * h[i] * x[0];
        for j in 1..i {
            acc += h[j] * x[i - j];
        }
        x.push((forcing[i] + b1 * step * acc) / denom);
    }
    x
}

fn stable_load(cfg: &ModelConfig) -> Result<f64> {
    Ok(cfg.require_stable()?.rho)
}

fn grid_for(t: f64, step: f64) -> Result<TimeGrid> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(HawkesError::Domain(format!("horizon must be positive and finite, got {t}")));
    }
    TimeGrid::with_max_step(t, step)
}

/// `R₁` on `[0, t]` by direct marching.
pub fn r1_volterra(cfg: &ModelConfig, t: f64, step: f64) -> Result<VolterraSolution> {
    stable_load(cfg)?;
    let grid = grid_for(t, step)?;
    let forcing: Vec<f64> = grid.points().map(|u| cfg.service.survival(u)).collect();
    Ok(VolterraSolution { grid, values: march(cfg, grid, &forcing), method: VolterraMethod::DirectVolterra, error_bound: 0.0 })
}

/// `R₁ = Σ_{n<=terms} b₁ⁿ (h^{n⋆} ⋆ 𝒥)` with truncation bound `ρ^{terms+1} / (1 - ρ)`.
pub fn r1_neumann(cfg: &ModelConfig, t: f64, step: f64, terms: usize) -> Result<VolterraSolution> {
    let rho = stable_load(cfg)?;
    let grid = grid_for(t, step)?;
    let b1 = cfg.marks.mean();
    let h: Vec<f64> = grid.points().map(|u| cfg.kernel.density(u)).collect();
    let mut term: Vec<f64> = grid.points().map(|u| cfg.service.survival(u)).collect();
    let mut sum = term.clone();
    for _ in 0..terms {
        term = convolve_trapezoid(&h, &term, grid.step()).into_iter().map(|v| b1 * v).collect();
        for (s, v) in sum.iter_mut().zip(&term) {
            *s += v;
        }
    }
    Ok(VolterraSolution {
        grid,
        values: sum,
        method: VolterraMethod::NeumannSeries,
        error_bound: rho.powi(terms as i32 + 1) / (1.0 - rho),
    })
}

/// `R₁(u) = [(r - μ) e^{-μu} - b₁ e^{-r0 u}] / (r0 - μ)`, written as
/// `e^{-μu} (1 + b₁ (1 - e^{-(r0-μ)u}) / (r0 - μ))` so that `r0 = μ` needs no special case.
pub fn r1_closed_exp(cfg: &ModelConfig, u: f64) -> Result<f64> {
    let (r, mu) = cfg.markov_rates()?;
    let b1 = cfg.marks.mean();
    let a = r - b1 - mu;
    let x = a * u;
    let ratio = if x.abs() < 1e-12 { u } else { -(-x).exp_m1() / a };
    Ok((-mu * u).exp() * (1.0 + b1 * ratio))
}

/// `∫_0^∞ R₁ = E J / (1 - ρ)`.
pub fn r1_integral_infty(cfg: &ModelConfig) -> Result<f64> {
    let rho = stable_load(cfg)?;
    cfg.service.exponential_rate().ok_or_else(|| {
        HawkesError::Config("the closed form for the integral of R1 needs exponential service".into())
    })?;
    Ok(cfg.service.mean() / (1.0 - rho))
}

/// Truncation point `40 / min(μ, r0)` used for improper integrals.
pub fn truncation_horizon(cfg: &ModelConfig) -> Result<f64> {
    let (r, mu) = cfg.markov_rates()?;
    let r0 = r - cfg.marks.mean();
    Ok(40.0 / mu.min(r0))
}

/// Quadrature of the marched `R₁` over `[0, 40/min(μ, r0)]`, with the exponential tail bound.
pub fn r1_integral_truncated(cfg: &ModelConfig, step: f64) -> Result<(f64, f64)> {
    let (r, mu) = cfg.markov_rates()?;
    let decay = mu.min(r - cfg.marks.mean());
    let horizon = truncation_horizon(cfg)?;
    let sol = r1_volterra(cfg, horizon, step)?;
    let tail = sol.values.last().copied().unwrap_or(0.0).abs() / decay;
    Ok((sol.integral(), tail))
}

/// `∫_0^∞ Rα` in Beta-function form; negative because `Γ(1 - α) < 0`.
pub fn ralpha_integral_infty(cfg: &ModelConfig, spec: &HeavyTailSpec) -> Result<f64> {
    let (r, mu) = cfg.markov_rates()?;
    let rho = stable_load(cfg)?;
    let r0 = r * (1.0 - rho);
    let (alpha, ell) = (spec.alpha, spec.ell_inf);
    let gap = mu - r0;
    if gap.abs() <= 1e-12 * mu.max(r0) {
        return Err(HawkesError::Domain(format!(
            "the Beta-function form has a pole at μ = r(1 - ρ) (μ = {mu}, r(1 - ρ) = {r0})"
        )));
    }
    let prefactor = gamma(1.0 - alpha) * ell / (1.0 - rho);
    if gap > 0.0 {
        let p = alpha * r0 / gap;
        Ok(prefactor / gap.powf(alpha + 1.0) * (mu * (alpha + 1.0) - r0) / (alpha * r0)
            * ln_beta(p + 1.0, alpha + 1.0).exp())
    } else {
        // same integral with the roles of μ and r0 exchanged in the substitution
        let g = -gap;
        Ok(prefactor / g.powf(alpha + 1.0) * ln_beta(alpha * mu / g, alpha + 1.0).exp())
    }
}

/// `Rα` on `[0, t]` by marching with forcing `Γ(1-α) ℓ(∞) (h⋆R₁)^α`.
pub fn ralpha_volterra(cfg: &ModelConfig, spec: &HeavyTailSpec, t: f64, step: f64) -> Result<VolterraSolution> {
    let r1 = r1_volterra(cfg, t, step)?;
    let grid = r1.grid;
    let h: Vec<f64> = grid.points().map(|u| cfg.kernel.density(u)).collect();
    let c = gamma(1.0 - spec.alpha) * spec.ell_inf;
    let forcing: Vec<f64> =
        convolve_trapezoid(&h, &r1.values, grid.step()).into_iter().map(|v| c * v.max(0.0).powf(spec.alpha)).collect();
    Ok(VolterraSolution { grid, values: march(cfg, grid, &forcing), method: VolterraMethod::DirectVolterra, error_bound: 0.0 })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailExpansion {
    /// `λ∞ ∫_0^t R₁`.
    pub linear_coeff: f64,
    /// `λ∞ ∫_0^t Rα`, nonpositive.
    pub alpha_coeff: f64,
    pub alpha: f64,
}

impl TailExpansion {
    /// `(E z^{N(t)} - 1 + linear_coeff (1 - z)) / (1 - z)^α`, whose limit as `z ↑ 1` is `-alpha_coeff`.
    pub fn scaled_residual(&self, pgf_minus_one: f64, z: f64) -> f64 {
        (pgf_minus_one + self.linear_coeff * (1.0 - z)) / (1.0 - z).powf(self.alpha)
    }
}

pub fn tail_pgf_expansion(cfg: &ModelConfig, spec: &HeavyTailSpec, t: f64, step: f64) -> Result<TailExpansion> {
    let r1 = r1_volterra(cfg, t, step)?;
    let ra = ralpha_volterra(cfg, spec, t, step)?;
    Ok(TailExpansion {
        linear_coeff: cfg.lambda_inf * r1.integral(),
        alpha_coeff: cfg.lambda_inf * ra.integral(),
        alpha: spec.alpha,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeavyTrafficTarget {
    Lambda,
    N,
}

/// `Gamma(shape, rate)` with LST `(rate / (rate + s))^shape`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaLimit {
    pub shape: f64,
    pub rate: f64,
}

impl GammaLimit {
    pub fn lst(&self, s: f64) -> f64 {
        (self.rate / (self.rate + s)).powf(self.shape)
    }

    pub fn mean(&self) -> f64 {
        self.shape / self.rate
    }

    pub fn variance(&self) -> f64 {
        self.shape / (self.rate * self.rate)
    }
}

/// Limits of `(1 - ρ)Λ` and `(1 - ρ)N` as `ρ ↑ 1`, evaluated at this model's `b₂`.
pub fn heavy_traffic_gamma(cfg: &ModelConfig, target: HeavyTrafficTarget) -> Result<GammaLimit> {
    let r = cfg.kernel.exponential_rate().ok_or_else(|| {
        HawkesError::Config("heavy-traffic limits need an exponential excitation kernel".into())
    })?;
    let b2 = cfg.marks.require_moment(2)?;
    let shape = 2.0 * r * cfg.lambda_inf / b2;
    let rate = 2.0 * r / b2;
    match target {
        HeavyTrafficTarget::Lambda => Ok(GammaLimit { shape, rate }),
        HeavyTrafficTarget::N => {
            let (_, mu) = cfg.markov_rates()?;
            Ok(GammaLimit { shape, rate: rate * mu })
        }
    }
}

/// `u / (r u + β(u) - 1)`, with its limit `1 / r0` at `u = 0`.
pub fn lst_integrand(cfg: &ModelConfig, u: f64) -> Result<f64> {
    let r = cfg.kernel.exponential_rate().ok_or_else(|| {
        HawkesError::Config("the stationary intensity transform needs an exponential excitation kernel".into())
    })?;
    if u == 0.0 {
        return Ok(1.0 / (r - cfg.marks.mean()));
    }
    Ok(u / (r * u + cfg.marks.lst_minus_one(u)))
}

/// `E e^{-sΛ} = exp(-λ∞ r ∫_0^s u / (r u + β(u) - 1) du)` for the stationary intensity.
pub fn stationary_lambda_lst(cfg: &ModelConfig, s: f64) -> Result<f64> {
    stable_load(cfg)?;
    if !(s >= 0.0 && s.is_finite()) {
        return Err(HawkesError::Domain(format!("transform argument must be finite and >= 0, got {s}")));
    }
    let r = cfg.kernel.exponential_rate().ok_or_else(|| {
        HawkesError::Config("the stationary intensity transform needs an exponential excitation kernel".into())
    })?;
    if s == 0.0 {
        return Ok(1.0);
    }
    let f = |u: f64| lst_integrand(cfg, u).unwrap_or(f64::NAN);
    let integral = adaptive_simpson(&f, 0.0, s, 1e-13 * s.max(1.0));
    if !integral.is_finite() {
        return Err(HawkesError::Numeric(format!("stationary intensity transform diverged at s = {s}")));
    }
    Ok((-cfg.lambda_inf * r * integral).exp())
}

/// LST of `(1 - ρ)Λ` at `s`.
pub fn scaled_lambda_lst(cfg: &ModelConfig, s: f64) -> Result<f64> {
    let rho = stable_load(cfg)?;
    stationary_lambda_lst(cfg, (1.0 - rho) * s)
}

/// Same model with marks rescaled so that the load equals `rho`.
pub fn with_load(cfg: &ModelConfig, rho: f64) -> Result<ModelConfig> {
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(HawkesError::Config(format!("target load must be positive, got {rho}")));
    }
    let factor = rho / cfg.load_summary().rho;
    let marks = match cfg.marks {
        MarkDistribution::Deterministic { value } => MarkDistribution::Deterministic { value: value * factor },
        MarkDistribution::Exponential { rate } => MarkDistribution::Exponential { rate: rate / factor },
        MarkDistribution::Pareto { alpha, scale } => MarkDistribution::Pareto { alpha, scale: scale * factor },
    };
    ModelConfig::new(cfg.lambda_inf, cfg.kernel.clone(), marks, cfg.service.clone())
}

/// `sup_{s ∈ grid} |LST of (1-ρ)Λ - Gamma limit LST|`.
pub fn lambda_lst_gap(cfg: &ModelConfig, s_grid: &[f64]) -> Result<f64> {
    let limit = heavy_traffic_gamma(cfg, HeavyTrafficTarget::Lambda)?;
    s_grid.iter().try_fold(0.0f64, |acc, &s| Ok(acc.max((scaled_lambda_lst(cfg, s)? - limit.lst(s)).abs())))
}

/// Empirical LST of `(1 - ρ)N` under stationarity, with batch-means standard errors.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalLst {
    pub s: Vec<f64>,
    pub mean: Vec<f64>,
    pub std_error: Vec<f64>,
    pub samples: usize,
}

/// Samples `N` along long Markov paths: one path per batch, burn-in `20 / min(r0, μ)`, then
/// `samples_per_batch` observations spaced `2 / min(r0, μ)` apart. Batch `b` uses stream `(b, 0)`
/// of `seed`, so the estimate does not depend on scheduling.
pub fn empirical_scaled_occupancy_lst(
    cfg: &ModelConfig,
    s_grid: &[f64],
    batches: usize,
    samples_per_batch: usize,
    seed: u64,
) -> Result<EmpiricalLst> {
    let rho = stable_load(cfg)?;
    let (r, mu) = cfg.markov_rates()?;
    if batches < 2 || samples_per_batch < 1 {
        return Err(HawkesError::Config(format!(
            "need at least two batches with one sample each, got {batches} x {samples_per_batch}"
        )));
    }
    let slow = (r - cfg.marks.mean()).min(mu);
    let (burn_in, spacing) = (20.0 / slow, 2.0 / slow);
    let per_batch: Vec<Vec<f64>> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut path = MarkovQueuePath::new(cfg, run_rng(seed, b as u64, 0))?
                .with_event_cap(crate::sim::DEFAULT_EVENT_CAP as u64 * 100);
            path.advance(burn_in)?;
            let mut acc = vec![0.0; s_grid.len()];
            for _ in 0..samples_per_batch {
                let x = (1.0 - rho) * path.advance(spacing)? as f64;
                for (a, s) in acc.iter_mut().zip(s_grid) {
                    *a += (-s * x).exp();
                }
            }
            Ok(acc.into_iter().map(|a| a / samples_per_batch as f64).collect())
        })
        .collect::<Vec<Result<_>>>()
        .into_iter()
        .collect::<Result<_>>()?;
    let nb = batches as f64;
    let mut mean = Vec::with_capacity(s_grid.len());
    let mut std_error = Vec::with_capacity(s_grid.len());
    for i in 0..s_grid.len() {
        let m = per_batch.iter().map(|b| b[i]).sum::<f64>() / nb;
        let var = per_batch.iter().map(|b| (b[i] - m).powi(2)).sum::<f64>() / (nb - 1.0);
        mean.push(m);
        std_error.push((var / nb).sqrt());
    }
    Ok(EmpiricalLst { s: s_grid.to_vec(), mean, std_error, samples: batches * samples_per_batch })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ServiceDistribution;

    #[test]
    fn r1_marching_matches_closed_form() {
        let cfg = ModelConfig::table1();
        let sol = r1_volterra(&cfg, 10.0, 10.0 / 4096.0).unwrap();
        assert_eq!(sol.values[0], 1.0);
        for (i, v) in sol.values.iter().enumerate() {
            let exact = r1_closed_exp(&cfg, sol.grid.point(i)).unwrap();
            assert!((v - exact).abs() < 1e-6, "u={}", sol.grid.point(i));
        }
        assert!((r1_closed_exp(&cfg, 0.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(r1_closed_exp(&cfg, 80.0).unwrap() < 1e-30);
    }

    #[test]
    fn r1_closed_form_matches_printed_expression() {
        let cfg = ModelConfig::table1();
        let (r, mu, b1) = (2.15, 1.25, 0.98);
        let r0: f64 = r - b1;
        for &u in &[0.1, 1.0, 4.0] {
            let printed = ((r - mu) * (-mu * u).exp() - b1 * (-r0 * u).exp()) / (r0 - mu);
            assert!((r1_closed_exp(&cfg, u).unwrap() - printed).abs() < 1e-12);
        }
    }

    #[test]
    fn neumann_and_marching_agree() {
        let cfg = ModelConfig::table1();
        let a = r1_volterra(&cfg, 10.0, 10.0 / 1024.0).unwrap();
        let b = r1_neumann(&cfg, 10.0, 10.0 / 1024.0, 40).unwrap();
        let tol = b.error_bound.max(1e-6);
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!((x - y).abs() <= tol);
        }
    }

    #[test]
    fn no_offspring_gives_survival() {
        let mut cfg = ModelConfig::table1();
        cfg.marks = MarkDistribution::Deterministic { value: 0.0 };
        let sol = r1_volterra(&cfg, 5.0, 0.01).unwrap();
        for (i, v) in sol.values.iter().enumerate() {
            assert!((v - cfg.service.survival(sol.grid.point(i))).abs() < 1e-15);
        }
    }

    #[test]
    fn r1_integral_values() {
        let cfg = ModelConfig::table1();
        let exact = r1_integral_infty(&cfg).unwrap();
        assert!((exact - 1.47009).abs() < 1e-5);
        let (quad, tail) = r1_integral_truncated(&cfg, 1e-3).unwrap();
        assert!((quad - exact).abs() < 1e-3 + tail);
        let mut light = cfg.clone();
        light.marks = MarkDistribution::Deterministic { value: 1e-12 };
        assert!((r1_integral_infty(&light).unwrap() - 0.8).abs() < 1e-9);
    }

    #[test]
    fn ralpha_integral_sign_and_quadrature() {
        let spec = HeavyTailSpec::new(1.5, 1.0).unwrap();
        for &(r, mu) in &[(2.15, 1.25), (2.15, 0.5), (3.0, 2.9)] {
            let cfg = ModelConfig::markovian(1.45, r, mu, MarkDistribution::Deterministic { value: 0.98 }).unwrap();
            let v = ralpha_integral_infty(&cfg, &spec).unwrap();
            assert!(v < 0.0);
            let r0 = r - 0.98;
            let f = |s: f64| ((-r0 * s).exp() - (-mu * s).exp()).abs().powf(1.5) / (mu - r0).abs().powf(1.5);
            let rho = 0.98 / r;
            let quad = gamma(-0.5) / (1.0 - rho) * adaptive_simpson(&f, 0.0, 60.0 / mu.min(r0), 1e-14);
            assert!(((v - quad) / quad).abs() < 1e-6, "r={r} mu={mu}: {v} vs {quad}");
        }
        let pole = ModelConfig::markovian(1.0, 2.0, 1.0, MarkDistribution::Deterministic { value: 1.0 }).unwrap();
        assert!(ralpha_integral_infty(&pole, &spec).is_err());
    }

    #[test]
    fn beta_recurrence_at_used_arguments() {
        let cfg = ModelConfig::table1();
        let r0 = 2.15 - 0.98;
        let p = 1.5 * r0 / (1.25 - r0) + 1.0;
        let q = 2.5;
        let lhs = p * ln_beta(p, q).exp();
        let rhs = (p + q) * ln_beta(p + 1.0, q).exp();
        assert!(((lhs - rhs) / rhs).abs() < 1e-12);
        assert!(ralpha_integral_infty(&cfg, &HeavyTailSpec::new(1.5, 1.0).unwrap()).is_ok());
    }

    #[test]
    fn ralpha_without_offspring_is_forcing() {
        let mut cfg = ModelConfig::markovian(1.0, 2.0, 1.0, MarkDistribution::Deterministic { value: 1.0 }).unwrap();
        cfg.marks = MarkDistribution::Deterministic { value: 0.0 };
        let spec = HeavyTailSpec::new(1.5, 1.0).unwrap();
        let step = 5.0 / 1024.0;
        let sol = ralpha_volterra(&cfg, &spec, 5.0, step).unwrap();
        let grid = sol.grid;
        let h: Vec<f64> = grid.points().map(|u| cfg.kernel.density(u)).collect();
        let j: Vec<f64> = grid.points().map(|u| cfg.service.survival(u)).collect();
        let conv = convolve_trapezoid(&h, &j, grid.step());
        for (v, c) in sol.values.iter().zip(conv) {
            assert!((v - gamma(-0.5) * c.powf(1.5)).abs() < 1e-14);
        }
    }

    #[test]
    fn ralpha_is_nonpositive() {
        let cfg = ModelConfig::markovian(1.0, 2.0, 1.0, MarkDistribution::Pareto { alpha: 1.5, scale: 0.2 }).unwrap();
        let spec = cfg.marks.heavy_tail().unwrap();
        let sol = ralpha_volterra(&cfg, &spec, 10.0, 10.0 / 512.0).unwrap();
        assert!(sol.values.iter().all(|v| *v <= 0.0));
        let e = tail_pgf_expansion(&cfg, &spec, 10.0, 10.0 / 512.0).unwrap();
        assert!(e.alpha_coeff <= 0.0 && e.linear_coeff > 0.0);
    }

    #[test]
    fn gamma_limit_values() {
        let cfg = ModelConfig::table1();
        let l = heavy_traffic_gamma(&cfg, HeavyTrafficTarget::Lambda).unwrap();
        assert!((l.shape - 6.49209).abs() < 1e-5);
        assert!((l.rate - 4.47730).abs() < 1e-5);
        assert!((l.mean() - 1.45).abs() < 1e-12);
        let n = heavy_traffic_gamma(&cfg, HeavyTrafficTarget::N).unwrap();
        assert_eq!(n.rate, 1.25 * l.rate);
        let heavy = ModelConfig::markovian(1.0, 2.0, 1.0, MarkDistribution::Pareto { alpha: 1.5, scale: 0.2 }).unwrap();
        assert!(matches!(
            heavy_traffic_gamma(&heavy, HeavyTrafficTarget::Lambda),
            Err(HawkesError::MomentUnavailable { order: 2 })
        ));
    }

    #[test]
    fn stationary_lst_behaviour() {
        let cfg = ModelConfig::table1();
        assert_eq!(stationary_lambda_lst(&cfg, 0.0).unwrap(), 1.0);
        let h = 1e-4;
        // second-order one-sided difference at 0 gives -E Λ
        let f1 = stationary_lambda_lst(&cfg, h).unwrap();
        let f2 = stationary_lambda_lst(&cfg, 2.0 * h).unwrap();
        let deriv = -(4.0 * f1 - f2 - 3.0) / (2.0 * h);
        assert!((deriv - 2.66453).abs() < 1e-4, "{deriv}");
        let limit = lst_integrand(&cfg, 0.0).unwrap();
        let near = lst_integrand(&cfg, 1e-6).unwrap();
        assert!(((near - limit) / limit).abs() < 1e-4);
        let unstable = ModelConfig::markovian(1.0, 2.0, 1.0, MarkDistribution::Deterministic { value: 2.5 }).unwrap();
        assert!(matches!(stationary_lambda_lst(&unstable, 1.0), Err(HawkesError::Instability { .. })));
    }

    #[test]
    fn gamma_moments_match_heavy_traffic_limits() {
        let base = ModelConfig::table1();
        let cfg = with_load(&base, 1.0 - 1e-6).unwrap();
        let rho = cfg.load_summary().rho;
        let s = crate::moments::stationary_summary(&cfg).unwrap();
        let g = heavy_traffic_gamma(&cfg, HeavyTrafficTarget::Lambda).unwrap();
        assert!(((1.0 - rho) * s.mean_lambda - g.mean()).abs() < 1e-5);
        assert!(((1.0 - rho).powi(2) * s.var_lambda - g.variance()).abs() < 1e-5);
    }

    #[test]
    fn heavy_traffic_gap_shrinks() {
        let base = ModelConfig::table1();
        let grid: Vec<f64> = (0..=50).map(|i| i as f64 * 0.1).collect();
        let g9 = lambda_lst_gap(&with_load(&base, 0.9).unwrap(), &grid).unwrap();
        let g99 = lambda_lst_gap(&with_load(&base, 0.99).unwrap(), &grid).unwrap();
        assert!(g99 < g9 && g99 < 0.02, "{g9} {g99}");
    }

    #[test]
    fn empirical_lst_at_moderate_load() {
        // at ρ ≈ 0.46 the stationary mean is known; the empirical LST slope at 0 must match it
        let cfg = ModelConfig::table1();
        let rho = cfg.load_summary().rho;
        let est = empirical_scaled_occupancy_lst(&cfg, &[0.0, 0.01], 8, 400, 3).unwrap();
        assert_eq!(est.mean[0], 1.0);
        let slope = (1.0 - est.mean[1]) / 0.01 / (1.0 - rho);
        let exact = crate::moments::stationary_summary(&cfg).unwrap().mean_n;
        assert!((slope - exact).abs() < 0.15, "{slope} vs {exact}");
        let again = empirical_scaled_occupancy_lst(&cfg, &[0.0, 0.01], 8, 400, 3).unwrap();
        assert_eq!(est, again);
    }

    #[test]
    fn with_load_scales_marks() {
        let base = ModelConfig::table1();
        let cfg = with_load(&base, 0.9).unwrap();
        assert!((cfg.load_summary().rho - 0.9).abs() < 1e-12);
        assert_eq!(cfg.service, ServiceDistribution::Exponential { rate: 1.25 });
    }
}
