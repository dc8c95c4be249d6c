//! Joint transform `ζ(t, z, s) = E z^{N(t)} e^{-sΛ(t)}` from the characteristic ODE.
//!
//! Along the characteristic the transform variable obeys
//! `s'(u) = 1 - r s(u) - (1 + (z - 1) e^{-μu}) β(s(u))` with `s(0) = s`, and
//! `ζ = exp(-λ∞ s(t) - λ∞ r ∫_0^t s(u) du)`.

use num_complex::Complex64;

use crate::error::{HawkesError, Result};
use crate::grid::TimeGrid;
use crate::model::{MarkDistribution, ModelConfig};

/// ODE step used for the reference tables.
pub const DEFAULT_ODE_STEP: f64 = 1e-4;

/// How far `Re s(u)` may dip below zero before the path is declared unstable.
pub const REAL_PART_GUARD: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct CharacteristicPath {
    pub grid: TimeGrid,
    pub s_values: Vec<Complex64>,
    pub s_integral: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformValue {
    pub value: Complex64,
    pub steps: usize,
    /// Step-doubling estimate of the local error on the first and last step pairs.
    pub local_error: f64,
}

#[derive(Clone, Copy)]
struct Characteristic<'a> {
    r: f64,
    mu: f64,
    z: Complex64,
    marks: &'a MarkDistribution,
}

impl Characteristic<'_> {
    fn rhs(&self, u: f64, s: Complex64) -> Complex64 {
        let coeff = 1.0 + (self.z - 1.0) * (-self.mu * u).exp();
        1.0 - self.r * s - coeff * self.marks.lst_unchecked(s)
    }

    /// One RK4 step on the augmented state `(s, ∫s)`.
    fn step(&self, u: f64, h: f64, s: Complex64, acc: Complex64) -> (Complex64, Complex64) {
        let k1 = self.rhs(u, s);
        let s2 = s + 0.5 * h * k1;
        let k2 = self.rhs(u + 0.5 * h, s2);
        let s3 = s + 0.5 * h * k2;
        let k3 = self.rhs(u + 0.5 * h, s3);
        let s4 = s + h * k3;
        let k4 = self.rhs(u + h, s4);
        let next = s + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        let acc_next = acc + h / 6.0 * (s + 2.0 * (s2 + s3) + s4);
        (next, acc_next)
    }

    fn doubling_error(&self, u: f64, h: f64, s: Complex64) -> f64 {
        let (a, _) = self.step(u, h, s, Complex64::default());
        let (b, _) = self.step(u + h, h, a, Complex64::default());
        let (c, _) = self.step(u, 2.0 * h, s, Complex64::default());
        (b - c).norm() / 15.0
    }
}

fn check_inputs(cfg: &ModelConfig, t: f64, z: Complex64, s: Complex64, step: f64) -> Result<(f64, f64)> {
    let rates = cfg.markov_rates()?;
    if !(t >= 0.0 && t.is_finite()) {
        return Err(HawkesError::Domain(format!("time horizon must be finite and >= 0, got {t}")));
    }
    if !(step > 0.0 && step.is_finite()) {
        return Err(HawkesError::Domain(format!("ODE step must be positive, got {step}")));
    }
    if !(z.norm() <= 1.0 + 1e-12) {
        return Err(HawkesError::Domain(format!("transform needs |z| <= 1, got {z}")));
    }
    if !(s.re >= 0.0 && s.im.is_finite() && s.re.is_finite()) {
        return Err(HawkesError::Domain(format!("transform needs Re(s) >= 0, got {s}")));
    }
    Ok(rates)
}

fn guard(u: f64, s: Complex64) -> Result<()> {
    if s.re < -REAL_PART_GUARD || !s.re.is_finite() || !s.im.is_finite() {
        return Err(HawkesError::Numeric(format!(
            "characteristic path left the half plane Re(s) >= 0 at u = {u}: s = {s}"
        )));
    }
    Ok(())
}

/// Integrates the characteristic and keeps the full path.
pub fn solve_characteristic(
    cfg: &ModelConfig,
    t: f64,
    z: Complex64,
    s: Complex64,
    step: f64,
) -> Result<CharacteristicPath> {
    let (r, mu) = check_inputs(cfg, t, z, s, step)?;
    let ch = Characteristic { r, mu, z, marks: &cfg.marks };
    let grid = TimeGrid::with_max_step(t, step)?;
    let h = grid.step();
    let mut values = Vec::with_capacity(grid.len());
    values.push(s);
    let (mut cur, mut acc) = (s, Complex64::default());
    for i in 0..grid.intervals() {
        let u = i as f64 * h;
        (cur, acc) = ch.step(u, h, cur, acc);
        guard(u + h, cur)?;
        values.push(cur);
    }
    Ok(CharacteristicPath { grid, s_values: values, s_integral: acc })
}

/// `ζ(t, z, s)` without storing the path.
pub fn joint_transform(cfg: &ModelConfig, t: f64, z: Complex64, s: Complex64, step: f64) -> Result<TransformValue> {
    let (r, mu) = check_inputs(cfg, t, z, s, step)?;
    let lam = cfg.lambda_inf;
    if t == 0.0 {
        return Ok(TransformValue { value: (-s * lam).exp(), steps: 0, local_error: 0.0 });
    }
    let ch = Characteristic { r, mu, z, marks: &cfg.marks };
    let n = (t / step - 1e-9).ceil().max(1.0) as usize;
    let h = t / n as f64;
    let (mut cur, mut acc) = (s, Complex64::default());
    let mut local_error = 0.0f64;
    for i in 0..n {
        let u = i as f64 * h;
        if n >= 2 && (i == 0 || i == n - 2) {
            local_error = local_error.max(ch.doubling_error(u, h, cur));
        }
        (cur, acc) = ch.step(u, h, cur, acc);
        guard(u + h, cur)?;
    }
    let value = (-lam * cur - lam * r * acc).exp();
    Ok(TransformValue { value, steps: n, local_error })
}

/// PGF of `N(t)`: the transform at `s = 0`.
pub fn pgf_n_markov(cfg: &ModelConfig, t: f64, z: Complex64, step: f64) -> Result<Complex64> {
    joint_transform(cfg, t, z, Complex64::default(), step).map(|v| v.value)
}
