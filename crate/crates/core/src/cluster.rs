//! Fixed point of the cluster transform `η(u, z) = E z^{S(u)}` and the compound PGF of `N(t)`.
//!
//! `φ(f)(u) = (1 - 𝒥(u) + 𝒥(u) z) β(∫_0^u h(s)(1 - f(u - s)) ds)` and
//! `E z^{N(t)} = exp(λ∞ ∫_0^t (η(u, z) - 1) du)`. Starting from `f ≡ 1` the iterates decrease to
//! `η` for real `z`, from `f ≡ 0` they increase; these two chains give the CDF bounds.

use num_complex::Complex64;
use statrs::function::gamma::ln_gamma;

use crate::error::{HawkesError, Result};
use crate::grid::{trapezoid, GridFunction, TimeGrid};
use crate::model::ModelConfig;

pub const DEFAULT_ITERATIONS: usize = 10;
pub const DEFAULT_GRID_EXPONENT: u32 = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Seed {
    /// `f ≡ 1`: PGF of an empty cluster, yields the upper CDF chain.
    One,
    /// `f ≡ 0`: yields the lower CDF chain.
    Zero,
}

impl Seed {
    fn value(self) -> Complex64 {
        match self {
            Seed::One => Complex64::new(1.0, 0.0),
            Seed::Zero => Complex64::new(0.0, 0.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusterSettings {
    pub iterations: usize,
    /// Grid step is `t * 2^-grid_exponent`.
    pub grid_exponent: u32,
    /// Stop early once the successive-difference sup-norm drops below this.
    pub tolerance: Option<f64>,
}

impl Default for ClusterSettings {
    fn default() -> Self {
        Self { iterations: DEFAULT_ITERATIONS, grid_exponent: DEFAULT_GRID_EXPONENT, tolerance: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EtaGrid {
    pub z: Complex64,
    pub eta: GridFunction,
    pub iteration_count: usize,
    /// `(C t)^n / n!` with `C = 2 b₁ H(∞)`.
    pub apriori_error: f64,
    /// `sup |f_k - f_{k-1}|` for `k = 1..=n`.
    pub successive_differences: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundPair {
    pub upper_eta: EtaGrid,
    pub lower_eta: EtaGrid,
    pub n: usize,
}

/// `(C t)^n / n!`, evaluated in log space.
pub fn apriori_bound(constant: f64, t: f64, n: usize) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let x = constant * t;
    if x == 0.0 {
        return 0.0;
    }
    (n as f64 * x.ln() - ln_gamma(n as f64 + 1.0)).exp()
}

/// `φ` discretized on a fixed uniform grid, with kernel and survival samples cached.
#[derive(Debug, Clone)]
pub struct FixedPointOperator<'a> {
    cfg: &'a ModelConfig,
    grid: TimeGrid,
    kernel: Vec<f64>,
    survival: Vec<f64>,
}

impl<'a> FixedPointOperator<'a> {
    pub fn new(cfg: &'a ModelConfig, grid: TimeGrid) -> Result<Self> {
        let b1 = cfg.marks.mean();
        let mass = cfg.kernel.total_mass();
        if !(b1.is_finite() && mass.is_finite()) {
            return Err(HawkesError::Domain(format!(
                "the cluster fixed point needs E B and ∫h finite (E B = {b1}, ∫h = {mass})"
            )));
        }
        let kernel = grid.points().map(|u| cfg.kernel.density(u)).collect();
        let survival = grid.points().map(|u| cfg.service.survival(u)).collect();
        Ok(Self { cfg, grid, kernel, survival })
    }

    pub fn for_horizon(cfg: &'a ModelConfig, t: f64, grid_exponent: u32) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(HawkesError::Domain(format!("horizon must be positive and finite, got {t}")));
        }
        Self::new(cfg, TimeGrid::dyadic(t, grid_exponent)?)
    }

    pub fn grid(&self) -> TimeGrid {
        self.grid
    }

    /// `C = 2 b₁ H(∞)` from the contraction argument.
    pub fn contraction_constant(&self) -> f64 {
        2.0 * self.cfg.marks.mean() * self.cfg.kernel.total_mass()
    }

    pub fn apply(&self, f: &GridFunction, z: Complex64) -> Result<GridFunction> {
        if f.grid != self.grid || f.values.len() != self.grid.len() {
            return Err(HawkesError::GridMismatch { expected: self.grid.describe(), found: f.grid.describe() });
        }
        Ok(GridFunction { grid: self.grid, values: self.apply_values(&f.values, z) })
    }

    fn apply_values(&self, f: &[Complex64], z: Complex64) -> Vec<Complex64> {
        let n = f.len();
        let step = self.grid.step();
        // 1 - f, reversed so each convolution is a forward dot product
        let rev_re: Vec<f64> = f.iter().rev().map(|v| 1.0 - v.re).collect();
        let rev_im: Vec<f64> = f.iter().rev().map(|v| -v.im).collect();
        let h = &self.kernel;
        (0..n)
            .map(|i| {
                let arg = if i == 0 {
                    Complex64::default()
                } else {
                    // Σ_{j=1}^{i-1} h_j g_{i-j}; g_{i-j} = rev[n-1-i+j]
                    let lo = n - i;
                    let (re, im) = dot2(&h[1..i], &rev_re[lo..n - 1], &rev_im[lo..n - 1]);
                    let g_i = Complex64::new(rev_re[n - 1 - i], rev_im[n - 1 - i]);
                    let g_0 = Complex64::new(rev_re[n - 1], rev_im[n - 1]);
                    (Complex64::new(re, im) + 0.5 * (h[0] * g_i + h[i] * g_0)) * step
                };
                let j = self.survival[i];
                let prefactor = (1.0 - j) + j * z;
                prefactor * self.cfg.marks.lst_unchecked(Complex64::new(arg.re.max(0.0), arg.im))
            })
            .collect()
    }

    /// Runs the chain from `seed`, keeping every iterate (index 0 is the seed).
    pub fn chain(&self, z: Complex64, seed: Seed, n: usize) -> Vec<Vec<Complex64>> {
        let mut out = Vec::with_capacity(n + 1);
        out.push(vec![seed.value(); self.grid.len()]);
        for k in 0..n {
            let next = self.apply_values(&out[k], z);
            out.push(next);
        }
        out
    }

    pub fn solve(&self, z: Complex64, seed: Seed, settings: &ClusterSettings) -> Result<EtaGrid> {
        check_z(z)?;
        let mut cur = vec![seed.value(); self.grid.len()];
        let mut diffs = Vec::new();
        for _ in 0..settings.iterations {
            let next = self.apply_values(&cur, z);
            let d = next.iter().zip(&cur).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            cur = next;
            diffs.push(d);
            if settings.tolerance.is_some_and(|tol| d < tol) {
                break;
            }
        }
        let n = diffs.len();
        Ok(EtaGrid {
            z,
            eta: GridFunction { grid: self.grid, values: cur },
            iteration_count: n,
            apriori_error: apriori_bound(self.contraction_constant(), self.grid.end(), n),
            successive_differences: diffs,
        })
    }

    /// `exp(λ∞ ∫ (η - 1))` by the trapezoid rule on the operator grid.
    pub fn pgf_from_eta(&self, eta: &[Complex64]) -> Complex64 {
        let shifted: Vec<Complex64> = eta.iter().map(|v| v - 1.0).collect();
        (self.cfg.lambda_inf * trapezoid(&shifted, self.grid.step())).exp()
    }

    pub fn bounds(&self, z: Complex64, n: usize) -> Result<BoundPair> {
        let settings = ClusterSettings { iterations: n, tolerance: None, ..Default::default() };
        Ok(BoundPair {
            upper_eta: self.solve(z, Seed::One, &settings)?,
            lower_eta: self.solve(z, Seed::Zero, &settings)?,
            n,
        })
    }
}

/// `E z^{N(t)} - 1` for real `z ∈ [0, 1]`, iterating on the deficit `d = 1 - η` in real
/// arithmetic so that values of `z` close to one keep their relative accuracy.
///
/// Starts from `d ≡ 0` and stops once the sup-norm change falls below `tolerance` times the
/// current sup-norm, or after `max_iterations`.
pub fn pgf_minus_one_real(
    cfg: &ModelConfig,
    t: f64,
    z: f64,
    grid_exponent: u32,
    tolerance: f64,
    max_iterations: usize,
) -> Result<f64> {
    if !(0.0..=1.0).contains(&z) {
        return Err(HawkesError::Domain(format!("real deficit iteration needs z in [0, 1], got {z}")));
    }
    let op = FixedPointOperator::for_horizon(cfg, t, grid_exponent)?;
    let step = op.grid.step();
    let n = op.grid.len();
    let mut d = vec![0.0f64; n];
    for _ in 0..max_iterations {
        let conv = crate::grid::convolve_trapezoid(&op.kernel, &d, step);
        let next: Vec<f64> = (0..n)
            .map(|i| {
                let a = op.survival[i] * (1.0 - z);
                let m = cfg.marks.lst_minus_one(conv[i].max(0.0));
                a - m + a * m
            })
            .collect();
        let change = next.iter().zip(&d).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        let size = next.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        d = next;
        if change <= tolerance * size {
            return Ok((-cfg.lambda_inf * trapezoid(&d, step)).exp_m1());
        }
    }
    Err(HawkesError::Numeric(format!(
        "cluster deficit iteration did not reach relative tolerance {tolerance:e} in {max_iterations} steps"
    )))
}

/// `sum(a * b_re), sum(a * b_im)` with four independent accumulators.
fn dot2(a: &[f64], b_re: &[f64], b_im: &[f64]) -> (f64, f64) {
    let mut re = [0.0f64; 4];
    let mut im = [0.0f64; 4];
    let chunks = a.len() / 4;
    for c in 0..chunks {
        let k = 4 * c;
        for l in 0..4 {
            re[l] += a[k + l] * b_re[k + l];
            im[l] += a[k + l] * b_im[k + l];
        }
    }
    let (mut sr, mut si) = ((re[0] + re[1]) + (re[2] + re[3]), (im[0] + im[1]) + (im[2] + im[3]));
    for k in 4 * chunks..a.len() {
        sr += a[k] * b_re[k];
        si += a[k] * b_im[k];
    }
    (sr, si)
}

fn check_z(z: Complex64) -> Result<()> {
    if !(z.norm() <= 1.0 + 1e-12) {
        return Err(HawkesError::Domain(format!("cluster transform needs |z| <= 1, got {z}")));
    }
    Ok(())
}

/// One application of `φ` to `f` on `f`'s own grid.
pub fn phi_apply(cfg: &ModelConfig, f: &GridFunction, z: Complex64) -> Result<GridFunction> {
    check_z(z)?;
    FixedPointOperator::new(cfg, f.grid)?.apply(f, z)
}

pub fn solve_eta(cfg: &ModelConfig, t: f64, z: Complex64, seed: Seed, settings: &ClusterSettings) -> Result<EtaGrid> {
    FixedPointOperator::for_horizon(cfg, t, settings.grid_exponent)?.solve(z, seed, settings)
}

/// `E z^{N(t)}` from the `seed` chain after `settings.iterations` applications.
pub fn pgf_n_cluster(cfg: &ModelConfig, t: f64, z: Complex64, seed: Seed, settings: &ClusterSettings) -> Result<Complex64> {
    let op = FixedPointOperator::for_horizon(cfg, t, settings.grid_exponent)?;
    let eta = op.solve(z, seed, settings)?;
    Ok(op.pgf_from_eta(&eta.eta.values))
}

pub fn eta_bounds(cfg: &ModelConfig, t: f64, z: Complex64, n: usize) -> Result<BoundPair> {
    FixedPointOperator::for_horizon(cfg, t, DEFAULT_GRID_EXPONENT)?.bounds(z, n)
}
