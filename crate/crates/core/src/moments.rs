//! Transient and stationary joint moments of `(Λ(t), N(t))`.
//!
//! With `N̄^m = N (N - 1) ... (N - m)` and `N̄^{-1} = 1`, the vector of order `q` stacks
//! `E Λ^k N̄^{q-k}` for `k = 0..=q+1`. It obeys `Z' = A1 Z + A0(t)` where `A0` only involves
//! orders below `q`, so the whole hierarchy is one triangular linear system.

use nalgebra::{DMatrix, DVector};

use crate::error::{HawkesError, Result};
use crate::markov::DEFAULT_ODE_STEP;
use crate::model::ModelConfig;

/// Eigenvalue gaps below this make the interpolation formula unusable.
pub const EIGEN_GAP: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct MomentVector {
    pub order: usize,
    pub t: f64,
    /// `[E N̄^q, E Λ N̄^{q-1}, ..., E Λ^q N̄^0, E Λ^{q+1}]`.
    pub entries: Vec<f64>,
}

impl MomentVector {
    pub fn initial(order: usize, lambda_inf: f64) -> Self {
        let mut entries = vec![0.0; order + 2];
        entries[order + 1] = lambda_inf.powi(order as i32 + 1);
        Self { order, t: 0.0, entries }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentSystem {
    order: usize,
    lambda_inf: f64,
    r: f64,
    mu: f64,
    /// `b[g] = E B^g` for `g = 0..=order+1`.
    b: Vec<f64>,
    a1: DMatrix<f64>,
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Assembles `A1` and the forcing coefficients of order `q`.
pub fn build_moment_system(cfg: &ModelConfig, q: usize) -> Result<MomentSystem> {
    let (r, mu) = cfg.markov_rates()?;
    let b = (0..=q as u32 + 1).map(|g| cfg.marks.require_moment(g)).collect::<Result<Vec<_>>>()?;
    let r0 = r - b[1];
    let n = q + 2;
    let mut a1 = DMatrix::zeros(n, n);
    for k in 0..n {
        a1[(k, k)] = -((q + 1 - k) as f64 * mu + k as f64 * r0);
        if k + 1 < n {
            a1[(k, k + 1)] = (q + 1 - k) as f64;
        }
    }
    Ok(MomentSystem { order: q, lambda_inf: cfg.lambda_inf, r, mu, b, a1 })
}

impl MomentSystem {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn a1(&self) -> &DMatrix<f64> {
        &self.a1
    }

    /// Diagonal of `A1`, i.e. `-d_k` for `k = 0..=q+1`.
    pub fn eigenvalues(&self) -> Vec<f64> {
        (0..self.order + 2).map(|k| self.a1[(k, k)]).collect()
    }

    pub fn min_eigen_gap(&self) -> f64 {
        let ev = self.eigenvalues();
        let mut gap = f64::INFINITY;
        for i in 0..ev.len() {
            for j in 0..i {
                gap = gap.min((ev[i] - ev[j]).abs());
            }
        }
        gap
    }

    /// `A0` given a lookup `(g, m) -> E Λ^g N̄^m` for lower orders (`m >= -1`).
    /// The constant `E Λ^0 N̄^{-1} = 1` is supplied here and never requested from `lower`.
    pub fn forcing<F: Fn(usize, i64) -> f64>(&self, lower: F) -> Vec<f64> {
        let lower = |g: usize, m: i64| if g == 0 && m == -1 { 1.0 } else { lower(g, m) };
        let q = self.order as i64;
        let (lam, r, b) = (self.lambda_inf, self.r, &self.b);
        (0..self.order + 2)
            .map(|k| {
                let ki = k as i64;
                let tail = q - ki + 1;
                let mut v = 0.0;
                if k >= 1 {
                    v += ki as f64 * lam * r * lower(k - 1, q - ki);
                }
                if tail != 0 && k >= 1 {
                    v += (tail * ki) as f64 * b[1] * lower(k, q - ki - 1);
                }
                if k >= 2 {
                    for j in 0..=k - 2 {
                        let w = binomial(k, j) * b[k - j];
                        let mut inner = lower(j + 1, q - ki);
                        if tail != 0 {
                            inner += tail as f64 * lower(j + 1, q - ki - 1);
                        }
                        v += w * inner;
                    }
                }
                v
            })
            .collect()
    }

    /// `e^{A1 t}` by the Lagrange interpolation product over the distinct eigenvalues.
    pub fn exp_a1(&self, t: f64) -> Result<DMatrix<f64>> {
        if self.min_eigen_gap() <= EIGEN_GAP {
            return Err(HawkesError::Numeric(format!(
                "eigenvalues of A1 are not separated (gap {:e}); use the ODE route",
                self.min_eigen_gap()
            )));
        }
        Ok(interpolation_exp(&self.a1, &self.eigenvalues(), t))
    }
}

/// `e^{At} = Σ_i e^{λ_i t} Π_{j≠i} (A - λ_j I)/(λ_i - λ_j)` for distinct eigenvalues `λ`.
pub fn interpolation_exp(a: &DMatrix<f64>, eigenvalues: &[f64], t: f64) -> DMatrix<f64> {
    let n = a.nrows();
    let id = DMatrix::<f64>::identity(n, n);
    let mut out = DMatrix::zeros(n, n);
    for (i, &li) in eigenvalues.iter().enumerate() {
        let mut term = id.clone() * (li * t).exp();
        for (j, &lj) in eigenvalues.iter().enumerate() {
            if i != j {
                term = term * ((a - &id * lj) / (li - lj));
            }
        }
        out += term;
    }
    out
}

fn lookup(state: &[Vec<f64>], g: usize, m: i64) -> f64 {
    if g == 0 && m == -1 {
        return 1.0;
    }
    let order = g as i64 + m;
    debug_assert!(order >= 0 && m >= -1, "moment ({g}, {m}) is not part of the hierarchy");
    state[order as usize][g]
}

fn hierarchy_rhs(systems: &[MomentSystem], state: &[Vec<f64>]) -> Vec<Vec<f64>> {
    systems
        .iter()
        .zip(state)
        .map(|(sys, z)| {
            let mut dz = sys.forcing(|g, m| lookup(state, g, m));
            let n = z.len();
            for k in 0..n {
                dz[k] += sys.a1[(k, k)] * z[k];
                if k + 1 < n {
                    dz[k] += sys.a1[(k, k + 1)] * z[k + 1];
                }
            }
            dz
        })
        .collect()
}

fn shifted(state: &[Vec<f64>], dir: &[Vec<f64>], h: f64) -> Vec<Vec<f64>> {
    state.iter().zip(dir).map(|(z, d)| z.iter().zip(d).map(|(a, b)| a + h * b).collect()).collect()
}

/// All orders `0..=q` at time `t`, integrated jointly with fixed-step RK4.
pub fn transient_moments(cfg: &ModelConfig, q: usize, t: f64, step: f64) -> Result<Vec<MomentVector>> {
    Ok(transient_moment_path(cfg, q, &[t], step)?.pop().expect("one time requested"))
}

/// Same as [`transient_moments`] at each of the nondecreasing `times`, in one sweep. Each segment
/// between consecutive times uses the smallest number of equal steps not exceeding `step`.
pub fn transient_moment_path(cfg: &ModelConfig, q: usize, times: &[f64], step: f64) -> Result<Vec<Vec<MomentVector>>> {
    if !(step > 0.0) {
        return Err(HawkesError::Domain(format!("ODE step must be positive, got {step}")));
    }
    let mut prev = 0.0;
    for &t in times {
        if !(t >= prev && t.is_finite()) {
            return Err(HawkesError::Domain(format!("times must be finite, >= 0 and nondecreasing, got {t}")));
        }
        prev = t;
    }
    let systems = (0..=q).map(|p| build_moment_system(cfg, p)).collect::<Result<Vec<_>>>()?;
    let mut state: Vec<Vec<f64>> = (0..=q).map(|p| MomentVector::initial(p, cfg.lambda_inf).entries).collect();
    let mut now = 0.0;
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        let span = t - now;
        let n = if span == 0.0 { 0 } else { (span / step - 1e-9).ceil().max(1.0) as usize };
        let h = if n == 0 { 0.0 } else { span / n as f64 };
        for _ in 0..n {
            let k1 = hierarchy_rhs(&systems, &state);
            let k2 = hierarchy_rhs(&systems, &shifted(&state, &k1, 0.5 * h));
            let k3 = hierarchy_rhs(&systems, &shifted(&state, &k2, 0.5 * h));
            let k4 = hierarchy_rhs(&systems, &shifted(&state, &k3, h));
            for (p, z) in state.iter_mut().enumerate() {
                for (i, v) in z.iter_mut().enumerate() {
                    *v += h / 6.0 * (k1[p][i] + 2.0 * k2[p][i] + 2.0 * k3[p][i] + k4[p][i]);
                }
            }
        }
        now = t;
        out.push(state.iter().enumerate().map(|(order, e)| MomentVector { order, t, entries: e.clone() }).collect());
    }
    Ok(out)
}

/// `(1 - e^{-a t}) / a`, continuous at `a = 0`.
fn decay_integral(a: f64, t: f64) -> f64 {
    let x = a * t;
    if x.abs() < 1e-12 {
        t
    } else {
        -(-x).exp_m1() / a
    }
}

/// `∫_0^t e^{-a(t-u)} e^{-c u} du`, continuous at `a = c`.
fn exp_convolution(a: f64, c: f64, t: f64) -> f64 {
    let x = (a - c) * t;
    let ratio = if x.abs() < 1e-12 { 1.0 } else { x.exp_m1() / x };
    t * (-a * t).exp() * ratio
}

/// `(E Λ(t), E N(t))` from the closed forms, with limits at `r0 = 0` and `μ = r0`.
pub fn first_moments_closed(cfg: &ModelConfig, t: f64) -> Result<(f64, f64)> {
    let (r, mu) = cfg.markov_rates()?;
    let b1 = cfg.marks.mean();
    let r0 = r - b1;
    let lam = cfg.lambda_inf;
    // E Λ(t) = λ∞ + λ∞ b1 (1 - e^{-r0 t}) / r0
    let mean_lambda = lam + lam * b1 * decay_integral(r0, t);
    // E N(t) = ∫ e^{-μ(t-u)} E Λ(u) du
    let base = decay_integral(mu, t);
    let excited = if (r0 * t).abs() < 1e-9 {
        // ∫ e^{-μ(t-u)} u du
        if (mu * t).abs() < 1e-9 {
            0.5 * t * t
        } else {
            (t - base) / mu
        }
    } else {
        (base - exp_convolution(mu, r0, t)) / r0
    };
    Ok((mean_lambda, lam * base + lam * b1 * excited))
}

/// The same first moments through the solution formula `e^{A1 t} Z(0) + A1^{-1}(e^{A1 t} - I) A0`.
pub fn first_moments_solution_formula(cfg: &ModelConfig, t: f64) -> Result<(f64, f64)> {
    let sys = build_moment_system(cfg, 0)?;
    let e = sys.exp_a1(t)?;
    let z0 = DVector::from_vec(MomentVector::initial(0, cfg.lambda_inf).entries);
    let a0 = DVector::from_vec(sys.forcing(|_, _| 1.0));
    let inv = sys
        .a1
        .clone()
        .try_inverse()
        .ok_or_else(|| HawkesError::Numeric("A1 is singular (μ = 0 or r0 = 0)".into()))?;
    let z = &e * z0 + inv * (&e - DMatrix::identity(2, 2)) * a0;
    Ok((z[1], z[0]))
}

fn exponents_collide(mu: f64, r0: f64) -> bool {
    let scale = mu.abs().max(r0.abs()).max(1.0);
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-8 * scale;
    close(r0, 0.0) || close(mu, 0.0) || close(mu, r0) || close(mu, 2.0 * r0) || close(2.0 * mu, r0)
}

/// `(E Λ²(t), E Λ(t)N(t), E N²(t))`.
///
/// The `e^{-μt}` terms carry the sign that makes `E N(0) = 0` hold; the printed forms of these
/// corollaries have it flipped. The three free constants are fixed by `E Λ²(0) = λ∞²`, `E Λ(0)N(0) = 0` and `E N²(0) = 0`.
/// Colliding exponents switch to the ODE hierarchy.
pub fn second_moments_closed(cfg: &ModelConfig, t: f64) -> Result<(f64, f64, f64)> {
    let (r, mu) = cfg.markov_rates()?;
    let b1 = cfg.marks.mean();
    let b2 = cfg.marks.require_moment(2)?;
    let r0 = r - b1;
    if exponents_collide(mu, r0) {
        let z = transient_moments(cfg, 1, t, DEFAULT_ODE_STEP)?;
        let mean_n = z[0].entries[0];
        return Ok((z[1].entries[2], z[1].entries[1], z[1].entries[0] + mean_n));
    }
    let lam = cfg.lambda_inf;
    let c = b2 + 2.0 * lam * r;

    let l_const = lam * r * c / (2.0 * r0 * r0);
    let l_r0 = -lam * b1 * c / (r0 * r0);
    let d1 = lam * lam - l_const - l_r0;

    let x_const = lam * r / (r0 * (mu + r0)) * (c / (2.0 * r0) + (lam * r + mu * b1) / mu);
    let x_mu = lam * lam * r * (r - mu) / (mu * r0 * (mu - r0));
    let x_r0 = -lam * b1 / (mu * r0) * (b1 + c / r0 + lam * r / (mu - r0));
    let x_2r0 = d1 / (mu - r0);
    let d2 = -(x_const + x_mu + x_r0 + x_2r0);

    let n_const = lam * r / (mu * r0 * (mu + r0)) * (c / (2.0 * r0) + (mu * (mu + r) + lam * r) / mu);
    let n_mu = lam * (r - mu) * (mu * r0 + 2.0 * lam * r) / (mu * mu * r0 * (mu - r0));
    let n_r0 = -2.0 * lam * b1 / (mu * r0 * (2.0 * mu - r0))
        * (b1 + c / r0 + lam * r / (mu - r0) + 0.5 * mu * (2.0 * mu - r0) / (mu - r0));
    let n_2r0 = d1 / ((mu - r0) * (mu - r0));
    let n_mix = 2.0 * d2 / (mu - r0);
    let d3 = -(n_const + n_mu + n_r0 + n_2r0 + n_mix);

    let (em, er0, e2r0, emix, e2mu) =
        ((-mu * t).exp(), (-r0 * t).exp(), (-2.0 * r0 * t).exp(), (-(mu + r0) * t).exp(), (-2.0 * mu * t).exp());
    let l2 = l_const + l_r0 * er0 + d1 * e2r0;
    let ln = x_const + x_mu * em + x_r0 * er0 + x_2r0 * e2r0 + d2 * emix;
    let n2 = n_const + n_mu * em + n_r0 * er0 + n_2r0 * e2r0 + n_mix * emix + d3 * e2mu;
    Ok((l2, ln, n2))
}

fn exponential_rate_for_stationary(cfg: &ModelConfig) -> Result<f64> {
    let r = cfg.kernel.exponential_rate().ok_or_else(|| {
        HawkesError::Config("stationary intensity moments need an exponential excitation kernel".into())
    })?;
    cfg.require_stable()?;
    Ok(r)
}

/// `E Λ^g` of the stationary intensity via the recursion in `g`.
pub fn stationary_lambda_moment(cfg: &ModelConfig, g: u32) -> Result<f64> {
    let r = exponential_rate_for_stationary(cfg)?;
    let b = (0..=g).map(|j| cfg.marks.require_moment(j)).collect::<Result<Vec<_>>>()?;
    let r0 = r - b[1];
    let lam = cfg.lambda_inf;
    let mut m = vec![1.0];
    for order in 1..=g as usize {
        let mut acc = order as f64 * lam * r * m[order - 1];
        if order >= 2 {
            for j in 0..=order - 2 {
                acc += binomial(order, j) * b[order - j] * m[j + 1];
            }
        }
        m.push(acc / (order as f64 * r0));
    }
    Ok(m[g as usize])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationarySummary {
    pub mean_lambda: f64,
    pub mean_n: f64,
    pub var_lambda: f64,
    pub var_n: f64,
    pub cov_n_lambda: f64,
    pub corr_n_lambda: f64,
}

/// Stationary means, variances, covariance and correlation of `(N, Λ)`.
pub fn stationary_summary(cfg: &ModelConfig) -> Result<StationarySummary> {
    let (r, mu) = cfg.markov_rates()?;
    cfg.require_stable()?;
    if !(mu > 0.0) {
        return Err(HawkesError::Domain("stationary occupancy needs a positive service rate".into()));
    }
    let b1 = cfg.marks.mean();
    let b2 = cfg.marks.require_moment(2)?;
    let r0 = r - b1;
    let lam = cfg.lambda_inf;
    let mean_lambda = lam * r / r0;
    let pre = lam * r / (2.0 * r0 * r0);
    Ok(StationarySummary {
        mean_lambda,
        mean_n: mean_lambda / mu,
        var_lambda: pre * b2,
        var_n: pre * (b2 + 2.0 * (mu + r) * r0) / (mu * (mu + r0)),
        cov_n_lambda: pre * (b2 + 2.0 * r0 * b1) / (mu + r0),
        corr_n_lambda: (b2 + 2.0 * r0 * b1) / (b2 * (b2 + 2.0 * r0 * (mu + r))).sqrt() * (mu / (mu + r0)).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::MarkDistribution;

    #[test]
    fn small_systems_match_displays() {
        let cfg = ModelConfig::table1();
        let s0 = build_moment_system(&cfg, 0).unwrap();
        assert_eq!(s0.a1(), &DMatrix::from_row_slice(2, 2, &[-1.25, 1.0, 0.0, -(2.15 - 0.98)]));
        let a0 = s0.forcing(|_, _| f64::NAN);
        assert_eq!(a0[0], 0.0);
        assert!((a0[1] - 1.45 * 2.15).abs() < 1e-15);
        let ev = s0.eigenvalues();
        assert!((ev[0] + 1.25).abs() < 1e-15 && (ev[1] + 1.17).abs() < 1e-12);

        let s1 = build_moment_system(&cfg, 1).unwrap();
        let r0 = 2.15 - 0.98;
        let expect = DMatrix::from_row_slice(3, 3, &[-2.5, 2.0, 0.0, 0.0, -1.25 - r0, 1.0, 0.0, 0.0, -2.0 * r0]);
        assert!((s1.a1() - expect).abs().max() < 1e-14);
        // A0 = [0, b1 EΛ + λ∞ r EN, (b2 + 2 λ∞ r) EΛ]
        let (el, en) = (2.0, 3.0);
        let a0 = s1.forcing(|g, m| match (g, m) {
            (0, 0) => en,
            (1, -1) => el,
            _ => panic!("unexpected ({g}, {m})"),
        });
        assert_eq!(a0[0], 0.0);
        assert!((a0[1] - (0.98 * el + 1.45 * 2.15 * en)).abs() < 1e-13);
        assert!((a0[2] - ((0.9604 + 2.0 * 1.45 * 2.15) * el)).abs() < 1e-12);
    }

    #[test]
    fn interpolation_exp_matches_nalgebra() {
        let cfg = ModelConfig::table1();
        for q in 0..4 {
            let sys = build_moment_system(&cfg, q).unwrap();
            for &t in &[0.0, 0.3, 2.0, 10.0] {
                let ours = sys.exp_a1(t).unwrap();
                let reference = (sys.a1() * t).exp();
                assert!((ours - reference).abs().max() < 1e-9, "q={q} t={t}");
            }
        }
    }

    #[test]
    fn first_moments_three_ways() {
        let cfg = ModelConfig::table1();
        for &t in &[0.0, 0.1, 1.0, 5.0, 10.0] {
            let (l, n) = first_moments_closed(&cfg, t).unwrap();
            let (l2, n2) = first_moments_solution_formula(&cfg, t).unwrap();
            let z = &transient_moments(&cfg, 0, t, 1e-3).unwrap()[0];
            assert!((l - l2).abs() < 1e-12 && (n - n2).abs() < 1e-12);
            assert!((l - z.entries[1]).abs() < 1e-9 && (n - z.entries[0]).abs() < 1e-9);
        }
        let (l, n) = first_moments_closed(&cfg, 0.0).unwrap();
        assert_eq!((l, n), (1.45, 0.0));
    }

    #[test]
    fn first_moments_degenerate_limits() {
        // μ = r0
        let cfg = ModelConfig::markovian(1.0, 2.0, 1.5, MarkDistribution::Deterministic { value: 0.5 }).unwrap();
        let near = ModelConfig::markovian(1.0, 2.0, 1.5 + 1e-7, MarkDistribution::Deterministic { value: 0.5 }).unwrap();
        let (a, b) = (first_moments_closed(&cfg, 3.0).unwrap(), first_moments_closed(&near, 3.0).unwrap());
        assert!((a.1 - b.1).abs() < 1e-6);
        // r0 = 0
        let crit = ModelConfig::markovian(1.0, 2.0, 1.5, MarkDistribution::Deterministic { value: 2.0 }).unwrap();
        let z = &transient_moments(&crit, 0, 3.0, 1e-3).unwrap()[0];
        let (l, n) = first_moments_closed(&crit, 3.0).unwrap();
        assert!((l - z.entries[1]).abs() < 1e-9 && (n - z.entries[0]).abs() < 1e-9);
    }

    #[test]
    fn second_moments_closed_vs_ode() {
        let cfg = ModelConfig::table1();
        for &t in &[0.0, 0.1, 1.0, 5.0, 10.0] {
            let (l2, ln, n2) = second_moments_closed(&cfg, t).unwrap();
            let z = transient_moments(&cfg, 1, t, 1e-3).unwrap();
            let n2_ode = z[1].entries[0] + z[0].entries[0];
            assert!((l2 - z[1].entries[2]).abs() < 1e-8, "t={t}");
            assert!((ln - z[1].entries[1]).abs() < 1e-8, "t={t}");
            assert!((n2 - n2_ode).abs() < 1e-8, "t={t}: {n2} vs {n2_ode}");
        }
        let (l2, ln, n2) = second_moments_closed(&cfg, 0.0).unwrap();
        assert!((l2 - 1.45 * 1.45).abs() < 1e-12 && ln.abs() < 1e-12 && n2.abs() < 1e-12);
    }

    #[test]
    fn hierarchy_is_triangular() {
        let cfg = ModelConfig::markovian(1.0, 2.0, 1.0, MarkDistribution::Exponential { rate: 2.5 }).unwrap();
        let low = transient_moments(&cfg, 1, 2.0, 1e-3).unwrap();
        let high = transient_moments(&cfg, 3, 2.0, 1e-3).unwrap();
        for p in 0..2 {
            assert_eq!(low[p].entries, high[p].entries);
        }
    }

    #[test]
    fn stationary_values() {
        let cfg = ModelConfig::table1();
        let m1 = stationary_lambda_moment(&cfg, 1).unwrap();
        assert!((m1 - 1.45 * 2.15 / 1.17).abs() < 1e-12);
        assert!((m1 - 2.66453).abs() < 1e-5);
        let m2 = stationary_lambda_moment(&cfg, 2).unwrap();
        let var = 1.45 * 2.15 * 0.9604 / (2.0 * 1.17 * 1.17);
        assert!(((m2 - m1 * m1) - var).abs() < 1e-12 * var);
        assert!((var - 1.09358).abs() < 5e-5);
        let s = stationary_summary(&cfg).unwrap();
        assert!((s.mean_n - 2.13162).abs() < 1e-5);
        assert!(s.cov_n_lambda > 0.0);
        let long = transient_moments(&cfg, 1, 40.0, 1e-3).unwrap();
        assert!((long[1].entries[2] - m2).abs() < 1e-9);
        let unstable = ModelConfig::markovian(1.0, 2.0, 1.0, MarkDistribution::Deterministic { value: 2.5 }).unwrap();
        assert!(matches!(stationary_lambda_moment(&unstable, 1), Err(HawkesError::Instability { .. })));
    }

    #[test]
    fn pareto_moments_unavailable() {
        let cfg = ModelConfig::markovian(1.0, 5.0, 1.0, MarkDistribution::Pareto { alpha: 1.5, scale: 0.5 }).unwrap();
        assert_eq!(build_moment_system(&cfg, 1), Err(HawkesError::MomentUnavailable { order: 2 }));
        assert!(build_moment_system(&cfg, 0).is_ok());
    }
}
