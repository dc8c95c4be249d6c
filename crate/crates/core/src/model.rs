//! Model parameters, distributions and derived quantities shared by every route.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Exp, Pareto};

use crate::error::{HawkesError, Result};
use crate::grid::cumulative_trapezoid;
use crate::special::upper_incomplete_gamma;

/// Excitation function `h` and its cumulative `H(u) = ∫_0^u h`.
#[derive(Debug, Clone, PartialEq)]
pub enum ExcitationKernel {
    /// `h(u) = e^{-rate u}`.
    Exponential { rate: f64 },
    Tabulated(TabulatedKernel),
}

/// Piecewise-linear kernel on a uniform grid with trapezoidal cumulative.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedKernel {
    step: f64,
    samples: Vec<f64>,
    cumulative: Vec<f64>,
    tail_bound: f64,
}

impl TabulatedKernel {
    /// `tail_bound` is the caller's certificate for `∫ h` beyond the tabulated support.
    pub fn new(step: f64, samples: Vec<f64>, tail_bound: f64) -> Result<Self> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(HawkesError::Config(format!("kernel step must be positive, got {step}")));
        }
        if samples.len() < 2 {
            return Err(HawkesError::Config("tabulated kernel needs at least two samples".into()));
        }
        if let Some(bad) = samples.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(HawkesError::Config(format!("kernel samples must be finite and >= 0, found {bad}")));
        }
        if !(tail_bound >= 0.0 && tail_bound.is_finite()) {
            return Err(HawkesError::Config(format!("kernel tail bound must be finite and >= 0, got {tail_bound}")));
        }
        let cumulative = cumulative_trapezoid(&samples, step);
        Ok(Self { step, samples, cumulative, tail_bound })
    }

    /// Samples `h` on `[0, support]` with step `support * 2^-12`.
    pub fn from_fn<F: Fn(f64) -> f64>(h: F, support: f64, tail_bound: f64) -> Result<Self> {
        let n = 1usize << 12;
        let step = support / n as f64;
        Self::new(step, (0..=n).map(|i| h(i as f64 * step)).collect(), tail_bound)
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    pub fn support(&self) -> f64 {
        self.step * (self.samples.len() - 1) as f64
    }

    fn locate(&self, u: f64) -> Option<(usize, f64)> {
        if u >= self.support() {
            return None;
        }
        let i = ((u / self.step) as usize).min(self.samples.len() - 2);
        Some((i, u - i as f64 * self.step))
    }

    fn density(&self, u: f64) -> f64 {
        match self.locate(u) {
            Some((i, x)) => {
                let (a, b) = (self.samples[i], self.samples[i + 1]);
                a + (b - a) * x / self.step
            }
            None if u == self.support() => *self.samples.last().unwrap(),
            None => 0.0,
        }
    }

    fn cumulative(&self, u: f64) -> f64 {
        match self.locate(u) {
            Some((i, x)) => {
                let (a, b) = (self.samples[i], self.samples[i + 1]);
                self.cumulative[i] + a * x + (b - a) * x * x / (2.0 * self.step)
            }
            None => *self.cumulative.last().unwrap(),
        }
    }

    fn inverse_cumulative(&self, y: f64) -> f64 {
        let top = *self.cumulative.last().unwrap();
        if y >= top {
            return self.support();
        }
        let i = match self.cumulative.partition_point(|&c| c <= y) {
            0 => 0,
            p => p - 1,
        }
        .min(self.samples.len() - 2);
        let a = (self.samples[i + 1] - self.samples[i]) / (2.0 * self.step);
        let b = self.samples[i];
        let rem = y - self.cumulative[i];
        let disc = (b * b + 4.0 * a * rem).max(0.0);
        let denom = b + disc.sqrt();
        let x = if denom > 0.0 { 2.0 * rem / denom } else { 0.0 };
        i as f64 * self.step + x.clamp(0.0, self.step)
    }

    fn is_nonincreasing(&self) -> bool {
        self.samples.windows(2).all(|w| w[1] <= w[0])
    }
}

impl ExcitationKernel {
    pub fn exponential(rate: f64) -> Result<Self> {
        if !(rate > 0.0 && rate.is_finite()) {
            return Err(HawkesError::Config(format!("kernel rate must be positive, got {rate}")));
        }
        Ok(Self::Exponential { rate })
    }

    pub fn density(&self, u: f64) -> f64 {
        match self {
            Self::Exponential { rate } => (-rate * u).exp(),
            Self::Tabulated(t) => t.density(u),
        }
    }

    /// `H(u)`; nondecreasing with `H(0) = 0`.
    pub fn cumulative(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        match self {
            Self::Exponential { rate } => {
                if u.is_infinite() {
                    1.0 / rate
                } else {
                    -(-rate * u).exp_m1() / rate
                }
            }
            Self::Tabulated(t) => t.cumulative(u),
        }
    }

    /// `H(∞)`. For tabulated kernels this is the support integral plus the declared tail bound.
    pub fn total_mass(&self) -> f64 {
        match self {
            Self::Exponential { rate } => 1.0 / rate,
            Self::Tabulated(t) => t.cumulative.last().unwrap() + t.tail_bound,
        }
    }

    /// Solves `H(x) = y` for `y` in `[0, H(support))`.
    pub fn inverse_cumulative(&self, y: f64) -> f64 {
        match self {
            Self::Exponential { rate } => -(-rate * y).ln_1p() / rate,
            Self::Tabulated(t) => t.inverse_cumulative(y),
        }
    }

    pub fn is_nonincreasing(&self) -> bool {
        match self {
            Self::Exponential { .. } => true,
            Self::Tabulated(t) => t.is_nonincreasing(),
        }
    }

    pub fn exponential_rate(&self) -> Option<f64> {
        match self {
            Self::Exponential { rate } => Some(*rate),
            Self::Tabulated(_) => None,
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Self::Exponential { rate } => {
                if !(*rate > 0.0 && rate.is_finite()) {
                    return Err(HawkesError::Config(format!("kernel rate must be positive, got {rate}")));
                }
            }
            Self::Tabulated(t) => {
                TabulatedKernel::new(t.step, t.samples.clone(), t.tail_bound)?;
            }
        }
        Ok(())
    }
}

/// Regular-variation parameters of a heavy-tailed mark: `P(B > x) ~ ell_inf x^-alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeavyTailSpec {
    pub alpha: f64,
    pub ell_inf: f64,
}

impl HeavyTailSpec {
    pub fn new(alpha: f64, ell_inf: f64) -> Result<Self> {
        if !(alpha > 1.0 && alpha < 2.0) {
            return Err(HawkesError::Domain(format!("tail index must lie in (1, 2), got {alpha}")));
        }
        if !(ell_inf > 0.0 && ell_inf.is_finite()) {
            return Err(HawkesError::Domain(format!("ell(inf) must be positive, got {ell_inf}")));
        }
        Ok(Self { alpha, ell_inf })
    }
}

/// Distribution of the intensity jump `B`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MarkDistribution {
    Deterministic { value: f64 },
    Exponential { rate: f64 },
    /// `P(B > x) = (scale / x)^alpha` for `x >= scale`.
    Pareto { alpha: f64, scale: f64 },
}

impl MarkDistribution {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Deterministic { value } if !(value > 0.0 && value.is_finite()) => {
                Err(HawkesError::Config(format!("deterministic mark must be positive, got {value}")))
            }
            Self::Exponential { rate } if !(rate > 0.0 && rate.is_finite()) => {
                Err(HawkesError::Config(format!("mark rate must be positive, got {rate}")))
            }
            Self::Pareto { alpha, scale } if !(alpha > 1.0 && alpha.is_finite() && scale > 0.0 && scale.is_finite()) => {
                Err(HawkesError::Config(format!(
                    "Pareto marks need alpha > 1 and scale > 0, got alpha = {alpha}, scale = {scale}"
                )))
            }
            _ => Ok(()),
        }
    }

    /// `E B^g`, or `None` when infinite.
    pub fn moment(&self, g: u32) -> Option<f64> {
        if g == 0 {
            return Some(1.0);
        }
        match *self {
            Self::Deterministic { value } => Some(value.powi(g as i32)),
            Self::Exponential { rate } => {
                let fact: f64 = (1..=g).map(f64::from).product();
                Some(fact / rate.powi(g as i32))
            }
            Self::Pareto { alpha, scale } => {
                let g = f64::from(g);
                (g < alpha).then(|| alpha * scale.powf(g) / (alpha - g))
            }
        }
    }

    pub fn mean(&self) -> f64 {
        self.moment(1).unwrap_or(f64::INFINITY)
    }

    pub fn second_moment(&self) -> Option<f64> {
        self.moment(2)
    }

    pub fn require_moment(&self, g: u32) -> Result<f64> {
        self.moment(g).ok_or(HawkesError::MomentUnavailable { order: g })
    }

    /// `β(s) = E e^{-sB}` for `Re(s) >= 0`.
    pub fn lst(&self, s: Complex64) -> Result<Complex64> {
        if s.re < 0.0 || !s.re.is_finite() || !s.im.is_finite() {
            return Err(HawkesError::Domain(format!("mark transform needs Re(s) >= 0, got {s}")));
        }
        Ok(self.lst_unchecked(s))
    }

    pub(crate) fn lst_unchecked(&self, s: Complex64) -> Complex64 {
        match *self {
            Self::Deterministic { value } => (-s * value).exp(),
            Self::Exponential { rate } => rate / (rate + s),
            Self::Pareto { alpha, scale } => {
                let w = s * scale;
                if w.norm() == 0.0 {
                    return Complex64::new(1.0, 0.0);
                }
                let e = (-w).exp();
                e * (1.0 + w / (1.0 - alpha)) - w.powf(alpha) * upper_incomplete_gamma(2.0 - alpha, w) / (1.0 - alpha)
            }
        }
    }

    /// `β(s) - 1` for real `s >= 0`, without cancellation for small `s`.
    pub fn lst_minus_one(&self, s: f64) -> f64 {
        match *self {
            Self::Deterministic { value } => (-s * value).exp_m1(),
            Self::Exponential { rate } => -s / (rate + s),
            Self::Pareto { alpha, scale } => {
                let w = s * scale;
                if w == 0.0 {
                    return 0.0;
                }
                let g = upper_incomplete_gamma(2.0 - alpha, Complex64::new(w, 0.0)).re;
                (-w).exp_m1() + w * (-w).exp() / (1.0 - alpha) - w.powf(alpha) * g / (1.0 - alpha)
            }
        }
    }

    pub fn heavy_tail(&self) -> Option<HeavyTailSpec> {
        match *self {
            Self::Pareto { alpha, scale } if alpha > 1.0 && alpha < 2.0 => {
                Some(HeavyTailSpec { alpha, ell_inf: scale.powf(alpha) })
            }
            _ => None,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Self::Deterministic { value } => value,
            Self::Exponential { rate } => Exp::new(rate).expect("validated rate").sample(rng),
            Self::Pareto { alpha, scale } => Pareto::new(scale, alpha).expect("validated Pareto").sample(rng),
        }
    }
}

/// Piecewise-linear survival function `P(J > u)` on a uniform grid; zero past the support.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedSurvival {
    step: f64,
    samples: Vec<f64>,
}

impl TabulatedSurvival {
    pub fn new(step: f64, samples: Vec<f64>) -> Result<Self> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(HawkesError::Config(format!("survival step must be positive, got {step}")));
        }
        if samples.len() < 2 {
            return Err(HawkesError::Config("tabulated survival needs at least two samples".into()));
        }
        if samples.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(HawkesError::Config("survival samples must lie in [0, 1]".into()));
        }
        if samples.windows(2).any(|w| w[1] > w[0]) {
            return Err(HawkesError::Config("survival samples must be nonincreasing".into()));
        }
        Ok(Self { step, samples })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    fn support(&self) -> f64 {
        self.step * (self.samples.len() - 1) as f64
    }

    fn survival(&self, u: f64) -> f64 {
        if u < 0.0 {
            return 1.0;
        }
        if u > self.support() {
            return 0.0;
        }
        let i = ((u / self.step) as usize).min(self.samples.len() - 2);
        let x = (u - i as f64 * self.step) / self.step;
        self.samples[i] + (self.samples[i + 1] - self.samples[i]) * x
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let v: f64 = rng.random();
        if v >= self.samples[0] {
            return 0.0;
        }
        if v < *self.samples.last().unwrap() {
            return self.support();
        }
        // first node with survival <= v; the crossing lies in the preceding segment
        let j = self.samples.partition_point(|&s| s > v).max(1);
        let (a, b) = (self.samples[j - 1], self.samples[j]);
        let x = if a > b { (a - v) / (a - b) } else { 0.0 };
        (j - 1) as f64 * self.step + x * self.step
    }

    fn mean(&self) -> f64 {
        crate::grid::trapezoid(&self.samples, self.step)
    }
}

/// Service-requirement distribution `J`.
#[derive(Debug, Clone, PartialEq)]
pub enum ServiceDistribution {
    /// Rate zero means customers never leave.
    Exponential { rate: f64 },
    Deterministic { duration: f64 },
    Tabulated(TabulatedSurvival),
}

impl ServiceDistribution {
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Exponential { rate } if !(*rate >= 0.0 && rate.is_finite()) => {
                Err(HawkesError::Config(format!("service rate must be >= 0, got {rate}")))
            }
            Self::Deterministic { duration } if !(*duration > 0.0 && duration.is_finite()) => {
                Err(HawkesError::Config(format!("service duration must be positive, got {duration}")))
            }
            Self::Tabulated(t) => TabulatedSurvival::new(t.step, t.samples.clone()).map(|_| ()),
            _ => Ok(()),
        }
    }

    /// `𝒥(u) = P(J > u)`.
    pub fn survival(&self, u: f64) -> f64 {
        if u < 0.0 {
            return 1.0;
        }
        match self {
            Self::Exponential { rate } => (-rate * u).exp(),
            Self::Deterministic { duration } => {
                if u < *duration {
                    1.0
                } else {
                    0.0
                }
            }
            Self::Tabulated(t) => t.survival(u),
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            Self::Exponential { rate } => 1.0 / rate,
            Self::Deterministic { duration } => *duration,
            Self::Tabulated(t) => t.mean(),
        }
    }

    pub fn exponential_rate(&self) -> Option<f64> {
        match self {
            Self::Exponential { rate } => Some(*rate),
            _ => None,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Self::Exponential { rate } => {
                if *rate == 0.0 {
                    f64::INFINITY
                } else {
                    Exp::new(*rate).expect("validated rate").sample(rng)
                }
            }
            Self::Deterministic { duration } => *duration,
            Self::Tabulated(t) => t.sample(rng),
        }
    }
}

/// Load `ρ = b₁ H(∞)` and the stability verdict.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoadSummary {
    pub rho: f64,
    /// `r - b₁`, exponential kernels only.
    pub r0: Option<f64>,
    pub stable: bool,
}

/// Background rate, kernel, marks and service: everything a route needs.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelConfig {
    pub lambda_inf: f64,
    pub kernel: ExcitationKernel,
    pub marks: MarkDistribution,
    pub service: ServiceDistribution,
}

impl ModelConfig {
    pub fn new(
        lambda_inf: f64,
        kernel: ExcitationKernel,
        marks: MarkDistribution,
        service: ServiceDistribution,
    ) -> Result<Self> {
        let cfg = Self { lambda_inf, kernel, marks, service };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Exponential kernel, exponential service.
    pub fn markovian(lambda_inf: f64, r: f64, mu: f64, marks: MarkDistribution) -> Result<Self> {
        Self::new(
            lambda_inf,
            ExcitationKernel::Exponential { rate: r },
            marks,
            ServiceDistribution::Exponential { rate: mu },
        )
    }

    /// Parameters used throughout the worked example: λ∞ = 1.45, r = 2.15, μ = 1.25, B ≡ 0.98.
    pub fn table1() -> Self {
        Self::markovian(1.45, 2.15, 1.25, MarkDistribution::Deterministic { value: 0.98 })
            .expect("reference parameters are valid")
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda_inf > 0.0 && self.lambda_inf.is_finite()) {
            return Err(HawkesError::Config(format!(
                "background intensity lambda_inf must be positive, got {}",
                self.lambda_inf
            )));
        }
        self.kernel.validate()?;
        self.marks.validate()?;
        self.service.validate()
    }

    pub fn load_summary(&self) -> LoadSummary {
        let b1 = self.marks.mean();
        let rho = b1 * self.kernel.total_mass();
        LoadSummary { rho, r0: self.kernel.exponential_rate().map(|r| r - b1), stable: rho < 1.0 }
    }

    pub fn require_stable(&self) -> Result<LoadSummary> {
        let load = self.load_summary();
        if load.stable {
            Ok(load)
        } else {
            Err(HawkesError::Instability { rho: load.rho })
        }
    }

    /// `(r, μ)` when both kernel and service are exponential.
    pub fn markov_rates(&self) -> Result<(f64, f64)> {
        match (self.kernel.exponential_rate(), self.service.exponential_rate()) {
            (Some(r), Some(mu)) => Ok((r, mu)),
            _ => Err(HawkesError::Config(
                "this route needs an exponential excitation kernel and exponential service".into(),
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::adaptive_simpson;

    const C0: Complex64 = Complex64::new(0.0, 0.0);

    #[test]
    fn lst_examples() {
        let d = MarkDistribution::Deterministic { value: 0.98 };
        assert_eq!(d.lst(C0).unwrap(), Complex64::new(1.0, 0.0));
        let v = d.lst(Complex64::new(1.0, 0.0)).unwrap();
        assert!((v.re - 0.375311).abs() < 1e-6);
        let e = MarkDistribution::Exponential { rate: 2.0 };
        assert!((e.lst(Complex64::new(1.0, 0.0)).unwrap().re - 2.0 / 3.0).abs() < 1e-15);
        assert!(d.lst(Complex64::new(-0.1, 0.0)).is_err());
    }

    #[test]
    fn pareto_lst_matches_quadrature() {
        let p = MarkDistribution::Pareto { alpha: 1.5, scale: 0.4 };
        // E e^{-sB} = ∫_0^1 exp(-s * scale * v^{-1/alpha}) dv
        for &s in &[1e-4, 0.05, 0.7, 1.0, 3.0, 12.0] {
            let f = |v: f64| if v <= 0.0 { 0.0 } else { (-s * 0.4 * v.powf(-1.0 / 1.5)).exp() };
            let expect = adaptive_simpson(&f, 0.0, 1.0, 1e-13);
            let got = p.lst(Complex64::new(s, 0.0)).unwrap();
            assert!((got.re - expect).abs() < 1e-9, "s={s}: {got} vs {expect}");
            assert!((p.lst_minus_one(s) - (expect - 1.0)).abs() < 1e-9);
        }
    }

    #[test]
    fn pareto_complex_lst_matches_quadrature() {
        let p = MarkDistribution::Pareto { alpha: 1.3, scale: 1.0 };
        for &s in &[Complex64::new(0.5, 0.8), Complex64::new(2.0, -3.0), Complex64::new(0.05, 0.4)] {
            let re = |v: f64| if v <= 0.0 { 0.0 } else { (-s * v.powf(-1.0 / 1.3)).exp().re };
            let im = |v: f64| if v <= 0.0 { 0.0 } else { (-s * v.powf(-1.0 / 1.3)).exp().im };
            let expect = Complex64::new(adaptive_simpson(&re, 0.0, 1.0, 1e-12), adaptive_simpson(&im, 0.0, 1.0, 1e-12));
            let got = p.lst(s).unwrap();
            assert!((got - expect).norm() < 1e-8, "s={s}: {got} vs {expect}");
        }
    }

    #[test]
    fn pareto_second_moment_unavailable() {
        let p = MarkDistribution::Pareto { alpha: 1.5, scale: 1.0 };
        assert_eq!(p.second_moment(), None);
        assert!((p.mean() - 3.0).abs() < 1e-15);
        assert_eq!(p.require_moment(2), Err(HawkesError::MomentUnavailable { order: 2 }));
    }

    #[test]
    fn kernel_cumulative_examples() {
        let k = ExcitationKernel::exponential(2.15).unwrap();
        assert!((k.total_mass() - 0.465116).abs() < 1e-6);
        assert!((k.cumulative(f64::INFINITY) - 1.0 / 2.15).abs() < 1e-15);
        assert_eq!(k.cumulative(0.0), 0.0);
        let u = 0.7;
        assert!((k.cumulative(u) - (1.0 - (-2.15 * u).exp()) / 2.15).abs() < 1e-15);
        let y = k.cumulative(u);
        assert!((k.inverse_cumulative(y) - u).abs() < 1e-12);
    }

    #[test]
    fn tabulated_kernel_agrees_with_raw_quadrature() {
        let t = TabulatedKernel::from_fn(|u| (-1.3 * u).exp() * (1.0 + 0.5 * u), 12.0, 1e-5).unwrap();
        let step = t.step();
        let k = ExcitationKernel::Tabulated(t.clone());
        let mut acc = 0.0;
        for i in 1..t.samples().len() {
            acc += 0.5 * (t.samples()[i - 1] + t.samples()[i]) * step;
            assert!((k.cumulative(i as f64 * step) - acc).abs() < 1e-12);
        }
        // inverse on a few interior points
        for &y in &[0.01, 0.3, 0.8] {
            let x = k.inverse_cumulative(y);
            assert!((k.cumulative(x) - y).abs() < 1e-10);
        }
        assert!((k.total_mass() - (acc + 1e-5)).abs() < 1e-12);
    }

    #[test]
    fn load_summary_examples() {
        let cfg = ModelConfig::table1();
        let l = cfg.load_summary();
        assert!((l.rho - 0.98 / 2.15).abs() < 1e-15);
        assert!((l.rho - 0.455814).abs() < 1e-6);
        assert!((l.r0.unwrap() - 1.17).abs() < 1e-12);
        assert!(l.stable);
        let edge = ModelConfig::markovian(1.0, 2.0, 1.0, MarkDistribution::Deterministic { value: 2.0 }).unwrap();
        assert!(!edge.load_summary().stable);
        assert!((edge.load_summary().rho - 1.0).abs() < 1e-15);
        let sup = ModelConfig::markovian(1.0, 2.0, 1.0, MarkDistribution::Deterministic { value: 3.0 }).unwrap();
        assert!(!sup.load_summary().stable);
        assert!(matches!(sup.require_stable(), Err(HawkesError::Instability { .. })));
    }

    #[test]
    fn service_survival_examples() {
        let s = ServiceDistribution::Exponential { rate: 1.25 };
        assert_eq!(s.survival(0.0), 1.0);
        assert!((s.survival(10.0) - 3.727e-6).abs() < 1e-9);
        let d = ServiceDistribution::Deterministic { duration: 2.0 };
        assert_eq!(d.survival(1.0), 1.0);
        assert_eq!(d.survival(4.0), 0.0);
    }

    #[test]
    fn tabulated_survival_sampling_mean() {
        use rand::SeedableRng;
        let step = 0.01;
        let samples: Vec<f64> = (0..=800).map(|i| (-(i as f64) * step).exp()).collect();
        let s = TabulatedSurvival::new(step, samples).unwrap();
        let svc = ServiceDistribution::Tabulated(s);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let n = 200_000;
        let mean: f64 = (0..n).map(|_| svc.sample(&mut rng)).sum::<f64>() / n as f64;
        assert!((mean - svc.mean()).abs() < 0.01, "{mean} vs {}", svc.mean());
    }

    #[test]
    fn invalid_configs_rejected() {
        assert!(ModelConfig::markovian(-1.45, 2.15, 1.25, MarkDistribution::Deterministic { value: 0.98 }).is_err());
        assert!(ModelConfig::markovian(1.45, 0.0, 1.25, MarkDistribution::Deterministic { value: 0.98 }).is_err());
        assert!(ModelConfig::markovian(1.45, 2.15, 1.25, MarkDistribution::Deterministic { value: 0.0 }).is_err());
        assert!(ModelConfig::markovian(1.45, 2.15, 1.25, MarkDistribution::Pareto { alpha: 0.9, scale: 1.0 }).is_err());
        assert!(TabulatedKernel::new(0.1, vec![1.0, -0.5], 0.0).is_err());
    }
}
