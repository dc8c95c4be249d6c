//! Uniform time grids and functions sampled on them.

use num_complex::Complex64;

use crate::error::{HawkesError, Result};

/// Uniform discretization of `[0, end]` into `intervals` equal steps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    end: f64,
    intervals: usize,
}

impl TimeGrid {
    pub fn new(end: f64, intervals: usize) -> Result<Self> {
        if !(end.is_finite() && end >= 0.0) {
            return Err(HawkesError::Domain(format!("grid end must be finite and >= 0, got {end}")));
        }
        if intervals == 0 {
            return Err(HawkesError::Domain("grid needs at least one interval".into()));
        }
        Ok(Self { end, intervals })
    }

    /// Grid whose step is the largest value not exceeding `step` that divides `end` evenly.
    pub fn with_max_step(end: f64, step: f64) -> Result<Self> {
        if !(step > 0.0) {
            return Err(HawkesError::Domain(format!("step must be positive, got {step}")));
        }
        let n = ((end / step) - 1e-9).ceil().max(1.0) as usize;
        Self::new(end, n)
    }

    /// `end * 2^-exponent` spacing.
    pub fn dyadic(end: f64, exponent: u32) -> Result<Self> {
        Self::new(end, 1usize << exponent)
    }

    pub fn end(&self) -> f64 {
        self.end
    }

    pub fn intervals(&self) -> usize {
        self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn step(&self) -> f64 {
        self.end / self.intervals as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        if i == self.intervals {
            self.end
        } else {
            i as f64 * self.step()
        }
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(move |i| self.point(i))
    }

    pub fn describe(&self) -> String {
        format!("[0, {}] with {} intervals", self.end, self.intervals)
    }
}

/// Complex samples on a [`TimeGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    pub grid: TimeGrid,
    pub values: Vec<Complex64>,
}

impl GridFunction {
    pub fn constant(grid: TimeGrid, value: Complex64) -> Self {
        Self { grid, values: vec![value; grid.len()] }
    }

    pub fn sup_distance(&self, other: &GridFunction) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Trapezoidal integral over the whole grid.
    pub fn integral(&self) -> Complex64 {
        trapezoid(&self.values, self.grid.step())
    }
}

/// Composite trapezoid rule for equally spaced samples.
pub fn trapezoid<T>(values: &[T], step: f64) -> T
where
    T: Copy + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T> + Default,
{
    match values.len() {
        0 | 1 => T::default(),
        n => {
            let inner = values[1..n - 1].iter().fold(T::default(), |acc, &v| acc + v);
            (inner + (values[0] + values[n - 1]) * 0.5) * step
        }
    }
}

/// Trapezoidal cumulative integral; `out[i]` approximates the integral over `[0, i*step]`.
pub fn cumulative_trapezoid(values: &[f64], step: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in values.windows(2) {
        acc += 0.5 * (w[0] + w[1]) * step;
        out.push(acc);
    }
    out.truncate(values.len().max(1));
    out
}

/// Trapezoidal convolution `(kernel ⋆ g)(u_i) = ∫_0^{u_i} kernel(s) g(u_i - s) ds` at every node.
///
/// `kernel` and `g` are sampled on the same grid; the cost is quadratic in the grid size.
pub fn convolve_trapezoid<T>(kernel: &[f64], g: &[T], step: f64) -> Vec<T>
where
    T: Copy + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T> + Default,
{
    let n = kernel.len().min(g.len());
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        if i == 0 {
            out.push(T::default());
            continue;
        }
        let mut acc = T::default();
        for j in 1..i {
            acc = acc + g[i - j] * kernel[j];
        }
        acc = acc + (g[i] * kernel[0] + g[0] * kernel[i]) * 0.5;
        out.push(acc * step);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dyadic_grid_step() {
        let g = TimeGrid::dyadic(10.0, 12).unwrap();
        assert_eq!(g.len(), 4097);
        assert!((g.step() - 10.0 / 4096.0).abs() < 1e-15);
        assert_eq!(g.point(4096), 10.0);
    }

    #[test]
    fn max_step_divides_evenly() {
        let g = TimeGrid::with_max_step(10.0, 1e-4).unwrap();
        assert_eq!(g.intervals(), 100_000);
        let g = TimeGrid::with_max_step(1.0, 0.3).unwrap();
        assert_eq!(g.intervals(), 4);
    }

    #[test]
    fn trapezoid_is_exact_for_linear() {
        let v: Vec<f64> = (0..11).map(|i| 2.0 * i as f64 * 0.1 + 1.0).collect();
        assert!((trapezoid(&v, 0.1) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn convolution_of_constants() {
        // ∫_0^u 1 * 1 ds = u
        let n = 21;
        let ones = vec![1.0; n];
        let c = convolve_trapezoid(&ones, &ones, 0.05);
        for (i, v) in c.iter().enumerate() {
            assert!((v - i as f64 * 0.05).abs() < 1e-12);
        }
    }

    #[test]
    fn bad_grids_rejected() {
        assert!(TimeGrid::new(-1.0, 4).is_err());
        assert!(TimeGrid::new(1.0, 0).is_err());
        assert!(TimeGrid::with_max_step(1.0, 0.0).is_err());
    }
}
