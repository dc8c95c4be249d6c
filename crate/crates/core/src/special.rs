//! Upper incomplete gamma function for complex arguments.

use num_complex::Complex64;
use statrs::function::gamma::gamma;

const EPS: f64 = 1e-16;
const TINY: f64 = 1e-300;
const MAX_TERMS: usize = 20_000;

/// `Γ(a, w)` for real `a > 0` and complex `w` with `Re(w) >= 0`.
pub fn upper_incomplete_gamma(a: f64, w: Complex64) -> Complex64 {
    if w.norm() == 0.0 {
        return Complex64::new(gamma(a), 0.0);
    }
    if w.norm() < 2.0 {
        Complex64::new(gamma(a), 0.0) - lower_series(a, w)
    } else {
        continued_fraction(a, w)
    }
}

/// `γ(a, w) = w^a e^{-w} Σ w^n / (a (a+1) ... (a+n))`.
fn lower_series(a: f64, w: Complex64) -> Complex64 {
    let mut ap = a;
    let mut term = Complex64::new(1.0 / a, 0.0);
    let mut sum = term;
    for _ in 0..MAX_TERMS {
        ap += 1.0;
        term *= w / ap;
        sum += term;
        if term.norm() < sum.norm() * EPS {
            break;
        }
    }
    sum * (-w + a * w.ln()).exp()
}

/// Modified Lentz evaluation of the Legendre continued fraction.
fn continued_fraction(a: f64, w: Complex64) -> Complex64 {
    let tiny = Complex64::new(TINY, 0.0);
    let mut b = w + 1.0 - a;
    let mut c = Complex64::new(1.0 / TINY, 0.0);
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_TERMS {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = b + an * d;
        if d.norm() < TINY {
            d = tiny;
        }
        c = b + an / c;
        if c.norm() < TINY {
            c = tiny;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).norm() < EPS {
            break;
        }
    }
    (-w + a * w.ln()).exp() * h
}
