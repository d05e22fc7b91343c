//! Small samplers with the edge cases the model needs handled explicitly.

use libm::{exp, floor, log, log1p};
use rand::Rng;
use rand_distr::{Binomial, Distribution, Gamma, Poisson};

/// Uniform on the open interval (0, 1).
#[inline]
pub(crate) fn open01<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return u;
        }
    }
}

pub(crate) fn poisson<R: Rng + ?Sized>(rng: &mut R, mean: f64) -> u64 {
    if !(mean > 0.0) {
        return 0;
    }
    // rand_distr accepts any finite positive mean far beyond what we use.
    Poisson::new(mean).map(|d| d.sample(rng) as u64).unwrap_or(0)
}

pub(crate) fn binomial<R: Rng + ?Sized>(rng: &mut R, n: u64, p: f64) -> u64 {
    if n == 0 || p <= 0.0 {
        return 0;
    }
    if p >= 1.0 {
        return n;
    }
    Binomial::new(n, p).map(|d| d.sample(rng)).unwrap_or(0)
}

/// `ln G` for `G ~ Gamma(shape, 1)`, accurate for shapes down to ~1e-300.
fn ln_gamma_variate<R: Rng + ?Sized>(rng: &mut R, shape: f64) -> f64 {
    if shape >= 1.0 {
        let g: f64 = Gamma::new(shape, 1.0).map(|d| d.sample(rng)).unwrap_or(shape);
        return log(g);
    }
    // G(a) = G(a + 1) * U^(1/a), kept in log space so tiny shapes don't
    // underflow to zero.
    let g: f64 = Gamma::new(shape + 1.0, 1.0).map(|d| d.sample(rng)).unwrap_or(1.0);
    log(g) + log(open01(rng)) / shape
}

/// `Beta(a, b)` variate. A non-positive `a` gives 0 and a non-positive `b`
/// gives 1, which are the degenerate limits.
pub(crate) fn beta<R: Rng + ?Sized>(rng: &mut R, a: f64, b: f64) -> f64 {
    if !(b > 0.0) {
        return 1.0;
    }
    if !(a > 0.0) {
        return 0.0;
    }
    let la = ln_gamma_variate(rng, a);
    let lb = ln_gamma_variate(rng, b);
    // a/(a+b) = 1 / (1 + exp(lb - la))
    let d = lb - la;
    if d > 0.0 {
        let e = exp(-d);
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + exp(d))
    }
}

/// Index of the first success in Bernoulli(`p`) trials, conditioned to lie
/// in `0..n`.
pub(crate) fn truncated_geometric<R: Rng + ?Sized>(rng: &mut R, p: f64, n: u64) -> u64 {
    debug_assert!(n > 0);
    if p >= 1.0 {
        return 0;
    }
    let lq = log1p(-p);
    // P(F < n) = 1 - (1-p)^n
    let total = -libm::expm1(n as f64 * lq);
    let u = open01(rng) * total;
    let f = floor(log1p(-u) / lq);
    if f.is_finite() && f >= 0.0 {
        (f as u64).min(n - 1)
    } else {
        0
    }
}

/// Number of failures before the next success in Bernoulli(`p`) trials.
pub(crate) fn geometric_skip<R: Rng + ?Sized>(rng: &mut R, p: f64) -> u64 {
    if p >= 1.0 {
        return 0;
    }
    if !(p > 0.0) {
        return u64::MAX;
    }
    let f = floor(log(open01(rng)) / log1p(-p));
    if f >= u64::MAX as f64 {
        u64::MAX
    } else {
        f as u64
    }
}
