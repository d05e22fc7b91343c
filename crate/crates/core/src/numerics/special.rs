use libm::{erfc, exp, fabs, lgamma, log, sqrt};

use super::Tolerance;
use crate::{Error, Result};

const FPMIN: f64 = 1e-300;
const EPS: f64 = f64::EPSILON;

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    lgamma(x)
}

/// `ln (a)_{n↑} = ln Γ(a+n) − ln Γ(a)`.
///
/// Short products are summed term by term, which keeps small cases exact
/// to rounding even when `a` is large.
pub fn log_rising_factorial(a: f64, n: u64) -> Result<f64> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::domain("a", a, "rising factorial needs a > 0"));
    }
    if n == 0 {
        return Ok(0.0);
    }
    if n <= 64 {
        let mut acc = 0.0;
        for i in 0..n {
            acc += log(a + i as f64);
        }
        Ok(acc)
    } else {
        Ok(lgamma(a + n as f64) - lgamma(a))
    }
}

/// `ln C(n, k)` via log-gamma; valid for `k <= n`.
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    debug_assert!(k <= n);
    if k == 0 || k == n {
        return 0.0;
    }
    let (n, k) = (n as f64, k as f64);
    lgamma(n + 1.0) - lgamma(k + 1.0) - lgamma(n - k + 1.0)
}

/// Standard normal CDF.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / core::f64::consts::SQRT_2)
}

/// Standard normal quantile: Acklam's rational approximation polished by
/// one Halley step against `erfc`.
pub fn normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain("p", p, "quantile needs 0 < p < 1"));
    }
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.38357751867269e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;

    let tail = |q: f64| {
        let t = sqrt(-2.0 * log(q));
        (((((C[0] * t + C[1]) * t + C[2]) * t + C[3]) * t + C[4]) * t + C[5])
            / ((((D[0] * t + D[1]) * t + D[2]) * t + D[3]) * t + 1.0)
    };
    let mut x = if p < P_LOW {
        tail(p)
    } else if p > 1.0 - P_LOW {
        -tail(1.0 - p)
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    };
    let e = normal_cdf(x) - p;
    let u = e * sqrt(2.0 * core::f64::consts::PI) * exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
    Ok(x)
}

/// Regularized lower incomplete gamma `P(a, x)`.
pub fn reg_lower_gamma(a: f64, x: f64) -> Result<f64> {
    let (p, _) = incomplete_gamma(a, x)?;
    Ok(p)
}

/// Regularized upper incomplete gamma `Q(a, x) = 1 − P(a, x)`, computed
/// without cancellation in the upper tail.
pub fn reg_upper_gamma(a: f64, x: f64) -> Result<f64> {
    let (_, q) = incomplete_gamma(a, x)?;
    Ok(q)
}

fn incomplete_gamma(a: f64, x: f64) -> Result<(f64, f64)> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::domain("a", a, "incomplete gamma needs a > 0"));
    }
    if x.is_nan() || x < 0.0 {
        return Err(Error::domain("x", x, "incomplete gamma needs x >= 0"));
    }
    if x == 0.0 {
        return Ok((0.0, 1.0));
    }
    if x == f64::INFINITY {
        return Ok((1.0, 0.0));
    }
    let max_iter = Tolerance::default().max_iter;
    let ln_front = -x + a * log(x) - lgamma(a);
    if x < a + 1.0 {
        // Series for P.
        let mut ap = a;
        let mut term = 1.0 / a;
        let mut sum = term;
        let mut converged = false;
        for _ in 0..max_iter {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if fabs(term) < fabs(sum) * EPS {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NoConvergence {
                routine: "incomplete gamma series",
                iterations: max_iter,
            });
        }
        let p = (sum * exp(ln_front)).min(1.0);
        Ok((p, 1.0 - p))
    } else {
        // Modified Lentz continued fraction for Q.
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / FPMIN;
        let mut d = 1.0 / b;
        let mut h = d;
        let mut converged = false;
        for i in 1..=max_iter {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if fabs(d) < FPMIN {
                d = FPMIN;
            }
            c = b + an / c;
            if fabs(c) < FPMIN {
                c = FPMIN;
            }
            d = 1.0 / d;
            let del = d * c;
            h *= del;
            if fabs(del - 1.0) < EPS {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NoConvergence {
                routine: "incomplete gamma continued fraction",
                iterations: max_iter,
            });
        }
        let q = (exp(ln_front) * h).min(1.0);
        Ok((1.0 - q, q))
    }
}

/// `P(Y >= threshold)` for `Y ~ Poisson(mean)`.
pub fn poisson_sf(mean: f64, threshold: u64) -> Result<f64> {
    if mean.is_nan() || mean < 0.0 {
        return Err(Error::domain("mean", mean, "Poisson mean must be >= 0"));
    }
    if threshold == 0 {
        return Ok(1.0);
    }
    if mean == 0.0 {
        return Ok(0.0);
    }
    // P(Y >= D) = P(D, mean), the regularized lower incomplete gamma.
    reg_lower_gamma(threshold as f64, mean)
}

/// Regularized incomplete beta `I_x(a, b)`.
pub fn reg_inc_beta(a: f64, b: f64, x: f64) -> Result<f64> {
    reg_inc_beta_split(a, b, x, 1.0 - x)
}

/// `I_x(a, b)` with `y = 1 − x` supplied separately so callers that know
/// `y` exactly avoid the cancellation in `1 − x`.
pub(crate) fn reg_inc_beta_split(a: f64, b: f64, x: f64, y: f64) -> Result<f64> {
    if !(a > 0.0) || !(b > 0.0) {
        return Err(Error::domain(
            "shape",
            if a > 0.0 { b } else { a },
            "beta shapes must be > 0",
        ));
    }
    if x.is_nan() || !(0.0..=1.0).contains(&x) {
        return Err(Error::domain("x", x, "incomplete beta needs 0 <= x <= 1"));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if y <= 0.0 {
        return Ok(1.0);
    }
    let ln_front = lgamma(a + b) - lgamma(a) - lgamma(b) + a * log(x) + b * log(y);
    if x < (a + 1.0) / (a + b + 2.0) {
        Ok((exp(ln_front) * beta_cf(a, b, x, y)? / a).clamp(0.0, 1.0))
    } else {
        Ok((1.0 - exp(ln_front) * beta_cf(b, a, y, x)? / b).clamp(0.0, 1.0))
    }
}

fn beta_cf(a: f64, b: f64, x: f64, _y: f64) -> Result<f64> {
    let max_iter = Tolerance::default().max_iter;
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if fabs(d) < FPMIN {
        d = FPMIN;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=max_iter {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if fabs(d) < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if fabs(c) < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if fabs(d) < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if fabs(c) < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if fabs(del - 1.0) < EPS {
            return Ok(h);
        }
    }
    Err(Error::NoConvergence {
        routine: "incomplete beta continued fraction",
        iterations: max_iter,
    })
}
