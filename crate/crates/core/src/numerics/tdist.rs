use libm::{exp, fabs, lgamma, log, sqrt};

use super::special::{normal_cdf, normal_quantile, reg_inc_beta_split};
use super::{integrate_adaptive, Tolerance};
use crate::{Error, Result};

fn check_df(df: f64) -> Result<()> {
    if df > 0.0 && df.is_finite() {
        Ok(())
    } else {
        Err(Error::domain("df", df, "degrees of freedom must be finite and > 0"))
    }
}

/// Density of the central t law.
pub fn central_t_pdf(t: f64, df: f64) -> Result<f64> {
    check_df(df)?;
    let ln = lgamma(0.5 * (df + 1.0))
        - lgamma(0.5 * df)
        - 0.5 * log(df * core::f64::consts::PI)
        - 0.5 * (df + 1.0) * libm::log1p(t * t / df);
    Ok(exp(ln))
}

/// CDF of the central t law with `df` degrees of freedom.
pub fn central_t_cdf(t: f64, df: f64) -> Result<f64> {
    check_df(df)?;
    if t.is_nan() {
        return Err(Error::domain("t", t, "argument is NaN"));
    }
    if t == 0.0 {
        return Ok(0.5);
    }
    if t.is_infinite() {
        return Ok(if t > 0.0 { 1.0 } else { 0.0 });
    }
    let t2 = t * t;
    let x = df / (df + t2);
    let y = t2 / (df + t2);
    // P(|T| > |t|) = I_x(df/2, 1/2)
    let two_tail = reg_inc_beta_split(0.5 * df, 0.5, x, y)?;
    Ok(if t < 0.0 { 0.5 * two_tail } else { 1.0 - 0.5 * two_tail })
}

/// Quantile of the central t law: the `t` with `central_t_cdf(t, df) = p`.
pub fn central_t_quantile(p: f64, df: f64) -> Result<f64> {
    check_df(df)?;
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain("p", p, "quantile needs 0 < p < 1"));
    }
    if p == 0.5 {
        return Ok(0.0);
    }
    // Solve in the lower tail, where the CDF carries full relative precision.
    let q = if p < 0.5 { p } else { 1.0 - p };
    let sign = if p < 0.5 { 1.0 } else { -1.0 };

    let mut hi = 0.0;
    let mut lo = normal_quantile(q)?.min(-1.0);
    let mut expansions = 0;
    while central_t_cdf(lo, df)? > q {
        hi = lo;
        lo *= 2.0;
        expansions += 1;
        if expansions > 2000 {
            return Err(Error::NoConvergence {
                routine: "t quantile bracketing",
                iterations: expansions,
            });
        }
    }
    let mut t = lo.max(normal_quantile(q)?).clamp(lo, hi);
    let max_iter = Tolerance::default().max_iter;
    for _ in 0..max_iter {
        let f = central_t_cdf(t, df)? - q;
        if f == 0.0 {
            return Ok(sign * t);
        }
        if f > 0.0 {
            hi = t;
        } else {
            lo = t;
        }
        let dens = central_t_pdf(t, df)?;
        let mut next = t - f / dens;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        if fabs(next - t) <= 4.0 * f64::EPSILON * (1.0 + fabs(t)) || hi - lo <= 4.0 * f64::EPSILON * (1.0 + fabs(t)) {
            return Ok(sign * next);
        }
        t = next;
    }
    Err(Error::NoConvergence {
        routine: "t quantile",
        iterations: max_iter,
    })
}

/// Log density of `y = ln V` for `V ~ χ²_df`.
fn log_chisq_log_density(y: f64, df: f64, norm: f64) -> f64 {
    0.5 * df * y - 0.5 * exp(y) - norm
}

/// Integration window for `ln χ²_df`: the log density is at least its mode
/// value minus 60 throughout, so the discarded mass is below `e^{-50}`.
fn log_chisq_window(df: f64) -> (f64, f64, f64) {
    let norm = 0.5 * df * core::f64::consts::LN_2 + lgamma(0.5 * df);
    let mode = log(df);
    let peak = log_chisq_log_density(mode, df, norm);
    let floor = peak - 60.0;
    let scale = sqrt(2.0 / df).max(0.05);
    let mut d = scale;
    while log_chisq_log_density(mode - d, df, norm) > floor {
        d *= 1.5;
    }
    let lo = mode - d;
    let mut d = scale;
    while log_chisq_log_density(mode + d, df, norm) > floor {
        d *= 1.5;
    }
    (lo, mode + d, norm)
}

fn noncentral_t_tail(x: f64, df: f64, delta: f64, upper: bool, tol: &Tolerance) -> Result<f64> {
    check_df(df)?;
    tol.validate()?;
    if x.is_nan() || delta.is_nan() {
        return Err(Error::domain("x", f64::NAN, "argument is NaN"));
    }
    if !delta.is_finite() {
        return Err(Error::domain("noncentrality", delta, "must be finite"));
    }
    if x.is_infinite() {
        let cdf = if x > 0.0 { 1.0 } else { 0.0 };
        return Ok(if upper { 1.0 - cdf } else { cdf });
    }
    // Integrate whichever tail is smaller under a purely relative tolerance,
    // so values near 1 come out as 1 − (small, accurate) and stay monotone.
    let tight = Tolerance {
        abs_tol: f64::MIN_POSITIVE,
        ..*tol
    };
    let v = tail_integral(x, df, delta, upper, &tight)?;
    if v <= 0.5 {
        return Ok(v);
    }
    Ok((1.0 - tail_integral(x, df, delta, !upper, &tight)?).clamp(0.0, 1.0))
}

fn tail_integral(x: f64, df: f64, delta: f64, upper: bool, tol: &Tolerance) -> Result<f64> {
    // T = (Z + δ) / sqrt(V/ν), so P(T <= x) = E_V[Φ(x sqrt(V/ν) − δ)].
    // Integrate over y = ln V, whose density is smooth and unimodal.
    let (lo, hi, norm) = log_chisq_window(df);
    let mode = log(df);
    let inv_sqrt_df = 1.0 / sqrt(df);
    let integrand = |y: f64| {
        let w = exp(log_chisq_log_density(y, df, norm));
        if w == 0.0 {
            return 0.0;
        }
        let z = x * exp(0.5 * y) * inv_sqrt_df - delta;
        let p = if upper { normal_cdf(-z) } else { normal_cdf(z) };
        w * p
    };
    let left = integrate_adaptive(integrand, lo, mode, tol)?;
    let right = integrate_adaptive(integrand, mode, hi, tol)?;
    Ok((left + right).clamp(0.0, 1.0))
}

/// CDF of the noncentral t law, `P(X <= x)` for `X ~ t(df, noncentrality)`.
pub fn noncentral_t_cdf(x: f64, df: f64, noncentrality: f64) -> Result<f64> {
    noncentral_t_cdf_with(x, df, noncentrality, &Tolerance::default())
}

pub fn noncentral_t_cdf_with(x: f64, df: f64, noncentrality: f64, tol: &Tolerance) -> Result<f64> {
    noncentral_t_tail(x, df, noncentrality, false, tol)
}

/// Upper tail `P(X > x)`, evaluated directly rather than as `1 − cdf`.
pub fn noncentral_t_sf(x: f64, df: f64, noncentrality: f64) -> Result<f64> {
    noncentral_t_sf_with(x, df, noncentrality, &Tolerance::default())
}

pub fn noncentral_t_sf_with(x: f64, df: f64, noncentrality: f64, tol: &Tolerance) -> Result<f64> {
    noncentral_t_tail(x, df, noncentrality, true, tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn central_examples() {
        assert_eq!(central_t_cdf(0.0, 5.0).unwrap(), 0.5);
        // df = 1 is Cauchy: F(t) = 1/2 + atan(t)/π
        for &t in &[-30.0, -1.0, 0.3, 4.0] {
            let want = 0.5 + libm::atan(t) / core::f64::consts::PI;
            assert!((central_t_cdf(t, 1.0).unwrap() - want).abs() < 1e-14);
        }
        // df = 2: F(t) = 1/2 + t / (2 sqrt(2 + t^2))
        for &t in &[-3.0, 0.7, 11.0] {
            let want = 0.5 + t / (2.0 * sqrt(2.0 + t * t));
            assert!((central_t_cdf(t, 2.0).unwrap() - want).abs() < 1e-14);
        }
    }

    #[test]
    fn quantile_examples() {
        assert_eq!(central_t_quantile(0.5, 7.0).unwrap(), 0.0);
        assert!((central_t_quantile(0.975, 1e9).unwrap() - 1.959964).abs() < 1e-3);
        // Cauchy quantile tan(π(p − 1/2))
        for &p in &[1e-4, 0.2, 0.9, 0.9999] {
            let want = libm::tan(core::f64::consts::PI * (p - 0.5));
            let got = central_t_quantile(p, 1.0).unwrap();
            assert!((got - want).abs() < 1e-9 * (1.0 + want.abs()), "{p}: {got} vs {want}");
        }
        assert!(central_t_quantile(1.0, 3.0).is_err());
        assert!(central_t_quantile(0.0, 3.0).is_err());
    }

    #[test]
    fn noncentral_reduces_to_central() {
        for &df in &[0.7, 3.0, 18.0, 250.0] {
            for &x in &[-4.0, -0.5, 0.0, 1.3, 6.0] {
                let a = noncentral_t_cdf(x, df, 0.0).unwrap();
                let b = central_t_cdf(x, df).unwrap();
                assert!((a - b).abs() < 1e-9, "df {df} x {x}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn upper_tail_monotone_near_one() {
        let critical = central_t_quantile(1.0 - 1e-4, 900.0).unwrap();
        let mut prev = 0.0;
        for i in 0..400 {
            let delta = 5.0 + 0.05 * i as f64;
            let p = noncentral_t_sf(critical, 900.0, delta).unwrap();
            assert!(p >= prev, "delta {delta}: {p} < {prev}");
            prev = p;
        }
        assert_eq!(prev, 1.0);
    }

    #[test]
    fn noncentral_limits() {
        assert!((noncentral_t_cdf(1e12, 10.0, 3.0).unwrap() - 1.0).abs() < 1e-8);
        assert!(noncentral_t_cdf(-1e12, 10.0, 3.0).unwrap() < 1e-8);
        let c = noncentral_t_cdf(0.4, 9.0, 1.1).unwrap();
        let s = noncentral_t_sf(0.4, 9.0, 1.1).unwrap();
        assert!((c + s - 1.0).abs() < 1e-9);
        // At x = 0 the CDF is Φ(−δ).
        assert!((noncentral_t_cdf(0.0, 4.0, 1.7).unwrap() - normal_cdf(-1.7)).abs() < 1e-10);
    }
}
