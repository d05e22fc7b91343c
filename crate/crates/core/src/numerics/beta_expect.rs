use alloc::vec;
use alloc::vec::Vec;

use libm::{exp, fabs, hypot, log1p, sqrt};

use super::{check_probability, Tolerance};
use crate::{Error, Result};

const MIN_ORDER: usize = 8;
const MAX_ORDER: usize = 2048;

/// Gauss–Jacobi rule for expectations under `Beta(a, b)` on `[0, 1]`.
///
/// Weights are probabilities (they sum to one), so `expect(f)` approximates
/// `E[f(B)]` and is exact for polynomials of degree below `2 * order`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussJacobiRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussJacobiRule {
    /// Builds the rule by Golub–Welsch on the Jacobi matrix of the
    /// shifted Jacobi polynomials.
    pub fn new(order: usize, a: f64, b: f64) -> Result<Self> {
        check_shape("a", a)?;
        check_shape("b", b)?;
        if order == 0 {
            return Err(Error::domain("order", 0.0, "quadrature order must be >= 1"));
        }
        // Jacobi weight (1-x)^alpha (1+x)^beta on [-1, 1]; x = 2t - 1 maps it
        // to t^(a-1) (1-t)^(b-1).
        let alpha = b - 1.0;
        let beta = a - 1.0;
        let ab = alpha + beta;
        let n = order;
        let mut diag = vec![0.0; n];
        let mut off = vec![0.0; n];
        diag[0] = (beta - alpha) / (ab + 2.0);
        for (i, d) in diag.iter_mut().enumerate().skip(1) {
            let s = 2.0 * i as f64 + ab;
            *d = (beta * beta - alpha * alpha) / (s * (s + 2.0));
        }
        for i in 1..n {
            let fi = i as f64;
            let s = 2.0 * fi + ab;
            let v = if i == 1 {
                4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab))
            } else {
                4.0 * fi * (fi + alpha) * (fi + beta) * (fi + ab) / (s * s * (s + 1.0) * (s - 1.0))
            };
            off[i - 1] = sqrt(v);
        }
        for d in diag.iter_mut() {
            *d = 0.5 * (1.0 + *d);
        }
        for e in off.iter_mut() {
            *e *= 0.5;
        }
        let mut first = vec![0.0; n];
        first[0] = 1.0;
        tridiagonal_eigen(&mut diag, &mut off, &mut first)?;
        let mut pairs: Vec<(f64, f64)> = diag.into_iter().zip(first.into_iter().map(|z| z * z)).collect();
        pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
        let (nodes, weights) = pairs.into_iter().unzip();
        Ok(GaussJacobiRule { nodes, weights })
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn expect<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

fn check_shape(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(name, v, "beta shape must be finite and > 0"))
    }
}

/// Implicit QL on a symmetric tridiagonal matrix. On return `d` holds the
/// eigenvalues and `z` the first component of each normalized eigenvector
/// (`z` must start as the first unit vector).
fn tridiagonal_eigen(d: &mut [f64], e: &mut [f64], z: &mut [f64]) -> Result<()> {
    let n = d.len();
    if n > 0 {
        e[n - 1] = 0.0;
    }
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = fabs(d[m]) + fabs(d[m + 1]);
                if fabs(e[m]) <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::NoConvergence {
                    routine: "tridiagonal QL",
                    iterations: iter,
                });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = hypot(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut deflated = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = hypot(f, g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let zf = z[i + 1];
                z[i + 1] = s * z[i] + c * zf;
                z[i] = c * z[i] - s * zf;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// `E[(1 − φ_f B)^{e_f} (1 − φ_p B)^{e_p}]` for `B ~ Beta(a, b)`.
pub fn beta_expectation_power(
    a: f64,
    b: f64,
    phi_follow: f64,
    exp_follow: u64,
    phi_pilot: f64,
    exp_pilot: u64,
) -> Result<f64> {
    beta_expectation_power_with(
        a,
        b,
        phi_follow,
        exp_follow,
        phi_pilot,
        exp_pilot,
        &Tolerance::default(),
    )
}

/// As [`beta_expectation_power`] with explicit convergence controls.
///
/// The integrand is a polynomial of degree `e_f + e_p`; when a rule of at
/// most 2048 nodes integrates it exactly that rule is used directly.
/// Otherwise the order doubles from 8 until successive values agree to
/// `rel_tol`.
pub fn beta_expectation_power_with(
    a: f64,
    b: f64,
    phi_follow: f64,
    exp_follow: u64,
    phi_pilot: f64,
    exp_pilot: u64,
    tol: &Tolerance,
) -> Result<f64> {
    check_shape("a", a)?;
    check_shape("b", b)?;
    check_probability("phi_follow", phi_follow)?;
    check_probability("phi_pilot", phi_pilot)?;
    tol.validate()?;

    let ef = if phi_follow == 0.0 { 0 } else { exp_follow };
    let ep = if phi_pilot == 0.0 { 0 } else { exp_pilot };
    if ef == 0 && ep == 0 {
        return Ok(1.0);
    }
    let (ef_f, ep_f) = (ef as f64, ep as f64);
    let integrand = |x: f64| {
        let mut ln = 0.0;
        if ef > 0 {
            ln += ef_f * log1p(-phi_follow * x);
        }
        if ep > 0 {
            ln += ep_f * log1p(-phi_pilot * x);
        }
        exp(ln)
    };

    let degree = ef.saturating_add(ep);
    let exact_order = (degree / 2 + 1) as usize;
    if degree < 2 * MAX_ORDER as u64 {
        let rule = GaussJacobiRule::new(exact_order.max(2), a, b)?;
        return Ok(rule.expect(integrand).clamp(0.0, 1.0));
    }

    let mut order = MIN_ORDER;
    let mut prev = GaussJacobiRule::new(order, a, b)?.expect(integrand);
    let mut steps = 0;
    while order < MAX_ORDER {
        order *= 2;
        steps += 1;
        let cur = GaussJacobiRule::new(order, a, b)?.expect(integrand);
        if fabs(cur - prev) <= tol.rel_tol * fabs(cur) || (cur < 1e-300 && prev < 1e-300) {
            return Ok(cur.clamp(0.0, 1.0));
        }
        prev = cur;
    }
    Err(Error::NoConvergence {
        routine: "Gauss-Jacobi order doubling",
        iterations: steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_one_and_match_moments() {
        let (a, b) = (0.5, 4.5);
        let rule = GaussJacobiRule::new(12, a, b).unwrap();
        let s: f64 = rule.weights().iter().sum();
        assert!((s - 1.0).abs() < 1e-13);
        // E[B] = a/(a+b), E[B^2] = a(a+1)/((a+b)(a+b+1))
        let m1 = rule.expect(|x| x);
        let m2 = rule.expect(|x| x * x);
        assert!((m1 - a / (a + b)).abs() < 1e-14);
        assert!((m2 - a * (a + 1.0) / ((a + b) * (a + b + 1.0))).abs() < 1e-14);
        assert!(rule.nodes().iter().all(|&x| x > 0.0 && x < 1.0));
    }

    #[test]
    fn trivial_cases_are_one() {
        assert_eq!(beta_expectation_power(0.5, 4.5, 0.0, 20, 0.0, 7).unwrap(), 1.0);
        assert_eq!(beta_expectation_power(2.0, 3.0, 0.7, 0, 0.9, 0).unwrap(), 1.0);
    }

    #[test]
    fn uniform_closed_form() {
        // B ~ U(0,1), φ = 1: E[(1-B)^m] = 1/(m+1)
        for m in [1u64, 5, 40, 3000, 9000] {
            let v = beta_expectation_power(1.0, 1.0, 1.0, m, 0.0, 0).unwrap();
            assert!(
                (v - 1.0 / (m as f64 + 1.0)).abs() < 1e-9 / (m as f64 + 1.0),
                "m {m}: {v}"
            );
        }
    }

    #[test]
    fn beta_closed_form_full_detection() {
        // E[(1-B)^m] = B(a, b+m)/B(a, b) = (b)_m / (a+b)_m
        let (a, b, m) = (0.5, 4.5, 25u64);
        let want = exp(crate::numerics::log_rising_factorial(b, m).unwrap()
            - crate::numerics::log_rising_factorial(a + b, m).unwrap());
        let got = beta_expectation_power(a, b, 1.0, m, 0.0, 0).unwrap();
        assert!((got - want).abs() < 1e-13 * want.max(1e-300) + 1e-15);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(beta_expectation_power(0.0, 1.0, 0.5, 3, 0.5, 3).is_err());
        assert!(beta_expectation_power(1.0, -2.0, 0.5, 3, 0.5, 3).is_err());
        assert!(beta_expectation_power(1.0, 1.0, 1.5, 3, 0.5, 3).is_err());
    }
}
