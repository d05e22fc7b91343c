use alloc::vec::Vec;

use libm::{exp, expm1, lgamma, log, pow};
use rand::Rng;

use super::draw;
use crate::numerics::reg_inc_beta;
use crate::predictive::PriorParams;
use crate::{Error, RandomStream, Result};

/// Expected-missed-variant target used by [`sample_shared_measure`].
pub const DEFAULT_TRUNCATION_TARGET: f64 = 0.01;
/// Largest expected number of proposals a truncated draw may need.
pub const DEFAULT_ATOM_BUDGET: usize = 5_000_000;

/// Atoms of a frequency measure `Σ θ_l δ_l`, truncated below some level.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyMeasure {
    pub atoms: Vec<f64>,
    /// Upper bound on the expected number of variants, among the horizon
    /// the measure was drawn for, carried by the discarded small atoms.
    pub truncation_mass_bound: f64,
}

/// The 3BP rate measure
/// `ν(dθ) = K θ^{−1−σ} (1−θ)^{c+σ−1} dθ`,
/// `K = α Γ(1+c) / (Γ(1−σ) Γ(c+σ))`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct LevyMeasure {
    pub k: f64,
    pub sigma: f64,
    /// Exponent of `(1 − θ)`.
    pub e: f64,
}

impl LevyMeasure {
    pub fn new(prior: &PriorParams) -> Self {
        let (c, s) = (prior.concentration, prior.discount);
        LevyMeasure {
            k: exp(log(prior.mass) + lgamma(1.0 + c) - lgamma(1.0 - s) - lgamma(c + s)),
            sigma: s,
            e: c + s - 1.0,
        }
    }

    /// `∫_lo^{1/2} θ^{−1−σ} dθ`.
    fn lower_integral(&self, lo: f64) -> f64 {
        let s = self.sigma;
        if s == 0.0 {
            log(0.5 / lo)
        } else {
            (expm1(-s * log(lo)) - expm1(s * core::f64::consts::LN_2)) / s
        }
    }

    fn lower_bound(&self, lo: f64) -> f64 {
        pow(1.0 - lo, self.e).max(pow(0.5, self.e))
    }

    fn upper_bound(&self) -> f64 {
        pow(2.0, 1.0 + self.sigma)
    }

    /// Expected number of proposals needed to draw the atoms in `[lo, 1]`.
    pub fn proposal_mass(&self, lo: f64) -> f64 {
        debug_assert!(lo > 0.0 && lo <= 0.5);
        let lower = self.k * self.lower_bound(lo) * self.lower_integral(lo);
        let upper = self.k * self.upper_bound() * pow(0.5, self.e + 1.0) / (self.e + 1.0);
        lower + upper
    }

    /// Appends the atoms of a Poisson process with intensity `ν` restricted
    /// to `[lo, 1]` (`0 < lo <= 1/2`), by thinning two dominating proposals.
    pub fn sample_atoms<R: Rng + ?Sized>(&self, rng: &mut R, lo: f64, out: &mut Vec<f64>) {
        debug_assert!(lo > 0.0 && lo <= 0.5);
        let s = self.sigma;
        // [lo, 1/2]: propose from θ^{−1−σ}, accept with (1−θ)^e / bound
        let bound = self.lower_bound(lo);
        let n = draw::poisson(rng, self.k * bound * self.lower_integral(lo));
        let ln_lo = log(lo);
        for _ in 0..n {
            let u = draw::open01(rng);
            let theta = if s == 0.0 {
                exp(ln_lo + u * log(0.5 / lo))
            } else {
                let top = exp(-s * ln_lo);
                let bottom = exp(s * core::f64::consts::LN_2);
                exp(-log(top - u * (top - bottom)) / s)
            };
            let a: f64 = rng.random();
            if a * bound < pow(1.0 - theta, self.e) {
                out.push(theta);
            }
        }
        // [1/2, 1]: propose 1−θ from w^e on (0, 1/2], accept with θ^{−1−σ} / 2^{1+σ}
        let bound = self.upper_bound();
        let n = draw::poisson(rng, self.k * bound * pow(0.5, self.e + 1.0) / (self.e + 1.0));
        for _ in 0..n {
            let w = 0.5 * pow(draw::open01(rng), 1.0 / (self.e + 1.0));
            let theta = 1.0 - w;
            let a: f64 = rng.random();
            if a * bound < pow(theta, -1.0 - s) {
                out.push(theta);
            }
        }
    }
}

/// `horizon · α · I_ε(1−σ, c+σ)`: bound on expected variants among
/// `horizon` individuals carried by atoms below `ε`.
pub fn truncation_bound(prior: &PriorParams, horizon: u64, eps: f64) -> Result<f64> {
    let (c, s) = (prior.concentration, prior.discount);
    Ok(horizon as f64 * prior.mass * reg_inc_beta(1.0 - s, c + s, eps)?)
}

/// Draws the atoms of `Θ₀ ~ 3BP(α, c, σ)` above a cutoff `ε` chosen so at
/// most `DEFAULT_TRUNCATION_TARGET` expected variants among `horizon`
/// individuals are lost.
pub fn sample_shared_measure(prior: &PriorParams, horizon: u64, stream: &RandomStream) -> Result<FrequencyMeasure> {
    sample_shared_measure_with(prior, horizon, DEFAULT_TRUNCATION_TARGET, DEFAULT_ATOM_BUDGET, stream)
}

pub fn sample_shared_measure_with(
    prior: &PriorParams,
    horizon: u64,
    target: f64,
    atom_budget: usize,
    stream: &RandomStream,
) -> Result<FrequencyMeasure> {
    prior.validate()?;
    if horizon == 0 {
        return Err(Error::domain("horizon", 0.0, "must be >= 1"));
    }
    if !(target > 0.0) {
        return Err(Error::domain("target", target, "must be > 0"));
    }
    let eps = truncation_level(prior, horizon, target)?;
    let nu = LevyMeasure::new(prior);
    let expected = nu.proposal_mass(eps);
    if !(expected <= atom_budget as f64) {
        return Err(Error::TruncationFailed {
            expected_atoms: expected,
            atom_budget,
        });
    }
    let mut rng = stream.rng();
    let mut atoms = Vec::new();
    nu.sample_atoms(&mut rng, eps, &mut atoms);
    Ok(FrequencyMeasure {
        atoms,
        truncation_mass_bound: truncation_bound(prior, horizon, eps)?,
    })
}

/// Largest `ε <= 1/2` (to bisection precision in `ln ε`) meeting the bound.
fn truncation_level(prior: &PriorParams, horizon: u64, target: f64) -> Result<f64> {
    if truncation_bound(prior, horizon, 0.5)? <= target {
        return Ok(0.5);
    }
    let (mut lo, mut hi) = (log(1e-300), log(0.5));
    if truncation_bound(prior, horizon, exp(lo))? > target {
        return Err(Error::TruncationFailed {
            expected_atoms: f64::INFINITY,
            atom_budget: 0,
        });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if truncation_bound(prior, horizon, exp(mid))? <= target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-9 {
            break;
        }
    }
    Ok(exp(lo))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_is_reported_and_met() {
        let p = PriorParams::new(5.0, 4.0, 0.5).unwrap();
        let m = sample_shared_measure(&p, 100, &RandomStream::new(4)).unwrap();
        assert!(m.truncation_mass_bound <= DEFAULT_TRUNCATION_TARGET);
        assert!(m.truncation_mass_bound > 0.0);
        assert!(m.atoms.iter().all(|&t| t > 0.0 && t <= 1.0));
    }

    #[test]
    fn budget_exceeded_is_an_error() {
        let p = PriorParams::new(50.0, 4.0, 0.9).unwrap();
        let r = sample_shared_measure_with(&p, 1000, 1e-3, 1000, &RandomStream::new(1));
        assert!(matches!(r, Err(Error::TruncationFailed { .. })));
    }
}
