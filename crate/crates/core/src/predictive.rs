//! Closed-form predictions of future variant counts under the 3BP–Bernoulli
//! model with error-thinned observations.
//!
//! After a pilot of `N` individuals observed with detection probability
//! `φ_p`, the number of new variants seen in exactly `k` of `M` follow-up
//! individuals (detection `φ_f`) is Poisson with mean
//!
//! ```text
//! γ_k = α C(M,k) φ_f^k (1−σ)_{k−1} / (1+c)_{k−1}
//!       · E[(1 − φ_f B)^{M−k} (1 − φ_p B)^N],   B ~ Beta(k − σ, c + σ).
//! ```

use libm::{exp, log};

use crate::numerics::{beta_expectation_power, check_probability, ln_binomial, log_rising_factorial};
use crate::simulate::KtonMode;
use crate::{Error, Result};

/// Three-parameter beta process hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriorParams {
    /// `α > 0`
    pub mass: f64,
    /// `c > −σ`
    pub concentration: f64,
    /// `0 <= σ < 1`
    pub discount: f64,
}

impl PriorParams {
    pub fn new(mass: f64, concentration: f64, discount: f64) -> Result<Self> {
        let p = PriorParams {
            mass,
            concentration,
            discount,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mass > 0.0) || !self.mass.is_finite() {
            return Err(Error::domain("mass", self.mass, "must be finite and > 0"));
        }
        if !(self.discount >= 0.0 && self.discount < 1.0) {
            return Err(Error::domain("discount", self.discount, "must lie in [0, 1)"));
        }
        if !(self.concentration > -self.discount) || !self.concentration.is_finite() {
            return Err(Error::domain(
                "concentration",
                self.concentration,
                "must be finite and > -discount",
            ));
        }
        Ok(())
    }

    /// Same prior with the mass multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        PriorParams::new(self.mass * factor, self.concentration, self.discount)
    }
}

/// Poisson mean of the future k-ton count for one design.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KtonPrediction {
    pub frequency: u64,
    pub n_pilot: u64,
    pub m_follow: u64,
    pub phi_pilot: f64,
    pub phi_follow: f64,
    pub gamma: f64,
}

/// Expected number of new variants observed in exactly `k` of `m_follow`
/// follow-up individuals.
pub fn gamma_k(
    prior: &PriorParams,
    n_pilot: u64,
    m_follow: u64,
    k: u64,
    phi_pilot: f64,
    phi_follow: f64,
) -> Result<KtonPrediction> {
    prior.validate()?;
    check_probability("phi_pilot", phi_pilot)?;
    check_probability("phi_follow", phi_follow)?;
    if m_follow == 0 {
        return Err(Error::domain("m_follow", 0.0, "must be >= 1"));
    }
    if k == 0 || k > m_follow {
        return Err(Error::domain("k", k as f64, "must lie in [1, m_follow]"));
    }
    let prediction = |gamma| KtonPrediction {
        frequency: k,
        n_pilot,
        m_follow,
        phi_pilot,
        phi_follow,
        gamma,
    };
    if phi_follow == 0.0 {
        return Ok(prediction(0.0));
    }
    let (c, s) = (prior.concentration, prior.discount);
    let expectation = beta_expectation_power(k as f64 - s, c + s, phi_follow, m_follow - k, phi_pilot, n_pilot)?;
    if expectation == 0.0 {
        return Ok(prediction(0.0));
    }
    let ln_rest = ln_binomial(m_follow, k) + k as f64 * log(phi_follow) + log_rising_factorial(1.0 - s, k - 1)?
        - log_rising_factorial(1.0 + c, k - 1)?
        + log(expectation);
    // Mass stays outside the exponential so γ is exactly linear in it.
    Ok(prediction(prior.mass * exp(ln_rest)))
}

/// `Σ_{j=1}^{min(k, M)} γ_j`: variants seen between 1 and `k` times.
pub fn cumulative_gamma(
    prior: &PriorParams,
    n_pilot: u64,
    m_follow: u64,
    k: u64,
    phi_pilot: f64,
    phi_follow: f64,
) -> Result<f64> {
    if k == 0 {
        return Err(Error::domain("k", 0.0, "must be >= 1"));
    }
    let mut total = 0.0;
    for j in 1..=k.min(m_follow) {
        total += gamma_k(prior, n_pilot, m_follow, j, phi_pilot, phi_follow)?.gamma;
    }
    Ok(total)
}

/// Expected k-ton count under `mode`: `γ_k` or its cumulative version.
pub fn kton_mean(
    prior: &PriorParams,
    n_pilot: u64,
    m_follow: u64,
    k: u64,
    mode: KtonMode,
    phi_pilot: f64,
    phi_follow: f64,
) -> Result<f64> {
    match mode {
        KtonMode::Exact => Ok(gamma_k(prior, n_pilot, m_follow, k, phi_pilot, phi_follow)?.gamma),
        KtonMode::AtMost => cumulative_gamma(prior, n_pilot, m_follow, k, phi_pilot, phi_follow),
    }
}

/// Poisson mean of the per-individual k-ton count, `γ_k / M`.
pub fn per_sample_kton_rate(pred: &KtonPrediction) -> f64 {
    pred.gamma / pred.m_follow as f64
}

/// Expected number of distinct new variants among `m_follow` individuals,
/// `Σ_{k=1}^{M} γ_k`.
pub fn expected_new_variants(
    prior: &PriorParams,
    n_pilot: u64,
    m_follow: u64,
    phi_pilot: f64,
    phi_follow: f64,
) -> Result<f64> {
    cumulative_gamma(prior, n_pilot, m_follow, m_follow.max(1), phi_pilot, phi_follow)
}

/// Ratio of affected to unaffected expected new variants, either all of
/// them (`k = None`) or k-tons only. Pilot and follow-up share `phi`.
pub fn excess_ratio(
    prior_a: &PriorParams,
    prior_u: &PriorParams,
    n: u64,
    m: u64,
    k: Option<u64>,
    phi: f64,
) -> Result<f64> {
    let (num, den) = match k {
        None => (
            expected_new_variants(prior_a, n, m, phi, phi)?,
            expected_new_variants(prior_u, n, m, phi, phi)?,
        ),
        Some(k) => (
            gamma_k(prior_a, n, m, k, phi, phi)?.gamma,
            gamma_k(prior_u, n, m, k, phi, phi)?.gamma,
        ),
    };
    if den == 0.0 {
        return Err(Error::DivisionByZero("unaffected expected variant count is zero"));
    }
    Ok(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xi0() -> PriorParams {
        PriorParams::new(5.0, 4.0, 0.5).unwrap()
    }

    #[test]
    fn prior_validation() {
        assert!(PriorParams::new(0.0, 1.0, 0.1).is_err());
        assert!(PriorParams::new(1.0, 1.0, 1.0).is_err());
        assert!(PriorParams::new(1.0, -0.2, 0.1).is_err());
        assert!(PriorParams::new(1.0, -0.05, 0.1).is_ok());
    }

    #[test]
    fn singleton_single_sample() {
        let p = PriorParams::new(10.0, 4.0, 0.2).unwrap();
        assert_eq!(gamma_k(&p, 0, 1, 1, 1.0, 1.0).unwrap().gamma, 10.0);
        let g = gamma_k(&xi0(), 0, 1, 1, 1.0, 0.37).unwrap().gamma;
        assert!((g - 5.0 * 0.37).abs() < 1e-14);
        assert_eq!(expected_new_variants(&xi0(), 0, 1, 1.0, 0.37).unwrap(), g);
    }

    #[test]
    fn zero_detection_gives_zero() {
        assert_eq!(gamma_k(&xi0(), 3, 10, 2, 1.0, 0.0).unwrap().gamma, 0.0);
        assert_eq!(expected_new_variants(&xi0(), 0, 10, 1.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn k_out_of_range() {
        assert!(gamma_k(&xi0(), 0, 5, 6, 1.0, 1.0).is_err());
        assert!(gamma_k(&xi0(), 0, 5, 0, 1.0, 1.0).is_err());
    }

    #[test]
    fn excess_ratio_examples() {
        let a = xi0();
        assert_eq!(excess_ratio(&a, &a, 0, 50, None, 0.9).unwrap(), 1.0);
        let doubled = a.scaled(2.0).unwrap();
        assert_eq!(excess_ratio(&doubled, &a, 0, 50, Some(3), 0.9).unwrap(), 2.0);
        assert_eq!(excess_ratio(&doubled, &a, 4, 30, None, 0.9).unwrap(), 2.0);
        assert!(matches!(
            excess_ratio(&a, &a, 0, 10, Some(1), 0.0),
            Err(Error::DivisionByZero(_))
        ));
    }

    #[test]
    fn per_sample_rate() {
        let pred = gamma_k(&xi0(), 0, 20, 1, 1.0, 0.95).unwrap();
        assert_eq!(per_sample_kton_rate(&pred), pred.gamma / 20.0);
    }
}
