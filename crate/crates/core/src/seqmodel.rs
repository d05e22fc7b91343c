//! Sequencing noise, variant calling and sequencing cost.
//!
//! A locus is covered by `Poisson(λ)` reads, each read independently wrong
//! with probability `p_err`, and a variant is called when at least `D`
//! error-free reads support it. Marginally a true variant is therefore kept
//! with probability `φ = P(Poisson(λ(1 − p_err)) >= D)`.

use rand::Rng;

use crate::numerics::{check_probability, poisson_sf};
use crate::simulate::draw;
use crate::simulate::GenotypeMatrix;
use crate::{Error, RandomStream, Result};

/// Depth `λ`, calling threshold `D` and per-read error rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeqConfig {
    pub depth: f64,
    pub call_threshold: u32,
    pub err_rate: f64,
}

impl SeqConfig {
    pub fn new(depth: f64, call_threshold: u32, err_rate: f64) -> Result<Self> {
        let cfg = SeqConfig {
            depth,
            call_threshold,
            err_rate,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.depth >= 0.0) || !self.depth.is_finite() {
            return Err(Error::domain("depth", self.depth, "must be finite and >= 0"));
        }
        if self.call_threshold == 0 {
            return Err(Error::domain("call_threshold", 0.0, "must be >= 1"));
        }
        if !(self.err_rate >= 0.0 && self.err_rate < 1.0) {
            return Err(Error::domain("err_rate", self.err_rate, "must lie in [0, 1)"));
        }
        Ok(())
    }

    /// Same threshold and error rate at another depth.
    pub fn at_depth(&self, depth: f64) -> Result<Self> {
        SeqConfig::new(depth, self.call_threshold, self.err_rate)
    }
}

/// `cost = m λ κ₁ + κ₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostModel {
    pub fixed_cost: f64,
    pub per_sample_rate: f64,
}

impl CostModel {
    pub fn new(fixed_cost: f64, per_sample_rate: f64) -> Result<Self> {
        let cm = CostModel {
            fixed_cost,
            per_sample_rate,
        };
        cm.validate()?;
        Ok(cm)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.fixed_cost >= 0.0) || !self.fixed_cost.is_finite() {
            return Err(Error::domain("fixed_cost", self.fixed_cost, "must be finite and >= 0"));
        }
        if !(self.per_sample_rate > 0.0) || !self.per_sample_rate.is_finite() {
            return Err(Error::domain(
                "per_sample_rate",
                self.per_sample_rate,
                "must be finite and > 0",
            ));
        }
        Ok(())
    }
}

/// Probability that a true variant is called.
pub fn detection_prob(cfg: &SeqConfig) -> Result<f64> {
    cfg.validate()?;
    poisson_sf(cfg.depth * (1.0 - cfg.err_rate), u64::from(cfg.call_threshold))
}

/// Keeps each nonzero entry with probability `phi`, zeroing it otherwise.
/// A kept diploid entry keeps its full allele count.
pub fn thin_with_prob(x: &GenotypeMatrix, phi: f64, stream: &RandomStream) -> Result<GenotypeMatrix> {
    check_probability("phi", phi)?;
    let mut rng = stream.rng();
    let mut z = x.clone();
    for e in z.entries_mut() {
        if *e != 0 {
            let u: f64 = rng.random();
            if u >= phi {
                *e = 0;
            }
        }
    }
    Ok(z)
}

/// Variant calling by the marginal Bernoulli(φ) keep-mask.
pub fn thin_matrix(x: &GenotypeMatrix, cfg: &SeqConfig, stream: &RandomStream) -> Result<GenotypeMatrix> {
    thin_with_prob(x, detection_prob(cfg)?, stream)
}

/// Variant calling by simulating read counts explicitly. Same law as
/// [`thin_matrix`]; slower, kept for cross-checks.
pub fn thin_matrix_by_reads(x: &GenotypeMatrix, cfg: &SeqConfig, stream: &RandomStream) -> Result<GenotypeMatrix> {
    cfg.validate()?;
    let mut rng = stream.rng();
    let mut z = x.clone();
    let threshold = u64::from(cfg.call_threshold);
    for e in z.entries_mut() {
        if *e != 0 {
            let reads = draw::poisson(&mut rng, cfg.depth);
            let good = draw::binomial(&mut rng, reads, 1.0 - cfg.err_rate);
            if good < threshold {
                *e = 0;
            }
        }
    }
    Ok(z)
}

/// Cost of sequencing `total_samples` individuals at `depth`.
pub fn cost(total_samples: u64, depth: f64, cm: &CostModel) -> f64 {
    total_samples as f64 * depth * cm.per_sample_rate + cm.fixed_cost
}

/// Largest per-group size `m` with `cost(groups * m, depth) <= budget`.
pub fn max_samples_under_budget(budget: f64, depth: f64, cm: &CostModel, groups: u32) -> Result<u64> {
    cm.validate()?;
    if !(depth > 0.0) || !depth.is_finite() {
        return Err(Error::domain("depth", depth, "must be finite and > 0"));
    }
    if groups == 0 {
        return Err(Error::domain("groups", 0.0, "must be >= 1"));
    }
    if !(budget > cm.fixed_cost) || !budget.is_finite() {
        return Err(Error::BudgetBelowFixedCost {
            budget,
            fixed_cost: cm.fixed_cost,
        });
    }
    let g = u64::from(groups);
    let per_unit = g as f64 * depth * cm.per_sample_rate;
    let mut m = libm::floor((budget - cm.fixed_cost) / per_unit) as u64;
    // Correct the floating-point floor against the exact cost expression.
    while cost(g * (m + 1), depth, cm) <= budget {
        m += 1;
    }
    while m > 0 && cost(g * m, depth, cm) > budget {
        m -= 1;
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulate::Ploidy;
    use alloc::vec;

    #[test]
    fn detection_examples() {
        let none = SeqConfig::new(0.0, 5, 0.05).unwrap();
        assert_eq!(detection_prob(&none).unwrap(), 0.0);
        let unit = SeqConfig::new(1.0, 1, 0.0).unwrap();
        assert!((detection_prob(&unit).unwrap() - (1.0 - libm::exp(-1.0))).abs() < 1e-15);
        let paper = SeqConfig::new(40.0, 30, 0.05).unwrap();
        let phi = detection_prob(&paper).unwrap();
        assert!(phi > 0.9 && phi < 1.0);
    }

    #[test]
    fn config_validation() {
        assert!(SeqConfig::new(-1.0, 30, 0.05).is_err());
        assert!(SeqConfig::new(10.0, 0, 0.05).is_err());
        assert!(SeqConfig::new(10.0, 30, 1.0).is_err());
        assert!(CostModel::new(-1.0, 1.0).is_err());
        assert!(CostModel::new(0.0, 0.0).is_err());
    }

    #[test]
    fn cost_examples() {
        let unit = CostModel::new(0.0, 1.0).unwrap();
        assert_eq!(cost(10, 30.0, &unit), 300.0);
        assert_eq!(cost(0, 50.0, &CostModel::new(7.0, 2.0).unwrap()), 7.0);
        assert_eq!(cost(2 * 25, 40.0, &unit), 2000.0);
    }

    #[test]
    fn budget_examples() {
        let unit = CostModel::new(0.0, 1.0).unwrap();
        assert_eq!(max_samples_under_budget(5000.0, 25.0, &unit, 2).unwrap(), 100);
        assert_eq!(max_samples_under_budget(100.0, 200.0, &unit, 2).unwrap(), 0);
        let fixed = CostModel::new(1.0, 1.0).unwrap();
        assert_eq!(max_samples_under_budget(1001.0, 10.0, &fixed, 2).unwrap(), 50);
        assert!(matches!(
            max_samples_under_budget(1.0, 10.0, &fixed, 2),
            Err(Error::BudgetBelowFixedCost { .. })
        ));
    }

    #[test]
    fn thinning_trivial_cases() {
        let s = RandomStream::new(5);
        let zeros = GenotypeMatrix::zeros(0, Ploidy::Diploid, 3, 4);
        let cfg = SeqConfig::new(40.0, 30, 0.05).unwrap();
        assert_eq!(thin_matrix(&zeros, &cfg, &s).unwrap(), zeros);
        let x = GenotypeMatrix::from_rows(0, Ploidy::Diploid, &[vec![2, 1, 0], vec![0, 1, 2]]).unwrap();
        assert_eq!(thin_with_prob(&x, 1.0, &s).unwrap(), x);
        assert_eq!(
            thin_with_prob(&x, 0.0, &s).unwrap(),
            GenotypeMatrix::zeros(0, Ploidy::Diploid, 2, 3)
        );
    }
}
