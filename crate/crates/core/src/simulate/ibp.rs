use alloc::vec::Vec;

use libm::{exp, lgamma};
use rand::Rng;

use super::draw;
use super::matrix::{GenotypeMatrix, Ploidy};
use crate::predictive::PriorParams;
use crate::{RandomStream, Result};

/// Expected number of new columns opened by individual `n + 1` after `n`
/// individuals: `α Γ(1+c) Γ(n+c+σ) / (Γ(n+1+c) Γ(c+σ))`.
pub fn new_variant_rate(prior: &PriorParams, n: u64) -> f64 {
    let (c, s) = (prior.concentration, prior.discount);
    let n = n as f64;
    prior.mass * exp(lgamma(1.0 + c) + lgamma(n + c + s) - lgamma(n + 1.0 + c) - lgamma(c + s))
}

/// Draws `n` individuals from the 3BP–Bernoulli model by the sequential
/// marginal (three-parameter Indian buffet) scheme.
///
/// Individual `i + 1` carries each existing variant `l` with probability
/// `(m_l − σ)/(i + c)` and opens `Poisson(new_variant_rate(i))` new ones.
pub fn sample_bernoulli_cohort(prior: &PriorParams, n: usize, stream: &RandomStream) -> Result<GenotypeMatrix> {
    prior.validate()?;
    let mut rng = stream.rng();
    let (c, s) = (prior.concentration, prior.discount);
    // carriers[l] lists the rows carrying column l
    let mut carriers: Vec<Vec<u32>> = Vec::new();
    for i in 0..n {
        let denom = i as f64 + c;
        for col in carriers.iter_mut() {
            let p = (col.len() as f64 - s) / denom;
            let u: f64 = rng.random();
            if u < p {
                col.push(i as u32);
            }
        }
        let fresh = draw::poisson(&mut rng, new_variant_rate(prior, i as u64));
        for _ in 0..fresh {
            carriers.push(alloc::vec![i as u32]);
        }
    }
    let mut m = GenotypeMatrix::zeros(0, Ploidy::Binary, n, carriers.len());
    for (col, rows) in carriers.iter().enumerate() {
        for &r in rows {
            m.set(r as usize, col, 1);
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulate::CarrierRule;

    #[test]
    fn one_parameter_limit() {
        let p = PriorParams::new(3.0, 1.0, 0.0).unwrap();
        for n in 0..10u64 {
            let r = new_variant_rate(&p, n);
            assert!((r - 3.0 / (n as f64 + 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn columns_are_nonempty() {
        let p = PriorParams::new(5.0, 4.0, 0.5).unwrap();
        let m = sample_bernoulli_cohort(&p, 30, &RandomStream::new(9)).unwrap();
        assert!(m.carrier_counts(CarrierRule::AnyNonzero).iter().all(|&c| c > 0));
    }
}
