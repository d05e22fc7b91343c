//! Hierarchical (h3BP) cohorts with diploid genotypes.
//!
//! Shared frequencies `θ₀ ~ 3BP(α₀, c₀, σ₀)`; population `j` perturbs each
//! one as `θ_j ~ Beta(a_j θ₀, b_j (1 − θ₀))`; individuals carry
//! `Binomial(2, θ_j)` alternate alleles (Hardy–Weinberg) and each carried
//! allele is called independently with probability `φ`, so calls follow the
//! HWE law at frequency `φ θ_j`.
//!
//! The sampler is exact: no atom of `Θ₀` is discarded. Atoms with
//! `θ₀ >= τ` form a finite Poisson process drawn directly. Below `τ` only
//! atoms that reach at least one sampled individual are generated, by
//! thinning a size-biased proposal whose intensity dominates the
//! probability of appearing.

use alloc::vec;
use alloc::vec::Vec;

use libm::{expm1, log1p, pow};
use rand::Rng;

use super::draw;
use super::matrix::{CarrierRule, GenotypeMatrix, KtonMode, Ploidy};
use super::measure::LevyMeasure;
use crate::numerics::check_probability;
use crate::predictive::PriorParams;
use crate::seqmodel::{detection_prob, SeqConfig};
use crate::{Error, RandomStream, Result};

/// Beta perturbation parameters of one population.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PopulationParams {
    pub a: f64,
    pub b: f64,
}

/// Shared 3BP prior plus one `(a_j, b_j)` per population.
#[derive(Debug, Clone, PartialEq)]
pub struct HierParams {
    pub shared: PriorParams,
    pub populations: Vec<PopulationParams>,
}

impl HierParams {
    pub fn new(shared: PriorParams, populations: Vec<PopulationParams>) -> Result<Self> {
        let hp = HierParams { shared, populations };
        hp.validate()?;
        Ok(hp)
    }

    pub fn validate(&self) -> Result<()> {
        self.shared.validate()?;
        if self.populations.is_empty() {
            return Err(Error::Degenerate("at least one population is required"));
        }
        for p in &self.populations {
            if !(p.a > 0.0) || !p.a.is_finite() {
                return Err(Error::domain("a", p.a, "must be finite and > 0"));
            }
            if !(p.b > 0.0) || !p.b.is_finite() {
                return Err(Error::domain("b", p.b, "must be finite and > 0"));
            }
        }
        Ok(())
    }
}

/// Hardy–Weinberg genotype probabilities `((1−θ)², 2θ(1−θ), θ²)`.
pub fn hwe_probs(theta: f64) -> Result<(f64, f64, f64)> {
    check_probability("theta", theta)?;
    let q = 1.0 - theta;
    Ok((q * q, 2.0 * theta * q, theta * theta))
}

/// One individual carrying a variant: true allele count and called count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Carrier {
    pub col: u32,
    pub row: u32,
    pub truth: u8,
    pub called: u8,
}

/// Sparse joint draw across populations. Every column has at least one
/// true carrier somewhere; called entries may be all zero.
#[derive(Debug, Clone, PartialEq)]
pub struct HierSample {
    sizes: Vec<usize>,
    cols: usize,
    carriers: Vec<Vec<Carrier>>,
}

impl HierSample {
    /// Draws a joint sample. True genotypes come from `stream.child(0)` and
    /// calls from `stream.child(1)`, so draws at different `phi` share the
    /// same underlying variants.
    pub fn draw(hp: &HierParams, sizes: &[usize], phi: f64, stream: &RandomStream) -> Result<Self> {
        hp.validate()?;
        check_probability("phi", phi)?;
        if sizes.len() != hp.populations.len() {
            return Err(Error::ShapeMismatch("one size per population is required"));
        }
        if sizes.iter().any(|&n| n == 0 || n > u32::MAX as usize) {
            return Err(Error::domain("size", 0.0, "population sizes must be >= 1"));
        }
        let mut sample = draw_truth(hp, sizes, &mut stream.child(0).rng());
        sample.call(phi, &stream.child(1));
        Ok(sample)
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn carriers(&self, pop: usize) -> &[Carrier] {
        &self.carriers[pop]
    }

    fn call(&mut self, phi: f64, stream: &RandomStream) {
        let mut rng = stream.rng();
        for pop in self.carriers.iter_mut() {
            for c in pop.iter_mut() {
                let mut z = 0;
                for _ in 0..c.truth {
                    let u: f64 = rng.random();
                    if u < phi {
                        z += 1;
                    }
                }
                c.called = z;
            }
        }
    }

    /// Called carrier count of every column in population `pop`.
    pub fn called_counts(&self, pop: usize, rule: CarrierRule) -> Vec<u32> {
        let mut counts = vec![0u32; self.cols];
        for c in &self.carriers[pop] {
            counts[c.col as usize] += rule.weight(c.called);
        }
        counts
    }

    /// True (pre-calling) carrier count of every column in `pop`.
    pub fn truth_counts(&self, pop: usize, rule: CarrierRule) -> Vec<u32> {
        let mut counts = vec![0u32; self.cols];
        for c in &self.carriers[pop] {
            counts[c.col as usize] += rule.weight(c.truth);
        }
        counts
    }

    /// Called k-tons of population `pop`; with `exclusive`, only columns no
    /// other population has a called carrier for.
    pub fn kton_count(&self, pop: usize, k: u32, mode: KtonMode, exclusive: bool, rule: CarrierRule) -> u64 {
        let counts = self.called_counts(pop, rule);
        let mut shared = vec![false; self.cols];
        if exclusive {
            for (j, others) in self.carriers.iter().enumerate() {
                if j != pop {
                    for c in others {
                        shared[c.col as usize] |= c.called > 0;
                    }
                }
            }
        }
        counts
            .into_iter()
            .zip(shared)
            .filter(|&(n, s)| !s && mode.matches(n, k))
            .count() as u64
    }

    /// Dense called and true matrices, one per population.
    pub fn to_matrices(&self) -> (Vec<GenotypeMatrix>, Vec<GenotypeMatrix>) {
        let mut called = Vec::with_capacity(self.sizes.len());
        let mut truth = Vec::with_capacity(self.sizes.len());
        for (pop, &n) in self.sizes.iter().enumerate() {
            let mut z = GenotypeMatrix::zeros(pop as u32, Ploidy::Diploid, n, self.cols);
            let mut x = GenotypeMatrix::zeros(pop as u32, Ploidy::Diploid, n, self.cols);
            for c in &self.carriers[pop] {
                z.set(c.row as usize, c.col as usize, c.called);
                x.set(c.row as usize, c.col as usize, c.truth);
            }
            called.push(z);
            truth.push(x);
        }
        (called, truth)
    }
}

/// Called and true matrices of one hierarchical draw.
#[derive(Debug, Clone, PartialEq)]
pub struct HierCohorts {
    pub called: Vec<GenotypeMatrix>,
    pub truth: Vec<GenotypeMatrix>,
    /// Expected number of variants lost to truncation; the sampler is exact
    /// so this is always zero.
    pub truncation_mass_bound: f64,
}

/// Draws diploid cohorts of the given sizes and calls them at the
/// detection probability implied by `cfg`.
pub fn sample_hier_cohorts(
    hp: &HierParams,
    sizes: &[usize],
    cfg: &SeqConfig,
    stream: &RandomStream,
) -> Result<HierCohorts> {
    let phi = detection_prob(cfg)?;
    let sample = HierSample::draw(hp, sizes, phi, stream)?;
    let (called, truth) = sample.to_matrices();
    Ok(HierCohorts {
        called,
        truth,
        truncation_mass_bound: 0.0,
    })
}

/// Per-individual carrier probability at allele frequency `θ`.
#[inline]
fn carrier_prob(theta: f64) -> f64 {
    theta * (2.0 - theta)
}

/// True allele count of a carrier: 2 with probability `θ² / (1 − (1−θ)²)`.
#[inline]
fn carrier_genotype<R: Rng + ?Sized>(rng: &mut R, theta: f64) -> u8 {
    let u: f64 = rng.random();
    if u * (2.0 - theta) < theta {
        2
    } else {
        1
    }
}

/// Emits carriers of rows `start..n`, each row a carrier independently.
pub(crate) fn emit_from<R: Rng + ?Sized>(
    rng: &mut R,
    theta: f64,
    n: u64,
    start: u64,
    col: u32,
    out: &mut Vec<Carrier>,
) {
    let s = carrier_prob(theta);
    let mut pos = start.saturating_add(draw::geometric_skip(rng, s));
    while pos < n {
        out.push(Carrier {
            col,
            row: pos as u32,
            truth: carrier_genotype(rng, theta),
            called: 0,
        });
        pos = pos.saturating_add(1).saturating_add(draw::geometric_skip(rng, s));
    }
}

/// Emits carriers conditional on at least one row carrying the variant.
fn emit_nonempty<R: Rng + ?Sized>(rng: &mut R, theta: f64, n: u64, col: u32, out: &mut Vec<Carrier>) {
    let first = draw::truncated_geometric(rng, carrier_prob(theta), n);
    out.push(Carrier {
        col,
        row: first as u32,
        truth: carrier_genotype(rng, theta),
        called: 0,
    });
    emit_from(rng, theta, n, first + 1, col, out);
}

fn draw_truth<R: Rng + ?Sized>(hp: &HierParams, sizes: &[usize], rng: &mut R) -> HierSample {
    let pops = &hp.populations;
    let np = pops.len();
    let n: Vec<u64> = sizes.iter().map(|&s| s as u64).collect();
    let nu = LevyMeasure::new(&hp.shared);
    let sigma = hp.shared.discount;

    let weight: Vec<f64> = n.iter().map(|&m| 2.0 * m as f64).collect();
    let ratio: Vec<f64> = pops.iter().map(|p| (p.a / p.b).max(1.0)).collect();
    let spread: f64 = weight.iter().zip(&ratio).map(|(w, r)| w * r).sum();
    let tau = (1.0 / spread).min(0.5);

    let mut carriers: Vec<Vec<Carrier>> = vec![Vec::new(); np];
    let mut cols: u32 = 0;
    let mut thetas = vec![0.0; np];

    // Large shared frequencies: every atom, unconditional genotypes.
    let mut big = Vec::new();
    nu.sample_atoms(rng, tau, &mut big);
    for &t0 in &big {
        for (j, p) in pops.iter().enumerate() {
            thetas[j] = draw::beta(rng, p.a * t0, p.b * (1.0 - t0));
        }
        let before: usize = carriers.iter().map(Vec::len).sum();
        for j in 0..np {
            emit_from(rng, thetas[j], n[j], 0, cols, &mut carriers[j]);
        }
        let after: usize = carriers.iter().map(Vec::len).sum();
        if after > before {
            cols += 1;
        }
    }

    // Small shared frequencies: size-biased proposal, component j has
    // intensity 2 n_j E[θ_j | θ₀] ν(dθ₀) with θ_j drawn size-biased.
    // Using E[θ_j | θ₀] <= ρ_j θ₀ and (1−θ₀)^e <= b1, θ₀ is proposed from
    // θ₀^{−σ} on (0, τ).
    let e = nu.e;
    let b1 = pow(1.0 - tau, e).max(1.0);
    let tail = pow(tau, 1.0 - sigma) / (1.0 - sigma);
    for j in 0..np {
        let mean = weight[j] * nu.k * ratio[j] * b1 * tail;
        let proposals = draw::poisson(rng, mean);
        for _ in 0..proposals {
            let t0 = tau * pow(draw::open01(rng), 1.0 / (1.0 - sigma));
            let (a, b) = (pops[j].a * t0, pops[j].b * (1.0 - t0));
            let m = a / (a + b);
            let accept = pow(1.0 - t0, e) * m / (t0 * ratio[j] * b1);
            let u: f64 = rng.random();
            if u >= accept {
                continue;
            }
            for (i, p) in pops.iter().enumerate() {
                thetas[i] = if i == j {
                    draw::beta(rng, a + 1.0, b)
                } else {
                    draw::beta(rng, p.a * t0, p.b * (1.0 - t0))
                };
            }
            // Thin from the union bound S = Σ 2 n_i θ_i down to
            // P(appear) = 1 − Π (1 − θ_i)^{2 n_i}.
            let mut ln_absent = 0.0;
            let mut s_bound = 0.0;
            for i in 0..np {
                ln_absent += weight[i] * log1p(-thetas[i]);
                s_bound += weight[i] * thetas[i];
            }
            let p_app = -expm1(ln_absent);
            let u: f64 = rng.random();
            if !(s_bound > 0.0) || u * s_bound >= p_app {
                continue;
            }
            // First population with a carrier, then genotypes given that.
            let mut v = draw::open01(rng) * p_app;
            let mut first = np - 1;
            let mut none_before = 1.0;
            for i in 0..np {
                let p_i = -expm1(weight[i] * log1p(-thetas[i]));
                let mass = none_before * p_i;
                if v < mass {
                    first = i;
                    break;
                }
                v -= mass;
                none_before *= 1.0 - p_i;
            }
            emit_nonempty(rng, thetas[first], n[first], cols, &mut carriers[first]);
            for i in first + 1..np {
                emit_from(rng, thetas[i], n[i], 0, cols, &mut carriers[i]);
            }
            cols += 1;
        }
    }

    HierSample {
        sizes: sizes.to_vec(),
        cols: cols as usize,
        carriers,
    }
}
