use alloc::vec::Vec;

use libm::sqrt;

use super::hier::{HierParams, HierSample};
use super::matrix::{CarrierRule, KtonMode};
use crate::numerics::check_probability;
use crate::seqmodel::{detection_prob, SeqConfig};
use crate::{Error, RandomStream, Result};

/// Runs independent replicate jobs. Results come back in index order, so
/// any executor gives the same output as [`Sequential`].
pub trait ReplicateExecutor {
    fn run<T, F>(&self, count: usize, job: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync;
}

/// Runs jobs one after another on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl ReplicateExecutor for Sequential {
    fn run<T, F>(&self, count: usize, job: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync,
    {
        (0..count).map(job).collect()
    }
}

/// Which count statistic a Monte Carlo summary tracks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct KtonSpec {
    pub k: u32,
    pub mode: KtonMode,
    pub exclusive: bool,
    pub carrier_rule: CarrierRule,
}

impl KtonSpec {
    pub fn new(k: u32, mode: KtonMode, exclusive: bool) -> Result<Self> {
        if k == 0 {
            return Err(Error::domain("k", 0.0, "must be >= 1"));
        }
        Ok(KtonSpec {
            k,
            mode,
            exclusive,
            carrier_rule: CarrierRule::AnyNonzero,
        })
    }
}

/// Across-replicate summary of one population's per-individual count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KtonSummary {
    pub mean: f64,
    /// Sample variance (divisor `replicates − 1`).
    pub variance: f64,
    /// Standard error of `mean`.
    pub se: f64,
    pub replicates: usize,
}

impl KtonSummary {
    pub fn from_values(values: &[f64]) -> Result<Self> {
        let n = values.len();
        if n < 2 {
            return Err(Error::domain(
                "replicates",
                n as f64,
                "at least two replicates are required",
            ));
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let variance = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
        Ok(KtonSummary {
            mean,
            variance,
            se: sqrt(variance / n as f64),
            replicates: n,
        })
    }
}

/// Per-individual k-ton count of every population in one joint draw.
pub fn kton_replicate(
    hp: &HierParams,
    sizes: &[usize],
    phi: f64,
    spec: &KtonSpec,
    stream: &RandomStream,
) -> Result<Vec<f64>> {
    let sample = HierSample::draw(hp, sizes, phi, stream)?;
    Ok((0..sizes.len())
        .map(|pop| {
            sample.kton_count(pop, spec.k, spec.mode, spec.exclusive, spec.carrier_rule) as f64 / sizes[pop] as f64
        })
        .collect())
}

/// Monte Carlo mean and variance of per-individual k-ton counts, one
/// summary per population. Replicate `r` draws from `stream.child(r)`.
pub fn mc_kton_summary<E: ReplicateExecutor>(
    hp: &HierParams,
    sizes: &[usize],
    cfg: &SeqConfig,
    spec: &KtonSpec,
    replicates: usize,
    stream: &RandomStream,
    executor: &E,
) -> Result<Vec<KtonSummary>> {
    mc_kton_summary_at(hp, sizes, detection_prob(cfg)?, spec, replicates, stream, executor)
}

/// As [`mc_kton_summary`] with the detection probability given directly.
pub fn mc_kton_summary_at<E: ReplicateExecutor>(
    hp: &HierParams,
    sizes: &[usize],
    phi: f64,
    spec: &KtonSpec,
    replicates: usize,
    stream: &RandomStream,
    executor: &E,
) -> Result<Vec<KtonSummary>> {
    hp.validate()?;
    check_probability("phi", phi)?;
    if replicates < 2 {
        return Err(Error::domain(
            "replicates",
            replicates as f64,
            "at least two replicates are required",
        ));
    }
    let runs = executor.run(replicates, |r| {
        kton_replicate(hp, sizes, phi, spec, &stream.child(r as u64))
    });
    let runs: Vec<Vec<f64>> = runs.into_iter().collect::<Result<_>>()?;
    (0..sizes.len())
        .map(|pop| {
            let values: Vec<f64> = runs.iter().map(|r| r[pop]).collect();
            KtonSummary::from_values(&values)
        })
        .collect()
}
