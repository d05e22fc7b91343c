use super::SampleSummary;
use crate::predictive::{kton_mean, PriorParams};
use crate::simulate::{mc_kton_summary_at, HierParams, KtonMode, KtonSpec, ReplicateExecutor};
use crate::{Error, RandomStream, Result};

/// Summary of one group, with the Monte Carlo standard error of its mean
/// when the summary is simulated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupEstimate {
    pub summary: SampleSummary,
    pub mean_se: Option<f64>,
}

/// Source of per-group count summaries for a balanced or unbalanced design.
pub trait SummaryModel {
    /// Affected and unaffected summaries at sizes `(size_a, size_u)` and
    /// detection probability `phi`.
    fn estimate(&self, size_a: u64, size_u: u64, phi: f64) -> Result<(GroupEstimate, GroupEstimate)>;
}

/// Poisson k-ton counts from the 3BP–Bernoulli predictive: per-individual
/// mean `γ/M` and variance `γ/M`, so the two-sample statistic equals the
/// model-based one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticBernoulli {
    pub prior_a: PriorParams,
    pub prior_u: PriorParams,
    pub k: u64,
    pub mode: KtonMode,
}

impl AnalyticBernoulli {
    pub fn new(prior_a: PriorParams, prior_u: PriorParams, k: u64, mode: KtonMode) -> Result<Self> {
        prior_a.validate()?;
        prior_u.validate()?;
        if k == 0 {
            return Err(Error::domain("k", 0.0, "must be >= 1"));
        }
        Ok(AnalyticBernoulli {
            prior_a,
            prior_u,
            k,
            mode,
        })
    }

    fn group(&self, prior: &PriorParams, size: u64, phi: f64) -> Result<GroupEstimate> {
        if size == 0 {
            return Err(Error::domain("size", 0.0, "must be >= 1"));
        }
        // Nobody can be a k-ton among fewer than k individuals.
        let gamma = if self.mode == KtonMode::Exact && self.k > size {
            0.0
        } else {
            kton_mean(prior, 0, size, self.k, self.mode, 1.0, phi)?
        };
        let rate = gamma / size as f64;
        Ok(GroupEstimate {
            summary: SampleSummary::new(rate, rate, size)?,
            mean_se: None,
        })
    }
}

impl SummaryModel for AnalyticBernoulli {
    fn estimate(&self, size_a: u64, size_u: u64, phi: f64) -> Result<(GroupEstimate, GroupEstimate)> {
        Ok((
            self.group(&self.prior_a, size_a, phi)?,
            self.group(&self.prior_u, size_u, phi)?,
        ))
    }
}

/// Plug-in variance for simulated summaries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum VarianceEstimator {
    /// `s² = M · Var_r`, where `Var_r` is the across-replicate variance of
    /// the per-individual count; `s²/M` is then the sampling variance of
    /// the group mean.
    #[default]
    Replicate,
    /// `s² = mean`, the Poisson identity applied to the simulated mean.
    Poisson,
}

/// Simulated summaries from the hierarchical model. Population 0 is the
/// affected group, population 1 the unaffected one.
pub struct HierarchicalMc<'e, E> {
    pub params: HierParams,
    pub spec: KtonSpec,
    pub replicates: usize,
    pub stream: RandomStream,
    pub variance: VarianceEstimator,
    pub executor: &'e E,
}

impl<'e, E: ReplicateExecutor> HierarchicalMc<'e, E> {
    pub fn new(
        params: HierParams,
        spec: KtonSpec,
        replicates: usize,
        stream: RandomStream,
        variance: VarianceEstimator,
        executor: &'e E,
    ) -> Result<Self> {
        params.validate()?;
        if params.populations.len() != 2 {
            return Err(Error::ShapeMismatch("the burden test needs exactly two populations"));
        }
        if replicates < 2 {
            return Err(Error::domain(
                "replicates",
                replicates as f64,
                "at least two replicates are required",
            ));
        }
        Ok(HierarchicalMc {
            params,
            spec,
            replicates,
            stream,
            variance,
            executor,
        })
    }
}

impl<E: ReplicateExecutor> SummaryModel for HierarchicalMc<'_, E> {
    fn estimate(&self, size_a: u64, size_u: u64, phi: f64) -> Result<(GroupEstimate, GroupEstimate)> {
        let sizes = [size_a as usize, size_u as usize];
        let s = mc_kton_summary_at(
            &self.params,
            &sizes,
            phi,
            &self.spec,
            self.replicates,
            &self.stream,
            self.executor,
        )?;
        let group = |i: usize| -> Result<GroupEstimate> {
            let m = sizes[i] as u64;
            let variance = match self.variance {
                VarianceEstimator::Replicate => m as f64 * s[i].variance,
                VarianceEstimator::Poisson => s[i].mean,
            };
            Ok(GroupEstimate {
                summary: SampleSummary::new(s[i].mean, variance, m)?,
                mean_se: Some(s[i].se),
            })
        };
        Ok((group(0)?, group(1)?))
    }
}
