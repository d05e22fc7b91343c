//! Burden-test statistics, power, and the fixed-design / fixed-budget
//! analyses built on them.
//!
//! The test is one-sided: reject when `T > t_{1−α}(df)`. Power is the
//! probability of that event when `T` follows a noncentral t law with the
//! Welch–Satterthwaite degrees of freedom and noncentrality `T`.

mod curves;
mod model;

pub use curves::{
    default_depth_grid, evaluate_design, fixed_budget_curve, fixed_design_curve, optimize_depth, Design, DesignOptimum,
    PowerCurve, PowerResult, SkipReason, SkippedPoint,
};
pub use model::{AnalyticBernoulli, GroupEstimate, HierarchicalMc, SummaryModel, VarianceEstimator};

use libm::sqrt;

use crate::numerics::{central_t_quantile, noncentral_t_sf};
use crate::predictive::{kton_mean, PriorParams};
use crate::simulate::KtonMode;
use crate::{Error, Result};

/// Per-individual count summary of one group.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleSummary {
    /// Mean per-individual count.
    pub mean: f64,
    /// Per-individual variance `s²`.
    pub variance: f64,
    /// Group size `M`.
    pub size: u64,
}

impl SampleSummary {
    pub fn new(mean: f64, variance: f64, size: u64) -> Result<Self> {
        let s = SampleSummary { mean, variance, size };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.mean.is_finite() {
            return Err(Error::domain("mean", self.mean, "must be finite"));
        }
        if !(self.variance >= 0.0) || !self.variance.is_finite() {
            return Err(Error::domain("variance", self.variance, "must be finite and >= 0"));
        }
        if self.size == 0 {
            return Err(Error::domain("size", 0.0, "must be >= 1"));
        }
        Ok(())
    }

    /// Squared standard error of the mean, `s² / M`.
    pub fn mean_variance(&self) -> f64 {
        self.variance / self.size as f64
    }
}

/// Welch–Satterthwaite degrees of freedom. `M − 1` is floored at 1 so a
/// single-individual group stays defined.
pub fn welch_df(a: &SampleSummary, u: &SampleSummary) -> Result<f64> {
    a.validate()?;
    u.validate()?;
    let (va, vu) = (a.mean_variance(), u.mean_variance());
    if va == 0.0 && vu == 0.0 {
        return Err(Error::Degenerate("both variances are zero"));
    }
    let dof = |m: u64| (m.max(2) - 1) as f64;
    let den = va * va / dof(a.size) + vu * vu / dof(u.size);
    Ok((va + vu) * (va + vu) / den)
}

/// Two-sample statistic `(μ_A − μ_U) / sqrt(s²_A/M_A + s²_U/M_U)`.
pub fn t_statistic(a: &SampleSummary, u: &SampleSummary) -> Result<f64> {
    a.validate()?;
    u.validate()?;
    let den = sqrt(a.mean_variance() + u.mean_variance());
    if den == 0.0 {
        return Err(Error::Degenerate("zero standard error"));
    }
    Ok((a.mean - u.mean) / den)
}

/// Model-based statistic from Poisson k-ton means:
/// `(γ_A/M_A − γ_U/M_U) / sqrt(γ_A/M_A² + γ_U/M_U²)`.
pub fn model_based_t(
    prior_a: &PriorParams,
    prior_u: &PriorParams,
    m_a: u64,
    m_u: u64,
    k: u64,
    mode: KtonMode,
    phi: f64,
) -> Result<f64> {
    let ga = kton_mean(prior_a, 0, m_a, k, mode, 1.0, phi)?;
    let gu = kton_mean(prior_u, 0, m_u, k, mode, 1.0, phi)?;
    let (ma, mu) = (m_a as f64, m_u as f64);
    let den = sqrt(ga / (ma * ma) + gu / (mu * mu));
    if den == 0.0 {
        return Err(Error::Degenerate("both expected counts are zero"));
    }
    Ok((ga / ma - gu / mu) / den)
}

/// One-sided power `P(X > t_{1−α}(df))` for `X ~ t(df, statistic)`.
pub fn power_at(statistic: f64, welch_df: f64, significance: f64) -> Result<f64> {
    if !(significance > 0.0 && significance < 1.0) {
        return Err(Error::domain("significance", significance, "must lie in (0, 1)"));
    }
    let critical = central_t_quantile(1.0 - significance, welch_df)?;
    noncentral_t_sf(critical, welch_df, statistic)
}
