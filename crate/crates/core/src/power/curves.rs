use alloc::vec::Vec;

use libm::{fabs, pow, sqrt};

use super::model::{GroupEstimate, SummaryModel};
use super::{power_at, t_statistic, welch_df, SampleSummary};
use crate::seqmodel::{detection_prob, max_samples_under_budget, CostModel, SeqConfig};
use crate::{Error, Result};

/// Group sizes and depth of one design point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Design {
    pub size_a: u64,
    pub size_u: u64,
    pub depth: f64,
}

/// Power of the burden test at one design point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerResult {
    pub statistic: f64,
    pub welch_df: f64,
    pub significance: f64,
    pub power: f64,
    /// Monte Carlo standard error of `power`, for simulated summaries.
    pub power_se: Option<f64>,
    pub design: Design,
    pub phi: f64,
    pub affected: SampleSummary,
    pub unaffected: SampleSummary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SkipReason {
    /// The budget affords no individual at this depth.
    Infeasible,
    /// Both groups have zero variance, so the statistic is undefined.
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SkippedPoint {
    pub depth: f64,
    pub size: u64,
    pub reason: SkipReason,
}

/// Evaluated grid, ordered by depth and then size, plus the points that
/// could not be evaluated.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerCurve {
    pub budget: Option<f64>,
    pub points: Vec<PowerResult>,
    pub skipped: Vec<SkippedPoint>,
}

/// Best point of a fixed-budget curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignOptimum {
    pub depth: f64,
    pub size: u64,
    pub power: f64,
}

/// `count` depths log-spaced over `[1, 100]`.
pub fn default_depth_grid() -> Vec<f64> {
    let count = 40;
    (0..count)
        .map(|i| pow(10.0, 2.0 * i as f64 / (count - 1) as f64))
        .collect()
}

fn sorted(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

fn power_with_se(
    statistic: f64,
    df: f64,
    significance: f64,
    a: &GroupEstimate,
    u: &GroupEstimate,
) -> Result<(f64, Option<f64>)> {
    let power = power_at(statistic, df, significance)?;
    let se = match (a.mean_se, u.mean_se) {
        (Some(sa), Some(su)) => {
            // Delta method through T, holding the denominator fixed.
            let scale = sqrt(a.summary.mean_variance() + u.summary.mean_variance());
            let se_t = sqrt(sa * sa + su * su) / scale;
            let hi = power_at(statistic + se_t, df, significance)?;
            let lo = power_at(statistic - se_t, df, significance)?;
            Some(0.5 * fabs(hi - lo))
        }
        _ => None,
    };
    Ok((power, se))
}

/// Power at a single balanced design point.
pub fn evaluate_design<M: SummaryModel + ?Sized>(
    model: &M,
    size: u64,
    seq: &SeqConfig,
    significance: f64,
) -> Result<PowerResult> {
    let phi = detection_prob(seq)?;
    let (a, u) = model.estimate(size, size, phi)?;
    let statistic = t_statistic(&a.summary, &u.summary)?;
    let df = welch_df(&a.summary, &u.summary)?;
    let (power, power_se) = power_with_se(statistic, df, significance, &a, &u)?;
    Ok(PowerResult {
        statistic,
        welch_df: df,
        significance,
        power,
        power_se,
        design: Design {
            size_a: size,
            size_u: size,
            depth: seq.depth,
        },
        phi,
        affected: a.summary,
        unaffected: u.summary,
    })
}

fn check_significance(significance: f64) -> Result<()> {
    if significance > 0.0 && significance < 1.0 {
        Ok(())
    } else {
        Err(Error::domain("significance", significance, "must lie in (0, 1)"))
    }
}

fn push_point<M: SummaryModel + ?Sized>(
    model: &M,
    size: u64,
    seq: &SeqConfig,
    significance: f64,
    curve: &mut PowerCurve,
) -> Result<()> {
    match evaluate_design(model, size, seq, significance) {
        Ok(p) => curve.points.push(p),
        Err(Error::Degenerate(_)) => curve.skipped.push(SkippedPoint {
            depth: seq.depth,
            size,
            reason: SkipReason::Degenerate,
        }),
        Err(e) => return Err(e),
    }
    Ok(())
}

/// Balanced power over a depth × size grid, depths ascending then sizes
/// ascending. `seq` supplies the calling threshold and error rate.
pub fn fixed_design_curve<M: SummaryModel + ?Sized>(
    model: &M,
    depths: &[f64],
    sizes: &[u64],
    seq: &SeqConfig,
    significance: f64,
) -> Result<PowerCurve> {
    check_significance(significance)?;
    let mut sizes = sizes.to_vec();
    sizes.sort_unstable();
    let mut curve = PowerCurve {
        budget: None,
        points: Vec::new(),
        skipped: Vec::new(),
    };
    for depth in sorted(depths) {
        let cfg = seq.at_depth(depth)?;
        for &m in &sizes {
            push_point(model, m, &cfg, significance, &mut curve)?;
        }
    }
    Ok(curve)
}

/// Power along a depth grid when each depth gets the largest balanced
/// cohort the budget affords. Unaffordable depths are recorded as skipped.
pub fn fixed_budget_curve<M: SummaryModel + ?Sized>(
    model: &M,
    budget: f64,
    depths: &[f64],
    cm: &CostModel,
    seq: &SeqConfig,
    significance: f64,
) -> Result<PowerCurve> {
    check_significance(significance)?;
    if depths.iter().any(|&d| !(d > 0.0)) {
        return Err(Error::domain("depth", 0.0, "fixed-budget depths must be > 0"));
    }
    let mut curve = PowerCurve {
        budget: Some(budget),
        points: Vec::new(),
        skipped: Vec::new(),
    };
    for depth in sorted(depths) {
        let m = max_samples_under_budget(budget, depth, cm, 2)?;
        if m == 0 {
            curve.skipped.push(SkippedPoint {
                depth,
                size: 0,
                reason: SkipReason::Infeasible,
            });
            continue;
        }
        push_point(model, m, &seq.at_depth(depth)?, significance, &mut curve)?;
    }
    if curve.points.is_empty() {
        return Err(Error::AllInfeasible { budget });
    }
    Ok(curve)
}

/// Grid point of maximum power; ties go to the smaller depth.
pub fn optimize_depth(curve: &PowerCurve) -> Result<DesignOptimum> {
    let mut best: Option<&PowerResult> = None;
    for p in &curve.points {
        best = match best {
            None => Some(p),
            Some(b) if p.power > b.power || (p.power == b.power && p.design.depth < b.design.depth) => Some(p),
            keep => keep,
        };
    }
    let b = best.ok_or(Error::EmptyCurve)?;
    Ok(DesignOptimum {
        depth: b.design.depth,
        size: b.design.size_a,
        power: b.power,
    })
}
