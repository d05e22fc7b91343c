//! JSON experiment configuration.
//!
//! Hyperparameters are always named (`mass`, `concentration`, `discount`),
//! never positional. Unknown keys are rejected.

use serde::{Deserialize, Serialize};

use rvas_core::power::{default_depth_grid, VarianceEstimator};
use rvas_core::predictive::PriorParams;
use rvas_core::seqmodel::{CostModel, SeqConfig};
use rvas_core::simulate::{CarrierRule, HierParams, KtonMode, PopulationParams};

use crate::error::{invalid, CliError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Phi,
    Predict,
    Simulate,
    FixedDesign,
    FixedBudget,
    Optimize,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Phi => "phi",
            Mode::Predict => "predict",
            Mode::Simulate => "simulate",
            Mode::FixedDesign => "fixed_design",
            Mode::FixedBudget => "fixed_budget",
            Mode::Optimize => "optimize",
        }
    }

    fn uses_budget(self) -> bool {
        matches!(self, Mode::FixedBudget | Mode::Optimize)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    #[default]
    AnalyticBernoulli,
    McHierarchical,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriorSpec {
    pub mass: f64,
    pub concentration: f64,
    pub discount: f64,
}

impl PriorSpec {
    pub fn to_params(self, context: &str) -> Result<PriorParams, CliError> {
        PriorParams::new(self.mass, self.concentration, self.discount).map_err(invalid(context))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Priors {
    pub affected: PriorSpec,
    pub unaffected: PriorSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PopulationSpec {
    pub name: String,
    pub a: f64,
    pub b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Hierarchy {
    pub shared: PriorSpec,
    pub populations: Vec<PopulationSpec>,
}

impl Hierarchy {
    pub fn to_params(&self) -> Result<HierParams, CliError> {
        let shared = self.shared.to_params("hierarchy.shared")?;
        let pops = self
            .populations
            .iter()
            .map(|p| PopulationParams { a: p.a, b: p.b })
            .collect();
        HierParams::new(shared, pops).map_err(invalid("hierarchy"))
    }
}

/// Log-spaced depth grid with `count` points on `[min, max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DepthGrid {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl DepthGrid {
    pub fn points(&self) -> Result<Vec<f64>, CliError> {
        if !(self.min > 0.0 && self.max >= self.min && self.max.is_finite()) || self.count == 0 {
            return Err(CliError::Validation(
                "seq.depth_grid needs 0 < min <= max and count >= 1".into(),
            ));
        }
        if self.count == 1 {
            return Ok(vec![self.min]);
        }
        let (lo, hi) = (self.min.ln(), self.max.ln());
        let last = (self.count - 1) as f64;
        let mut v: Vec<f64> = (0..self.count)
            .map(|i| (lo + (hi - lo) * i as f64 / last).exp())
            .collect();
        // Pin the ends so they are exactly the configured values.
        v[0] = self.min;
        v[self.count - 1] = self.max;
        Ok(v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeqSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depths: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth_grid: Option<DepthGrid>,
    pub call_threshold: u32,
    pub err_rate: f64,
}

fn zero() -> f64 {
    0.0
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostSpec {
    #[serde(default = "zero")]
    pub fixed_cost: f64,
    #[serde(default = "one")]
    pub per_sample_rate: f64,
}

impl Default for CostSpec {
    fn default() -> Self {
        CostSpec {
            fixed_cost: 0.0,
            per_sample_rate: 1.0,
        }
    }
}

/// `k` may be one value or a list (the budget modes sweep a list).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum KSpec {
    One(u32),
    Many(Vec<u32>),
}

impl Default for KSpec {
    fn default() -> Self {
        KSpec::One(1)
    }
}

impl KSpec {
    pub fn values(&self) -> Vec<u32> {
        match self {
            KSpec::One(k) => vec![*k],
            KSpec::Many(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KtonModeSpec {
    #[default]
    Exact,
    AtMost,
}

impl From<KtonModeSpec> for KtonMode {
    fn from(m: KtonModeSpec) -> Self {
        match m {
            KtonModeSpec::Exact => KtonMode::Exact,
            KtonModeSpec::AtMost => KtonMode::AtMost,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CarrierRuleSpec {
    #[default]
    AnyNonzero,
    AlleleCount,
}

impl From<CarrierRuleSpec> for CarrierRule {
    fn from(r: CarrierRuleSpec) -> Self {
        match r {
            CarrierRuleSpec::AnyNonzero => CarrierRule::AnyNonzero,
            CarrierRuleSpec::AlleleCount => CarrierRule::AlleleCount,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VarianceSpec {
    #[default]
    Replicate,
    Poisson,
}

impl From<VarianceSpec> for VarianceEstimator {
    fn from(v: VarianceSpec) -> Self {
        match v {
            VarianceSpec::Replicate => VarianceEstimator::Replicate,
            VarianceSpec::Poisson => VarianceEstimator::Poisson,
        }
    }
}

fn default_significance() -> f64 {
    0.05
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub mode: Mode,
    #[serde(default)]
    pub model: ModelKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub priors: Option<Priors>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hierarchy: Option<Hierarchy>,
    pub seq: SeqSpec,
    #[serde(default)]
    pub cost: CostSpec,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub budgets: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sizes: Vec<u64>,
    #[serde(default)]
    pub k: KSpec,
    #[serde(default)]
    pub kton_mode: KtonModeSpec,
    #[serde(default)]
    pub exclusive: bool,
    #[serde(default)]
    pub carrier_rule: CarrierRuleSpec,
    #[serde(default = "default_significance")]
    pub significance: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub replicates: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default)]
    pub variance: VarianceSpec,
    /// Pilot size `N` for `predict`.
    #[serde(default)]
    pub n_pilot: u64,
    /// Pilot detection probability for `predict`.
    #[serde(default = "one")]
    pub phi_pilot: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<String>,
    /// Write replicate-0 matrices in `simulate` mode.
    #[serde(default)]
    pub dump_matrices: bool,
    /// Write a gnuplot script next to the CSV.
    #[serde(default)]
    pub gnuplot: bool,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(CliError::Parse)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Compact JSON of the parsed config with defaults filled in. Field
    /// order is fixed by the struct, so equal configs give equal text.
    pub fn normalized(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Validation(msg));
        self.seq_config()?;
        self.cost_model()?;
        self.depths()?;
        if !(self.significance > 0.0 && self.significance < 1.0) {
            return bad(format!("significance = {} must lie in (0, 1)", self.significance));
        }
        if !(0.0..=1.0).contains(&self.phi_pilot) {
            return bad(format!("phi_pilot = {} must lie in [0, 1]", self.phi_pilot));
        }
        let ks = self.k.values();
        if ks.is_empty() || ks.contains(&0) {
            return bad("k must be a positive integer or a nonempty list of them".into());
        }
        if ks.len() > 1 && matches!(self.mode, Mode::FixedDesign) {
            return bad("fixed_design takes a single k".into());
        }
        if self.mode != Mode::Phi {
            match self.model {
                ModelKind::AnalyticBernoulli => {
                    let Some(p) = &self.priors else {
                        return bad("analytic_bernoulli needs `priors` with `affected` and `unaffected`".into());
                    };
                    p.affected.to_params("priors.affected")?;
                    p.unaffected.to_params("priors.unaffected")?;
                    if self.exclusive {
                        return bad("`exclusive` applies only to mc_hierarchical".into());
                    }
                }
                ModelKind::McHierarchical => {
                    let Some(h) = &self.hierarchy else {
                        return bad("mc_hierarchical needs `hierarchy`".into());
                    };
                    h.to_params()?;
                    if self.mode == Mode::Predict {
                        return bad("predict is analytic; use model analytic_bernoulli".into());
                    }
                    if self.mode != Mode::Simulate && h.populations.len() != 2 {
                        return bad("power modes need exactly two populations (affected first)".into());
                    }
                }
            }
        }
        let stochastic =
            self.mode == Mode::Simulate || (self.model == ModelKind::McHierarchical && self.mode != Mode::Phi);
        if stochastic {
            if self.seed.is_none() {
                return bad("`seed` is mandatory for Monte Carlo runs".into());
            }
            match self.replicates {
                Some(r) if r >= 2 => {}
                _ => return bad("`replicates` must be given and >= 2 for Monte Carlo runs".into()),
            }
        }
        let needs_sizes = matches!(self.mode, Mode::Predict | Mode::Simulate | Mode::FixedDesign);
        if needs_sizes && (self.sizes.is_empty() || self.sizes.contains(&0)) {
            return bad(format!(
                "{} needs a nonempty `sizes` list of positive integers",
                self.mode.name()
            ));
        }
        if self.mode.uses_budget() {
            if self.budgets.is_empty() {
                return bad(format!("{} needs a nonempty `budgets` list", self.mode.name()));
            }
            if let Some(b) = self
                .budgets
                .iter()
                .find(|&&b| !(b > self.cost.fixed_cost) || !b.is_finite())
            {
                return bad(format!("budget {b} must be finite and exceed fixed_cost"));
            }
        }
        Ok(())
    }

    /// Base sequencing parameters (at the first grid depth).
    pub fn seq_config(&self) -> Result<SeqConfig, CliError> {
        SeqConfig::new(1.0, self.seq.call_threshold, self.seq.err_rate).map_err(invalid("seq"))
    }

    pub fn cost_model(&self) -> Result<CostModel, CliError> {
        CostModel::new(self.cost.fixed_cost, self.cost.per_sample_rate).map_err(invalid("cost"))
    }

    /// Depth grid, ascending. Budget modes fall back to the default 40-point
    /// grid on [1, 100]; other modes require depths.
    pub fn depths(&self) -> Result<Vec<f64>, CliError> {
        let mut d = match (&self.seq.depths, &self.seq.depth_grid) {
            (Some(_), Some(_)) => {
                return Err(CliError::Validation(
                    "give either seq.depths or seq.depth_grid, not both".into(),
                ))
            }
            (Some(v), None) => v.clone(),
            (None, Some(g)) => g.points()?,
            (None, None) if self.mode.uses_budget() => default_depth_grid(),
            (None, None) => return Err(CliError::Validation("seq.depths or seq.depth_grid is required".into())),
        };
        if d.is_empty() {
            return Err(CliError::Validation("depth list is empty".into()));
        }
        let min_depth = if self.mode.uses_budget() {
            f64::MIN_POSITIVE
        } else {
            0.0
        };
        if let Some(x) = d.iter().find(|&&x| !(x >= min_depth) || !x.is_finite()) {
            return Err(CliError::Validation(format!("depth {x} is out of range")));
        }
        d.sort_by(f64::total_cmp);
        Ok(d)
    }
}
