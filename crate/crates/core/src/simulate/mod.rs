//! Generative samplers and count statistics.
//!
//! * [`sample_bernoulli_cohort`]: exact marginal sampler for the 3BP–Bernoulli
//!   model (binary matrices).
//! * [`sample_shared_measure`]: truncated draw of the 3BP frequency measure.
//! * [`sample_hier_cohorts`] / [`HierSample`]: exact hierarchical sampler with
//!   diploid Hardy–Weinberg genotypes and per-allele calling.
//! * [`count_ktons`], [`count_exclusive_ktons`], [`mc_kton_summary`]: count
//!   statistics and their Monte Carlo summaries.

pub(crate) mod draw;
mod hier;
mod ibp;
mod matrix;
mod measure;
mod summary;

pub use hier::{hwe_probs, sample_hier_cohorts, Carrier, HierCohorts, HierParams, HierSample, PopulationParams};
pub use ibp::{new_variant_rate, sample_bernoulli_cohort};
pub use matrix::{count_exclusive_ktons, count_ktons, CarrierRule, GenotypeMatrix, KtonMode, Ploidy};
pub use measure::{
    sample_shared_measure, sample_shared_measure_with, truncation_bound, FrequencyMeasure, DEFAULT_ATOM_BUDGET,
    DEFAULT_TRUNCATION_TARGET,
};
pub use summary::{
    kton_replicate, mc_kton_summary, mc_kton_summary_at, KtonSpec, KtonSummary, ReplicateExecutor, Sequential,
};
