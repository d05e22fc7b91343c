//! One runner per experiment mode.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rvas_core::power::{
    fixed_budget_curve, fixed_design_curve, optimize_depth, AnalyticBernoulli, HierarchicalMc, PowerCurve, SkipReason,
    SummaryModel,
};
use rvas_core::predictive::{cumulative_gamma, excess_ratio, gamma_k, PriorParams};
use rvas_core::seqmodel::{detection_prob, thin_with_prob, SeqConfig};
use rvas_core::simulate::{
    count_ktons, mc_kton_summary_at, sample_bernoulli_cohort, GenotypeMatrix, HierSample, KtonSpec, KtonSummary,
    ReplicateExecutor,
};
use rvas_core::{Error, RandomStream};

use crate::config::{ExperimentConfig, Mode, ModelKind};
use crate::error::CliError;
use crate::exec::RayonExecutor;
use crate::output::{sha256_hex, Cell, OutputDir, RunManifest, Table};

pub const TOOL_VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone)]
pub struct RunReport {
    pub out_dir: PathBuf,
    pub manifest: RunManifest,
}

struct Ctx<'a> {
    cfg: &'a ExperimentConfig,
    seq: SeqConfig,
    depths: Vec<f64>,
    exec: &'a RayonExecutor,
    out: OutputDir,
    warnings: Vec<String>,
}

/// Runs `cfg`, writing outputs and `manifest.json` into `out_dir`.
/// `threads == 0` uses all available cores.
pub fn run_experiment(cfg: &ExperimentConfig, out_dir: &Path, threads: usize) -> Result<RunReport, CliError> {
    cfg.validate()?;
    let started = Instant::now();
    let exec = RayonExecutor::new(threads)?;
    let mut ctx = Ctx {
        cfg,
        seq: cfg.seq_config()?,
        depths: cfg.depths()?,
        exec: &exec,
        out: OutputDir::create(out_dir)?,
        warnings: Vec::new(),
    };
    match cfg.mode {
        Mode::Phi => run_phi(&mut ctx)?,
        Mode::Predict => run_predict(&mut ctx)?,
        Mode::Simulate => run_simulate(&mut ctx)?,
        Mode::FixedDesign => run_fixed_design(&mut ctx)?,
        Mode::FixedBudget => run_budget(&mut ctx, false)?,
        Mode::Optimize => run_budget(&mut ctx, true)?,
    }
    let stochastic = cfg.mode == Mode::Simulate || (cfg.model == ModelKind::McHierarchical && cfg.mode != Mode::Phi);
    let manifest = RunManifest {
        config_digest: sha256_hex(cfg.normalized().as_bytes()),
        tool_version: TOOL_VERSION.to_owned(),
        mode: cfg.mode.name().to_owned(),
        seed: cfg.seed.filter(|_| stochastic),
        truncation_mass_bound: stochastic.then_some(0.0),
        threads: exec.threads(),
        wall_clock_seconds: started.elapsed().as_secs_f64(),
        files: ctx.out.files().to_vec(),
        warnings: ctx.warnings,
    };
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    let path = ctx.out.root().join("manifest.json");
    std::fs::write(&path, text + "\n").map_err(|e| CliError::io(&path, e))?;
    Ok(RunReport {
        out_dir: out_dir.to_path_buf(),
        manifest,
    })
}

fn priors(cfg: &ExperimentConfig) -> Result<(PriorParams, PriorParams), CliError> {
    let p = cfg.priors.as_ref().expect("validated");
    Ok((
        p.affected.to_params("priors.affected")?,
        p.unaffected.to_params("priors.unaffected")?,
    ))
}

fn run_phi(ctx: &mut Ctx) -> Result<(), CliError> {
    let mut t = Table::new(&["depth", "call_threshold", "err_rate", "phi"]);
    for &d in &ctx.depths {
        let s = ctx.seq.at_depth(d)?;
        t.push(vec![
            d.into(),
            s.call_threshold.into(),
            s.err_rate.into(),
            detection_prob(&s)?.into(),
        ]);
    }
    ctx.out.write_table("phi.csv", &t)
}

fn run_predict(ctx: &mut Ctx) -> Result<(), CliError> {
    let cfg = ctx.cfg;
    let (pa, pu) = priors(cfg)?;
    let ks = cfg.k.values();
    let mut t = Table::new(&[
        "population",
        "depth",
        "n_pilot",
        "m",
        "k",
        "phi_pilot",
        "phi_follow",
        "gamma",
        "per_sample",
        "cumulative_gamma",
    ]);
    let mut ex = Table::new(&["depth", "n_pilot", "m", "k", "phi", "excess_k", "excess_all"]);
    for &d in &ctx.depths {
        let phi = detection_prob(&ctx.seq.at_depth(d)?)?;
        for (name, prior) in [("affected", &pa), ("unaffected", &pu)] {
            for &m in &cfg.sizes {
                for &k in &ks {
                    let k = u64::from(k);
                    let gamma = if k <= m {
                        gamma_k(prior, cfg.n_pilot, m, k, cfg.phi_pilot, phi)?.gamma
                    } else {
                        0.0
                    };
                    let cum = cumulative_gamma(prior, cfg.n_pilot, m, k, cfg.phi_pilot, phi)?;
                    t.push(vec![
                        name.into(),
                        d.into(),
                        cfg.n_pilot.into(),
                        m.into(),
                        k.into(),
                        cfg.phi_pilot.into(),
                        phi.into(),
                        gamma.into(),
                        (gamma / m as f64).into(),
                        cum.into(),
                    ]);
                }
            }
        }
        for &m in &cfg.sizes {
            let all = ratio_or_nan(
                excess_ratio(&pa, &pu, cfg.n_pilot, m, None, phi),
                &mut ctx.warnings,
                d,
                m,
            )?;
            for &k in &ks {
                let k = u64::from(k);
                let ek = if k <= m {
                    ratio_or_nan(
                        excess_ratio(&pa, &pu, cfg.n_pilot, m, Some(k), phi),
                        &mut ctx.warnings,
                        d,
                        m,
                    )?
                } else {
                    f64::NAN
                };
                ex.push(vec![
                    d.into(),
                    cfg.n_pilot.into(),
                    m.into(),
                    k.into(),
                    phi.into(),
                    ek.into(),
                    all.into(),
                ]);
            }
        }
    }
    ctx.out.write_table("predict.csv", &t)?;
    ctx.out.write_table("excess.csv", &ex)
}

fn ratio_or_nan(r: rvas_core::Result<f64>, warnings: &mut Vec<String>, depth: f64, m: u64) -> Result<f64, CliError> {
    match r {
        Ok(v) => Ok(v),
        Err(Error::DivisionByZero(msg)) => {
            warnings.push(format!("excess ratio at depth {depth}, m {m}: {msg}; written as NaN"));
            Ok(f64::NAN)
        }
        Err(e) => Err(e.into()),
    }
}

fn write_matrix(out: &mut OutputDir, name: &str, m: &GenotypeMatrix) -> Result<(), CliError> {
    let mut s = format!(
        "#rvas-matrix v1 pop={} mode={} rows={} cols={}\n",
        m.population(),
        m.ploidy().name(),
        m.rows(),
        m.cols()
    );
    for r in 0..m.rows() {
        let row = m.row(r);
        for (j, v) in row.iter().enumerate() {
            if j > 0 {
                s.push(' ');
            }
            write!(s, "{v}").unwrap();
        }
        s.push('\n');
    }
    out.write_bytes(name, s.as_bytes())
}

fn summary_row(t: &mut Table, pop: &str, m: u64, depth: f64, k: u32, s: &KtonSummary) {
    t.push(vec![
        pop.into(),
        m.into(),
        depth.into(),
        k.into(),
        s.mean.into(),
        s.variance.into(),
        s.se.into(),
        s.replicates.into(),
    ]);
}

fn run_simulate(ctx: &mut Ctx) -> Result<(), CliError> {
    let cfg = ctx.cfg;
    let reps = cfg.replicates.expect("validated");
    let root = RandomStream::new(cfg.seed.expect("validated"));
    let ks = cfg.k.values();
    let mode = cfg.kton_mode.into();
    let rule = cfg.carrier_rule.into();
    let mut t = Table::new(&[
        "population",
        "size",
        "depth",
        "k",
        "mean",
        "variance",
        "se",
        "replicates",
    ]);
    for (di, &d) in ctx.depths.iter().enumerate() {
        let phi = detection_prob(&ctx.seq.at_depth(d)?)?;
        for &m in &cfg.sizes {
            match cfg.model {
                ModelKind::McHierarchical => {
                    let h = cfg.hierarchy.as_ref().expect("validated");
                    let hp = h.to_params()?;
                    let sizes = vec![m as usize; h.populations.len()];
                    for &k in &ks {
                        let mut spec = KtonSpec::new(k, mode, cfg.exclusive)?;
                        spec.carrier_rule = rule;
                        let s = mc_kton_summary_at(&hp, &sizes, phi, &spec, reps, &root, ctx.exec)?;
                        for (p, pop) in h.populations.iter().enumerate() {
                            summary_row(&mut t, &pop.name, m, d, k, &s[p]);
                        }
                    }
                    if cfg.dump_matrices {
                        let (called, _) = HierSample::draw(&hp, &sizes, phi, &root.child(0))?.to_matrices();
                        for (p, mat) in called.iter().enumerate() {
                            write_matrix(&mut ctx.out, &format!("matrices/d{di}_m{m}_pop{p}.txt"), mat)?;
                        }
                    }
                }
                ModelKind::AnalyticBernoulli => {
                    let (pa, pu) = priors(cfg)?;
                    for (p, (name, prior)) in [("affected", pa), ("unaffected", pu)].into_iter().enumerate() {
                        // Replicate streams do not depend on depth, so depths share
                        // the same underlying cohorts.
                        let base = root.child(p as u64).child(m);
                        let job = |r: usize| -> rvas_core::Result<Vec<f64>> {
                            let s = base.child(r as u64);
                            let x = sample_bernoulli_cohort(&prior, m as usize, &s.child(0))?;
                            let z = thin_with_prob(&x, phi, &s.child(1))?;
                            Ok(ks
                                .iter()
                                .map(|&k| count_ktons(&z, k, mode, rule) as f64 / m as f64)
                                .collect())
                        };
                        let runs: Vec<Vec<f64>> = ctx.exec.run(reps, job).into_iter().collect::<Result<_, _>>()?;
                        for (i, &k) in ks.iter().enumerate() {
                            let values: Vec<f64> = runs.iter().map(|r| r[i]).collect();
                            summary_row(&mut t, name, m, d, k, &KtonSummary::from_values(&values)?);
                        }
                        if cfg.dump_matrices {
                            let s = base.child(0);
                            let x = sample_bernoulli_cohort(&prior, m as usize, &s.child(0))?;
                            let z = thin_with_prob(&x, phi, &s.child(1))?;
                            write_matrix(&mut ctx.out, &format!("matrices/d{di}_m{m}_pop{p}.txt"), &z)?;
                        }
                    }
                }
            }
        }
    }
    ctx.out.write_table("simulate.csv", &t)
}

/// Builds the configured summary model for one `k` and hands it to `f`.
fn with_model<R>(ctx: &Ctx, k: u32, f: impl FnOnce(&dyn SummaryModel) -> Result<R, CliError>) -> Result<R, CliError> {
    let cfg = ctx.cfg;
    match cfg.model {
        ModelKind::AnalyticBernoulli => {
            let (pa, pu) = priors(cfg)?;
            f(&AnalyticBernoulli::new(pa, pu, u64::from(k), cfg.kton_mode.into())?)
        }
        ModelKind::McHierarchical => {
            let hp = cfg.hierarchy.as_ref().expect("validated").to_params()?;
            let mut spec = KtonSpec::new(k, cfg.kton_mode.into(), cfg.exclusive)?;
            spec.carrier_rule = cfg.carrier_rule.into();
            let model = HierarchicalMc::new(
                hp,
                spec,
                cfg.replicates.expect("validated"),
                RandomStream::new(cfg.seed.expect("validated")),
                cfg.variance.into(),
                ctx.exec,
            )?;
            f(&model)
        }
    }
}

const CURVE_COLUMNS: [&str; 9] = [
    "depth", "size", "mean_A", "mean_U", "var_A", "var_U", "T", "df", "power",
];

fn curve_rows(curve: &PowerCurve, prefix: &[Cell], t: &mut Table, se: &mut Table) {
    for p in &curve.points {
        let mut row = prefix.to_vec();
        row.extend([
            p.design.depth.into(),
            p.design.size_a.into(),
            p.affected.mean.into(),
            p.unaffected.mean.into(),
            p.affected.variance.into(),
            p.unaffected.variance.into(),
            p.statistic.into(),
            p.welch_df.into(),
            p.power.into(),
        ]);
        t.push(row);
        if let Some(s) = p.power_se {
            let mut row = prefix.to_vec();
            row.extend([p.design.depth.into(), p.design.size_a.into(), p.power.into(), s.into()]);
            se.push(row);
        }
    }
}

fn note_skipped(curve: &PowerCurve, k: u32, warnings: &mut Vec<String>) {
    for s in &curve.skipped {
        let why = match s.reason {
            SkipReason::Infeasible => "no sample fits the budget",
            SkipReason::Degenerate => "both groups have zero variance",
        };
        let budget = curve.budget.map(|b| format!("budget {b}, ")).unwrap_or_default();
        warnings.push(format!(
            "skipped {budget}k {k}, depth {}, size {}: {why}",
            s.depth, s.size
        ));
    }
}

fn run_fixed_design(ctx: &mut Ctx) -> Result<(), CliError> {
    let cfg = ctx.cfg;
    let k = cfg.k.values()[0];
    let curve = with_model(ctx, k, |m| {
        Ok(fixed_design_curve(
            m,
            &ctx.depths,
            &cfg.sizes,
            &ctx.seq,
            cfg.significance,
        )?)
    })?;
    let mut t = Table::new(&CURVE_COLUMNS);
    let mut se = Table::new(&["depth", "size", "power", "power_se"]);
    curve_rows(&curve, &[], &mut t, &mut se);
    note_skipped(&curve, k, &mut ctx.warnings);
    ctx.out.write_table("fixed_design.csv", &t)?;
    if !se.rows.is_empty() {
        ctx.out.write_table("power_se.csv", &se)?;
    }
    if cfg.gnuplot {
        let script = gnuplot_fixed_design(&ctx.depths);
        ctx.out.write_bytes("fixed_design.gp", script.as_bytes())?;
    }
    Ok(())
}

fn run_budget(ctx: &mut Ctx, optimize: bool) -> Result<(), CliError> {
    let cfg = ctx.cfg;
    let cm = cfg.cost_model()?;
    let mut header = vec!["budget", "k"];
    header.extend(CURVE_COLUMNS);
    let mut t = Table::new(&header);
    let mut se = Table::new(&["budget", "k", "depth", "size", "power", "power_se"]);
    let mut best = Table::new(&["budget", "k", "depth", "size", "power"]);
    for &budget in &cfg.budgets {
        for k in cfg.k.values() {
            let curve = with_model(ctx, k, |m| {
                Ok(fixed_budget_curve(
                    m,
                    budget,
                    &ctx.depths,
                    &cm,
                    &ctx.seq,
                    cfg.significance,
                )?)
            })?;
            let prefix = [Cell::Float(budget), Cell::from(k)];
            curve_rows(&curve, &prefix, &mut t, &mut se);
            note_skipped(&curve, k, &mut ctx.warnings);
            if optimize {
                let o = optimize_depth(&curve)?;
                best.push(vec![
                    budget.into(),
                    k.into(),
                    o.depth.into(),
                    o.size.into(),
                    o.power.into(),
                ]);
            }
        }
    }
    let name = if optimize { "curve.csv" } else { "fixed_budget.csv" };
    ctx.out.write_table(name, &t)?;
    if !se.rows.is_empty() {
        ctx.out.write_table("power_se.csv", &se)?;
    }
    if optimize {
        ctx.out.write_table("optimum.csv", &best)?;
    }
    if cfg.gnuplot {
        let script = gnuplot_budget(name, &cfg.budgets, &cfg.k.values());
        ctx.out.write_bytes(&name.replace(".csv", ".gp"), script.as_bytes())?;
    }
    Ok(())
}

fn gnuplot_fixed_design(depths: &[f64]) -> String {
    let mut s = String::from(
        "set datafile separator ','\nset key autotitle columnhead\nset xlabel 'samples per group'\nset ylabel 'power'\n",
    );
    let plots: Vec<String> = depths
        .iter()
        .map(|d| format!("'fixed_design.csv' using ($1=={d:.16e} ? $2 : 1/0):9 with linespoints title 'depth {d}'"))
        .collect();
    writeln!(s, "plot {}", plots.join(", \\\n     ")).unwrap();
    s
}

fn gnuplot_budget(csv: &str, budgets: &[f64], ks: &[u32]) -> String {
    let mut s = String::from("set datafile separator ','\nset logscale x\nset xlabel 'depth'\nset ylabel 'power'\n");
    let mut plots = Vec::new();
    for b in budgets {
        for k in ks {
            plots.push(format!(
                "'{csv}' using (($1=={b:.16e} && $2=={k}) ? $3 : 1/0):11 with linespoints title 'B={b} k={k}'"
            ));
        }
    }
    writeln!(s, "plot {}", plots.join(", \\\n     ")).unwrap();
    s
}
