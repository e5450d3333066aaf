use entgap::inequality::{gap_with_tol, GAP_RESIDUAL_TOL};
use entgap::sampling::{scan_with_tol, SCAN_RESIDUAL_TOL};
use entgap::schmidt::{BLOCK_TOL, RANK_TOL};
use entgap::{
    canonical_counterexample, deformed_counterexample, entangled_decomposition, lhs, maximize_rhs,
    product_decomposition, schmidt_decompose, DecompositionSource, FactorShape, FourFactorState,
    LogBase, MaximizeOptions, PureState, ScanReport,
};
use serde_json::Value;

use crate::output::{emit, fmt_f64, Record};
use crate::{CliError, Format, RunConfig};

fn residual_tol(config: &RunConfig, default: f64) -> Result<f64, CliError> {
    match config.tol {
        None => Ok(default),
        Some(t) if t.is_finite() && t > 0.0 => Ok(t),
        Some(t) => Err(CliError::Input(format!(
            "--tol must be positive and finite, got {t}"
        ))),
    }
}

fn two_log(d: usize, base: LogBase) -> f64 {
    2.0 * base.log(d as f64)
}

fn load_four_factor(config: &RunConfig) -> Result<FourFactorState, CliError> {
    let path = config
        .input
        .as_ref()
        .ok_or_else(|| CliError::Input("--input is required".into()))?;
    let state = PureState::load(path)?;
    Ok(FourFactorState::new(state)?)
}

pub fn run_counterexample(config: &RunConfig) -> Result<(), CliError> {
    let tol = residual_tol(config, GAP_RESIDUAL_TOL)?;
    let base = config.log_base;
    let d = config.dim;
    let s = canonical_counterexample(d)?;
    let product = gap_with_tol(
        &s,
        &product_decomposition(d)?,
        base,
        DecompositionSource::Product,
        tol,
    )?;
    let entangled = gap_with_tol(
        &s,
        &entangled_decomposition(d)?,
        base,
        DecompositionSource::Entangled,
        tol,
    )?;
    let record = Record::new()
        .int("dim", d as u64)
        .text("log_base", base.label())
        .num("lhs", entangled.lhs)
        .num("rhs_product", product.rhs)
        .num("rhs_entangled", entangled.rhs)
        .num("gap_product", product.gap)
        .num("gap_entangled", entangled.gap)
        .num("two_log_d", two_log(d, base))
        .num("residual_product", product.residual)
        .num("residual_entangled", entangled.residual);
    emit(config, &record.render(config.format))
}

pub fn run_deform(config: &RunConfig) -> Result<(), CliError> {
    let tol = residual_tol(config, GAP_RESIDUAL_TOL)?;
    let eps = config
        .eps
        .ok_or_else(|| CliError::Input("deform needs --eps".into()))?;
    let base = config.log_base;
    let d = config.dim;
    let (s, dec) = deformed_counterexample(d, eps)?;
    let report = gap_with_tol(&s, &dec, base, DecompositionSource::Deformed, tol)?;
    let coefficients = dec.coefficients();
    let scale = coefficients.iter().copied().fold(1.0f64, f64::max);
    let unique = coefficients
        .windows(2)
        .all(|w| (w[0] - w[1]).abs() > BLOCK_TOL * scale);
    let record = Record::new()
        .int("dim", d as u64)
        .num("eps", eps)
        .text("log_base", base.label())
        .num("lhs", report.lhs)
        .num("rhs", report.rhs)
        .num("gap", report.gap)
        .num("two_log_d", two_log(d, base))
        .flag("unique", unique)
        .num("residual", report.residual)
        .nums("coefficients", coefficients);
    emit(config, &record.render(config.format))
}

fn scan_csv(report: &ScanReport) -> String {
    let mut out = String::from("sample_index,derived_seed,lhs,rhs,gap\n");
    for r in &report.per_sample {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.sample_index,
            r.derived_seed,
            fmt_f64(r.lhs),
            fmt_f64(r.rhs),
            fmt_f64(r.gap)
        ));
    }
    let opt = |x: Option<f64>| x.map_or("nan".to_string(), fmt_f64);
    let dims: Vec<String> = report.shape.dims().iter().map(|d| d.to_string()).collect();
    out.push_str(&format!("# shape={}\n", dims.join("x")));
    out.push_str(&format!("# master_seed={}\n", report.master_seed));
    out.push_str(&format!("# log_base={}\n", report.log_base.label()));
    out.push_str(&format!("# n_samples={}\n", report.n_samples));
    out.push_str(&format!("# min_gap={}\n", opt(report.min_gap)));
    out.push_str(&format!("# max_gap={}\n", opt(report.max_gap)));
    out.push_str(&format!("# mean_gap={}\n", opt(report.mean_gap)));
    out.push_str(&format!("# violation_count={}\n", report.violation_count));
    out.push_str(&format!("# failed_count={}\n", report.failed_count));
    out
}

fn scan_json(report: &ScanReport) -> String {
    let mut v = serde_json::to_value(report).expect("scan report serializes");
    crate::output::fix_precision(&mut v);
    let mut s = serde_json::to_string_pretty(&v).expect("json");
    s.push('\n');
    s
}

pub fn run_scan(config: &RunConfig) -> Result<(), CliError> {
    let tol = residual_tol(config, SCAN_RESIDUAL_TOL)?;
    let dims = config.shape.clone().unwrap_or_else(|| vec![config.dim; 4]);
    let shape = FactorShape::new(dims)?;
    let report = scan_with_tol(config.samples, &shape, config.seed, config.log_base, tol)?;
    let text = match config.format {
        Format::Json => scan_json(&report),
        Format::Csv => scan_csv(&report),
    };
    emit(config, &text)?;
    if report.per_sample.is_empty() {
        let first = report
            .failures
            .first()
            .map(|f| f.error.clone())
            .unwrap_or_default();
        return Err(CliError::Numerical(format!(
            "all {} samples failed (first: {first})",
            report.n_samples
        )));
    }
    Ok(())
}

pub fn run_check(config: &RunConfig) -> Result<(), CliError> {
    let tol = residual_tol(config, GAP_RESIDUAL_TOL)?;
    let s = load_four_factor(config)?;
    let dec = schmidt_decompose(s.state(), &FourFactorState::pair_split(), RANK_TOL)?;
    let report = gap_with_tol(&s, &dec, config.log_base, DecompositionSource::Svd, tol)?;
    let record = Record::new()
        .value("dims", Value::from(s.shape().dims().to_vec()))
        .text("log_base", config.log_base.label())
        .text("decomposition_source", report.decomposition_source.label())
        .num("lhs", report.lhs)
        .num("rhs", report.rhs)
        .num("gap", report.gap)
        .num("residual", report.residual)
        .flag(
            "violation",
            report.is_violation(entgap::sampling::VIOLATION_TOL),
        )
        .nums("coefficients", dec.coefficients());
    emit(config, &record.render(config.format))
}

pub fn run_maximize(config: &RunConfig) -> Result<(), CliError> {
    let tol = residual_tol(config, GAP_RESIDUAL_TOL)?;
    let (s, source) = match &config.input {
        Some(path) => (load_four_factor(config)?, path.display().to_string()),
        None => (
            canonical_counterexample(config.dim)?,
            format!("canonical(d={})", config.dim),
        ),
    };
    let opts = MaximizeOptions {
        restarts: config.restarts,
        sweeps: config.sweeps,
        seed: config.seed,
        log_base: config.log_base,
        residual_tol: tol,
        ..Default::default()
    };
    let out = maximize_rhs(&s, &opts)?;
    let lhs = lhs(&s, config.log_base)?;
    let record = Record::new()
        .text("state", &source)
        .text("log_base", config.log_base.label())
        .num("initial_rhs", out.initial_rhs)
        .num("best_rhs", out.report.rhs)
        .num("lhs", lhs)
        .num("gap", out.report.gap)
        .num("residual", out.report.residual)
        .value("blocks", Value::from(out.blocks.clone()))
        .int("n_blocks", out.blocks.len() as u64)
        .int("restarts", config.restarts as u64)
        .int("sweeps", config.sweeps as u64)
        .int("seed", config.seed)
        .int("evaluations", out.evaluations)
        .int("sweeps_run", out.sweeps_run as u64)
        .int("best_start", out.best_start as u64);
    emit(config, &record.render(config.format))
}
