//! Command-line front end: versioned JSON run configs, the five subcommands
//! (`simulate`, `estimate`, `rate-study`, `assouad`, `diagnose`), and the
//! artifact layout (CSV tables, JSON summaries, binary grids).
//!
//! Exit codes: 0 success, 1 configuration error, 2 solver failure budget
//! exceeded, 3 I/O failure. All artifacts are written atomically and all
//! numeric CSV cells use shortest round-trip formatting, so a rerun with the
//! same resolved config and seed reproduces every CSV byte for byte,
//! regardless of `--threads`.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::experiments::{
    assouad_family, discretization_error, interpolation_diagnostic, kl_divergence, rate_study,
    theta, RateStudyConfig,
};
use crate::grids::{linf_norm, lq_norm, make_phantom, PhantomSpec};
use crate::io::{write_atomic, write_csv, write_grid, write_json};
use crate::noise::{simulate, threshold_gamma, NoiseModel, Observation};
use crate::operators::{OperatorModel, VagueletteDict, VagueletteMode};
use crate::solver::{estimate, SolverConfig};
use crate::wavelets::{analyze, besov_norm, index_set_omega_n, WaveletBasis};
use crate::{Error, Result};

/// Version of the run-config JSON schema accepted by this binary.
pub const SCHEMA_VERSION: u32 = 1;

fn default_kappa() -> f64 {
    1.5
}

fn default_max_patterns() -> usize {
    128
}

fn default_diagnose_q() -> f64 {
    2.0
}

fn default_diagnose_n() -> usize {
    256
}

/// Noise section of a run config (observation model of Eq. (1)/(19)).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct NoiseSection {
    pub n: usize,
    pub sigma: f64,
    pub model: NoiseModel,
    /// Mandatory for any stochastic run; `--seed` overrides it.
    pub seed: u64,
}

/// Threshold section; κ = 1.5 by default (satisfies κ > 1 and
/// κ² > 1 + 1/(d+2β+2) for every supported (d, β)).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct ThresholdSection {
    #[serde(default = "default_kappa")]
    pub kappa: f64,
}

impl Default for ThresholdSection {
    fn default() -> Self {
        ThresholdSection { kappa: default_kappa() }
    }
}

/// Config of `simulate`: draw one observation of T f.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct SimulateConfig {
    pub operator: OperatorModel,
    /// Defaults to the smallest R admissible for (d, β).
    pub vanishing_moments: Option<usize>,
    pub phantom: PhantomSpec,
    /// Grid resolution per axis; defaults to n^{1/d} in regression mode.
    pub m: Option<usize>,
    pub noise: NoiseSection,
    #[serde(default)]
    pub threshold: ThresholdSection,
}

/// Config of `estimate`: simulate, then run the multiscale TV estimator.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct EstimateConfig {
    pub operator: OperatorModel,
    pub vanishing_moments: Option<usize>,
    pub phantom: PhantomSpec,
    pub m: Option<usize>,
    pub noise: NoiseSection,
    #[serde(default)]
    pub threshold: ThresholdSection,
    #[serde(default)]
    pub solver: SolverConfig,
}

/// Config of `assouad`: realize the lower-bound alternative family.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct AssouadConfig {
    pub d: usize,
    pub vanishing_moments: Option<usize>,
    /// Wavelet level j of the family.
    pub level: usize,
    /// BV/L∞ budget L of the class.
    pub l: f64,
    pub m: usize,
    #[serde(default = "default_max_patterns")]
    pub max_patterns: usize,
    pub seed: u64,
    /// When present (with `noise`), adjacent-pattern KL divergences are
    /// reported against this forward operator.
    pub operator: Option<OperatorModel>,
    pub noise: Option<NoiseSection>,
}

/// Config of `diagnose`: interpolation-inequality and discretization-error
/// diagnostics over a phantom family.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct DiagnoseConfig {
    pub operator: OperatorModel,
    pub vanishing_moments: Option<usize>,
    pub phantoms: Vec<PhantomSpec>,
    /// Strictly increasing resolutions probed for the discretization decay.
    pub m_list: Vec<usize>,
    #[serde(default = "default_diagnose_q")]
    pub q: f64,
    /// Sample size fixing the dictionary cutoff Ω_n.
    #[serde(default = "default_diagnose_n")]
    pub n: usize,
}

/// Per-subcommand payload, tagged by the `command` field.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum CommandConfig {
    Simulate(SimulateConfig),
    Estimate(EstimateConfig),
    RateStudy(RateStudyConfig),
    Assouad(AssouadConfig),
    Diagnose(DiagnoseConfig),
}

impl CommandConfig {
    fn name(&self) -> &'static str {
        match self {
            CommandConfig::Simulate(_) => "simulate",
            CommandConfig::Estimate(_) => "estimate",
            CommandConfig::RateStudy(_) => "rate-study",
            CommandConfig::Assouad(_) => "assouad",
            CommandConfig::Diagnose(_) => "diagnose",
        }
    }
}

/// Top-level run config: a schema version plus the tagged command payload.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub schema: u32,
    #[serde(flatten)]
    pub command: CommandConfig,
}

/// Smallest vanishing-moment count R with min{R, D} > max{1, d/2 + β}
/// (smoothness needed by the vaguelette construction; for the bases here
/// the smoothness order D grows with R, so R itself is the binding side).
pub fn default_moments(d: usize, beta: f64) -> usize {
    let need = (d as f64 / 2.0 + beta).max(1.0);
    need.floor() as usize + 1
}

#[derive(Parser, Debug)]
#[command(name = "mstv", version, about = "Multiscale total-variation estimation for linear inverse problems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Subcommand, Debug)]
pub enum CliCommand {
    /// Draw one noisy observation of T f.
    Simulate(RunArgs),
    /// Simulate and reconstruct with the multiscale TV estimator.
    Estimate(RunArgs),
    /// Monte-Carlo study of the L^q-risk convergence exponent.
    RateStudy(RunArgs),
    /// Realize the Assouad lower-bound family with norm certificates.
    Assouad(RunArgs),
    /// Interpolation-inequality and discretization-error diagnostics.
    Diagnose(RunArgs),
}

#[derive(Args, Debug)]
pub struct RunArgs {
    /// Path of the JSON run config.
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides the seed of the config file.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Caps the Monte-Carlo worker count (results do not depend on it).
    #[arg(long)]
    pub threads: Option<usize>,
    /// Output directory for all artifacts.
    #[arg(long)]
    pub out: PathBuf,
}

/// Parses the process arguments and runs; the returned code follows the
/// exit-code contract in the module docs.
pub fn main_entry() -> ExitCode {
    ExitCode::from(run(Cli::parse()))
}

/// Runs one parsed invocation and maps errors to exit codes.
pub fn run(cli: Cli) -> u8 {
    let (name, args) = match &cli.command {
        CliCommand::Simulate(a) => ("simulate", a),
        CliCommand::Estimate(a) => ("estimate", a),
        CliCommand::RateStudy(a) => ("rate-study", a),
        CliCommand::Assouad(a) => ("assouad", a),
        CliCommand::Diagnose(a) => ("diagnose", a),
    };
    match execute(name, args) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            exit_code(&err)
        }
    }
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Solver(_) => 2,
        Error::Io(_) => 3,
        _ => 1,
    }
}

fn execute(name: &str, args: &RunArgs) -> Result<()> {
    let mut cfg = load_config(&args.config, args.seed)?;
    if cfg.command.name() != name {
        return Err(Error::Config {
            field: "command".into(),
            message: format!("config declares `{}` but the subcommand is `{name}`", cfg.command.name()),
        });
    }
    resolve_defaults(&mut cfg)?;
    let body = move || dispatch(&cfg, &args.out);
    match args.threads {
        None => body(),
        Some(t) => {
            if t == 0 {
                return Err(Error::Config {
                    field: "threads".into(),
                    message: "--threads must be ≥ 1".into(),
                });
            }
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| Error::Config { field: "threads".into(), message: e.to_string() })?;
            pool.install(body)
        }
    }
}

/// Reads and parses the config, applying the `--seed` override before
/// deserialization so a file without a seed plus `--seed` is still valid
/// (and a stochastic config without either fails naming the seed field).
pub fn load_config(path: &Path, seed_override: Option<u64>) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)?;
    let mut value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| Error::Config { field: "config".into(), message: e.to_string() })?;
    if let Some(seed) = seed_override {
        let slot = match value.get("command").and_then(|c| c.as_str()) {
            Some("simulate") | Some("estimate") => {
                value.get_mut("noise").map(|n| (n, "seed"))
            }
            Some("rate-study") | Some("assouad") => Some((&mut value, "seed")),
            _ => None,
        };
        if let Some((obj, key)) = slot {
            if let Some(map) = obj.as_object_mut() {
                map.insert(key.into(), serde_json::json!(seed));
            }
        }
    }
    let cfg: RunConfig = serde_json::from_value(value)
        .map_err(|e| Error::Config { field: "config".into(), message: e.to_string() })?;
    if cfg.schema != SCHEMA_VERSION {
        return Err(Error::Config {
            field: "schema".into(),
            message: format!("unsupported schema version {} (expected {SCHEMA_VERSION})", cfg.schema),
        });
    }
    Ok(cfg)
}

/// Materializes the defaulted fields (R, m) so the echoed resolved config
/// describes the run completely.
fn resolve_defaults(cfg: &mut RunConfig) -> Result<()> {
    match &mut cfg.command {
        CommandConfig::Simulate(c) => {
            resolve_moments(&mut c.vanishing_moments, c.operator.dim(), c.operator.beta());
            c.m = Some(resolve_m(c.m, &c.noise, c.operator.dim())?);
        }
        CommandConfig::Estimate(c) => {
            resolve_moments(&mut c.vanishing_moments, c.operator.dim(), c.operator.beta());
            c.m = Some(resolve_m(c.m, &c.noise, c.operator.dim())?);
        }
        CommandConfig::Assouad(c) => {
            let beta = c.operator.as_ref().map_or(0.0, |op| op.beta());
            resolve_moments(&mut c.vanishing_moments, c.d, beta);
        }
        CommandConfig::Diagnose(c) => {
            resolve_moments(&mut c.vanishing_moments, c.operator.dim(), c.operator.beta());
        }
        CommandConfig::RateStudy(_) => {}
    }
    Ok(())
}

fn resolve_moments(slot: &mut Option<usize>, d: usize, beta: f64) {
    if slot.is_none() {
        *slot = Some(default_moments(d, beta));
    }
}

/// m defaults to n^{1/d} in regression mode (the design grid Γ_n has
/// n = m^d points); in the white-noise model it must be given explicitly.
fn resolve_m(m: Option<usize>, noise: &NoiseSection, d: usize) -> Result<usize> {
    if let Some(m) = m {
        return Ok(m);
    }
    if noise.model != NoiseModel::Regression {
        return Err(Error::Config {
            field: "m".into(),
            message: "m is required in the white-noise model".into(),
        });
    }
    let m = (noise.n as f64).powf(1.0 / d as f64).round() as usize;
    if m.pow(d as u32) != noise.n {
        return Err(Error::Config {
            field: "n".into(),
            message: format!("regression mode needs n = m^d; n = {} is not a d-th power", noise.n),
        });
    }
    Ok(m)
}

fn dispatch(cfg: &RunConfig, out: &Path) -> Result<()> {
    std::fs::create_dir_all(out)?;
    write_json(&out.join("resolved-config.json"), cfg)?;
    match &cfg.command {
        CommandConfig::Simulate(c) => run_simulate(c, out),
        CommandConfig::Estimate(c) => run_estimate(c, out),
        CommandConfig::RateStudy(c) => run_rate_study(c, out),
        CommandConfig::Assouad(c) => run_assouad(c, out),
        CommandConfig::Diagnose(c) => run_diagnose(c, out),
    }
}

/// Summary JSON common to every run: the audit parameters n, σ, κ, γ_n,
/// #Ω_n, β (null where a parameter has no meaning for the command).
#[derive(Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
struct Summary {
    command: &'static str,
    n: Option<usize>,
    sigma: Option<f64>,
    kappa: Option<f64>,
    gamma_n: Option<f64>,
    omega_count: Option<usize>,
    beta: Option<f64>,
    #[serde(flatten)]
    extra: serde_json::Value,
}

fn fmt(v: f64) -> String {
    format!("{v}")
}

/// Writes the observation in the binary grid layout with a JSON header
/// `{model, n, sigma, seed, desc}` followed by little-endian f64 cells.
fn write_observation(path: &Path, obs: &Observation) -> Result<()> {
    #[derive(Serialize)]
    #[serde(rename_all = "kebab-case")]
    struct Header<'a> {
        model: NoiseModel,
        n: usize,
        sigma: f64,
        seed: u64,
        desc: &'a crate::operators::CodomainDesc,
    }
    let header = Header {
        model: obs.model,
        n: obs.n,
        sigma: obs.sigma,
        seed: obs.seed,
        desc: &obs.data.desc,
    };
    let mut bytes = serde_json::to_vec(&header)?;
    bytes.push(b'\n');
    for v in &obs.data.values {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    write_atomic(path, &bytes)
}

/// Builds the pieces shared by `simulate` and `estimate`: phantom, data,
/// observation, dictionary, and the threshold γ_n of Eq. (15).
struct Pipeline {
    truth: crate::grids::Phantom,
    obs: Observation,
    dict: VagueletteDict,
    gamma_n: f64,
}

fn build_pipeline(
    op: &OperatorModel,
    moments: usize,
    phantom: &PhantomSpec,
    m: usize,
    noise: &NoiseSection,
    kappa: f64,
) -> Result<Pipeline> {
    let d = op.dim();
    let basis = WaveletBasis::new(moments, d)?;
    let truth = make_phantom(phantom, m, d)?;
    let tf = op.apply(&truth.signal)?;
    let obs = simulate(&tf, noise.n, noise.sigma, noise.model, noise.seed)?;
    let omega = index_set_omega_n(noise.n, d, &basis)?;
    let dict = VagueletteDict::build(op, &basis, &omega, m, VagueletteMode::ExactDiscrete)?;
    let (_, c2) = op.frame_bounds(&basis, 64)?;
    let gamma_n = threshold_gamma(noise.n, noise.sigma, kappa, c2, dict.len().max(2))?;
    Ok(Pipeline { truth, obs, dict, gamma_n })
}

fn run_simulate(cfg: &SimulateConfig, out: &Path) -> Result<()> {
    let moments = cfg.vanishing_moments.expect("resolved");
    let m = cfg.m.expect("resolved");
    let pipe =
        build_pipeline(&cfg.operator, moments, &cfg.phantom, m, &cfg.noise, cfg.threshold.kappa)?;
    write_grid(&out.join("truth.grid"), &pipe.truth.signal)?;
    write_observation(&out.join("observation.bin"), &pipe.obs)?;
    let rows: Vec<Vec<String>> = pipe
        .obs
        .data
        .values
        .iter()
        .enumerate()
        .map(|(i, v)| vec![i.to_string(), fmt(*v)])
        .collect();
    write_csv(&out.join("observation.csv"), &["cell", "value"], &rows)?;
    let summary = Summary {
        command: "simulate",
        n: Some(cfg.noise.n),
        sigma: Some(cfg.noise.sigma),
        kappa: Some(cfg.threshold.kappa),
        gamma_n: Some(pipe.gamma_n),
        omega_count: Some(pipe.dict.len()),
        beta: Some(cfg.operator.beta()),
        extra: serde_json::json!({
            "m": m,
            "d": cfg.operator.dim(),
            "seed": cfg.noise.seed,
            "bv-truth": pipe.truth.meta.bv_seminorm,
        }),
    };
    write_json(&out.join("summary.json"), &summary)
}

fn run_estimate(cfg: &EstimateConfig, out: &Path) -> Result<()> {
    let moments = cfg.vanishing_moments.expect("resolved");
    let m = cfg.m.expect("resolved");
    let pipe =
        build_pipeline(&cfg.operator, moments, &cfg.phantom, m, &cfg.noise, cfg.threshold.kappa)?;
    let mut solver = cfg.solver.clone();
    if !solver.linf_cap.is_finite() {
        solver.linf_cap = (cfg.noise.n as f64).ln();
    }
    let res = estimate(&pipe.obs, &pipe.dict, pipe.gamma_n, &solver)?;
    write_grid(&out.join("truth.grid"), &pipe.truth.signal)?;
    write_grid(&out.join("estimate.grid"), &res.f_hat)?;
    write_observation(&out.join("observation.bin"), &pipe.obs)?;
    let empirical = pipe.dict.coeffs(&pipe.obs.data)?;
    let fitted = pipe.dict.coeffs(&cfg.operator.apply(&res.f_hat)?)?;
    let rows: Vec<Vec<String>> = pipe
        .dict
        .indices()
        .iter()
        .zip(empirical.iter().zip(&fitted))
        .map(|(idx, (y, f))| {
            vec![
                idx.j.to_string(),
                idx.k[0].to_string(),
                idx.k[1].to_string(),
                idx.e[0].to_string(),
                idx.e[1].to_string(),
                fmt(*y),
                fmt(*f),
                fmt(f - y),
            ]
        })
        .collect();
    write_csv(
        &out.join("coefficients.csv"),
        &["j", "k1", "k2", "e1", "e2", "empirical", "fitted", "residual"],
        &rows,
    )?;
    let diff = res.f_hat.axpy(-1.0, &pipe.truth.signal)?;
    let summary = Summary {
        command: "estimate",
        n: Some(cfg.noise.n),
        sigma: Some(cfg.noise.sigma),
        kappa: Some(cfg.threshold.kappa),
        gamma_n: Some(pipe.gamma_n),
        omega_count: Some(pipe.dict.len()),
        beta: Some(cfg.operator.beta()),
        extra: serde_json::json!({
            "m": m,
            "d": cfg.operator.dim(),
            "seed": cfg.noise.seed,
            "feasible": res.feasible,
            "tv-value": res.tv_value,
            "max-residual": res.max_residual,
            "iterations": res.iterations,
            "l2-risk": lq_norm(&diff, 2.0)?,
            "linf-estimate": linf_norm(&res.f_hat),
            "bv-truth": pipe.truth.meta.bv_seminorm,
        }),
    };
    write_json(&out.join("summary.json"), &summary)
}

fn run_rate_study(cfg: &RateStudyConfig, out: &Path) -> Result<()> {
    let study = rate_study(cfg)?;
    let rows: Vec<Vec<String>> = study
        .points
        .iter()
        .map(|p| vec![p.n.to_string(), fmt(p.mean_risk), fmt(p.stderr)])
        .collect();
    write_csv(&out.join("rate-study.csv"), &["n", "mean_risk", "stderr"], &rows)?;
    let d = cfg.operator.dim();
    let basis = WaveletBasis::new(cfg.vanishing_moments, d)?;
    let (_, c2) = cfg.operator.frame_bounds(&basis, 64)?;
    let n_max = *cfg.n_list.last().expect("validated");
    let omega_count = index_set_omega_n(n_max, d, &basis)?.len();
    let gamma_n = threshold_gamma(n_max, cfg.sigma, cfg.kappa, c2, omega_count.max(2))?;
    let summary = Summary {
        command: "rate-study",
        n: Some(n_max),
        sigma: Some(cfg.sigma),
        kappa: Some(cfg.kappa),
        gamma_n: Some(gamma_n),
        omega_count: Some(omega_count),
        beta: Some(cfg.operator.beta()),
        extra: serde_json::json!({
            "q": cfg.q,
            "m": cfg.m,
            "seed": cfg.seed,
            "trials": cfg.trials,
            "n-list": cfg.n_list,
            "theta-hat": study.theta_hat,
            "theta-expected": study.theta_expected,
            "ci": study.ci_half_width,
            "degenerate": study.degenerate,
            "failures": study.failures,
        }),
    };
    write_json(&out.join("summary.json"), &summary)
}

fn run_assouad(cfg: &AssouadConfig, out: &Path) -> Result<()> {
    let moments = cfg.vanishing_moments.expect("resolved");
    let basis = WaveletBasis::new(moments, cfg.d)?;
    let fam =
        assouad_family(cfg.level, cfg.d, &basis, cfg.l, cfg.m, cfg.max_patterns, cfg.seed)?;
    let mut rows = Vec::new();
    for (i, sig) in fam.signals.iter().enumerate() {
        let coeffs = analyze(sig, &basis, fam.j)?;
        rows.push(vec![
            i.to_string(),
            fmt(linf_norm(sig)),
            fmt(besov_norm(&coeffs, 1.0, 1.0, 1.0)?),
        ]);
    }
    write_csv(&out.join("assouad.csv"), &["pattern", "linf", "besov_111"], &rows)?;
    for (i, sig) in fam.signals.iter().take(4).enumerate() {
        write_grid(&out.join(format!("pattern-{i}.grid")), sig)?;
    }
    // Adjacent-pattern diagnostics: flip the first coordinate of pattern 0.
    let mut flipped = fam.eps[0].clone();
    flipped[0] = -flipped[0];
    let g0 = &fam.signals[0];
    let g1 = fam.signal(&flipped)?;
    let spacing_l1 = lq_norm(&g0.clone().axpy(-1.0, &g1)?, 1.0)?;
    let (kl, n, sigma, beta) = match (&cfg.operator, &cfg.noise) {
        (Some(op), Some(noise)) => {
            let kl = kl_divergence(&op.apply(g0)?, &op.apply(&g1)?, noise.n, noise.sigma)?;
            (Some(kl), Some(noise.n), Some(noise.sigma), Some(op.beta()))
        }
        _ => (None, None, None, None),
    };
    let summary = Summary {
        command: "assouad",
        n,
        sigma,
        kappa: None,
        gamma_n: None,
        omega_count: Some(fam.indices.len()),
        beta,
        extra: serde_json::json!({
            "j": fam.j,
            "d": fam.d,
            "m": fam.m,
            "l": cfg.l,
            "seed": cfg.seed,
            "gamma": fam.gamma,
            "pattern-count": fam.eps.len(),
            "linf-max": fam.linf_max,
            "besov-max": fam.besov_max,
            "adjacent-l1-spacing": spacing_l1,
            "adjacent-kl": kl,
        }),
    };
    write_json(&out.join("summary.json"), &summary)
}

fn run_diagnose(cfg: &DiagnoseConfig, out: &Path) -> Result<()> {
    let moments = cfg.vanishing_moments.expect("resolved");
    let d = cfg.operator.dim();
    let basis = WaveletBasis::new(moments, d)?;
    let m_ref = *cfg.m_list.last().ok_or_else(|| Error::Config {
        field: "m-list".into(),
        message: "need at least one resolution".into(),
    })?;
    let beta = cfg.operator.beta();
    let mut rows = Vec::new();
    for (i, spec) in cfg.phantoms.iter().enumerate() {
        let phantom = make_phantom(spec, m_ref, d)?;
        let rep = interpolation_diagnostic(&phantom.signal, &basis, beta, cfg.q)?;
        let kind = serde_json::to_value(spec)?
            .get("kind")
            .and_then(|k| k.as_str())
            .unwrap_or("?")
            .to_string();
        rows.push(vec![i.to_string(), kind, fmt(rep.lq), fmt(rep.besov), fmt(rep.bv), fmt(rep.ratio)]);
    }
    write_csv(
        &out.join("interpolation.csv"),
        &["phantom", "kind", "lq", "besov", "bv", "ratio"],
        &rows,
    )?;
    let disc = discretization_error(&cfg.operator, &basis, &cfg.phantoms, &cfg.m_list, cfg.n)?;
    let rows: Vec<Vec<String>> = disc
        .m_list
        .iter()
        .zip(&disc.deltas)
        .map(|(m, dl)| vec![m.to_string(), fmt(*dl)])
        .collect();
    write_csv(&out.join("discretization.csv"), &["m", "delta"], &rows)?;
    let omega_count = index_set_omega_n(cfg.n, d, &basis)?.len();
    let summary = Summary {
        command: "diagnose",
        n: Some(cfg.n),
        sigma: None,
        kappa: None,
        gamma_n: None,
        omega_count: Some(omega_count),
        beta: Some(beta),
        extra: serde_json::json!({
            "q": cfg.q,
            "m-list": cfg.m_list,
            "fitted-exponent": disc.fitted_exponent,
            "theta-expected": theta(cfg.q, d, beta)?,
        }),
    };
    write_json(&out.join("summary.json"), &summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_cfg(dir: &Path, name: &str, value: serde_json::Value) -> PathBuf {
        let path = dir.join(name);
        std::fs::write(&path, serde_json::to_vec_pretty(&value).unwrap()).unwrap();
        path
    }

    fn estimate_config() -> serde_json::Value {
        serde_json::json!({
            "schema": 1,
            "command": "estimate",
            "operator": {"kind": "identity", "d": 1, "beta": 0.0,
                         "multiplier": {"type": "sobolev"}},
            "phantom": {"kind": "staircase1d", "amplitude": 1.0, "jumps": 2},
            "noise": {"n": 64, "sigma": 0.0, "model": "regression", "seed": 7}
        })
    }

    #[test]
    fn default_moments_examples() {
        assert_eq!(default_moments(1, 0.0), 2);
        assert_eq!(default_moments(1, 1.0), 2);
        assert_eq!(default_moments(2, 0.5), 2);
        assert_eq!(default_moments(1, 2.0), 3);
        assert_eq!(default_moments(2, 2.0), 4);
    }

    #[test]
    fn malformed_json_exits_one_without_outputs() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("bad.json");
        std::fs::write(&cfg, b"{not json").unwrap();
        let out = dir.path().join("out");
        let code = run(Cli {
            command: CliCommand::Estimate(RunArgs {
                config: cfg,
                seed: None,
                threads: None,
                out: out.clone(),
            }),
        });
        assert_eq!(code, 1);
        assert!(!out.exists());
    }

    #[test]
    fn command_mismatch_and_schema_are_config_errors() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = write_cfg(dir.path(), "c.json", estimate_config());
        let code = run(Cli {
            command: CliCommand::Simulate(RunArgs {
                config: cfg,
                seed: None,
                threads: None,
                out: dir.path().join("out"),
            }),
        });
        assert_eq!(code, 1);

        let mut v = estimate_config();
        v["schema"] = serde_json::json!(99);
        let cfg = write_cfg(dir.path(), "s.json", v);
        assert!(matches!(
            load_config(&cfg, None),
            Err(Error::Config { field, .. }) if field == "schema"
        ));
    }

    #[test]
    fn missing_seed_is_rejected_unless_overridden() {
        let dir = tempfile::tempdir().unwrap();
        let mut v = estimate_config();
        v["noise"].as_object_mut().unwrap().remove("seed");
        let cfg = write_cfg(dir.path(), "c.json", v);
        assert!(load_config(&cfg, None).is_err());
        let loaded = load_config(&cfg, Some(42)).unwrap();
        match loaded.command {
            CommandConfig::Estimate(c) => assert_eq!(c.noise.seed, 42),
            _ => panic!("wrong command"),
        }
    }

    #[test]
    fn resolved_defaults_fill_moments_and_regression_m() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = write_cfg(dir.path(), "c.json", estimate_config());
        let mut loaded = load_config(&cfg, None).unwrap();
        resolve_defaults(&mut loaded).unwrap();
        match loaded.command {
            CommandConfig::Estimate(c) => {
                assert_eq!(c.vanishing_moments, Some(2));
                assert_eq!(c.m, Some(64));
                assert_eq!(c.threshold.kappa, 1.5);
            }
            _ => panic!("wrong command"),
        }
    }

    #[test]
    fn estimate_run_writes_artifacts_and_noise_free_telemetry() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = write_cfg(dir.path(), "c.json", estimate_config());
        let out = dir.path().join("out");
        let code = run(Cli {
            command: CliCommand::Estimate(RunArgs {
                config: cfg,
                seed: None,
                threads: Some(1),
                out: out.clone(),
            }),
        });
        assert_eq!(code, 0);
        for name in
            ["resolved-config.json", "truth.grid", "estimate.grid", "coefficients.csv", "summary.json"]
        {
            assert!(out.join(name).exists(), "missing {name}");
        }
        let summary: serde_json::Value =
            serde_json::from_slice(&std::fs::read(out.join("summary.json")).unwrap()).unwrap();
        assert_eq!(summary["feasible"], serde_json::json!(true));
        assert_eq!(summary["n"], serde_json::json!(64));
        let tv = summary["tv-value"].as_f64().unwrap();
        let bv = summary["bv-truth"].as_f64().unwrap();
        assert!(tv <= bv + 1e-6, "tv {tv} exceeds bv {bv}");
        for key in ["sigma", "kappa", "gamma-n", "omega-count", "beta"] {
            assert!(!summary[key].is_null(), "summary lacks {key}");
        }
    }

    #[test]
    fn reruns_are_byte_identical_across_thread_counts() {
        let dir = tempfile::tempdir().unwrap();
        let study = serde_json::json!({
            "schema": 1,
            "command": "rate-study",
            "operator": {"kind": "identity", "d": 1, "beta": 0.0,
                         "multiplier": {"type": "sobolev"}},
            "vanishing-moments": 1,
            "phantom": {"kind": "staircase1d", "amplitude": 1.0, "jumps": 2},
            "q": 2.0,
            "n-list": [256, 512],
            "trials": 4,
            "sigma": 0.3,
            "m": 64,
            "solver": {"max-iter": 600},
            "burn-in": 0,
            "seed": 11
        });
        let cfg = write_cfg(dir.path(), "c.json", study);
        let mut outputs = Vec::new();
        for threads in [1usize, 3] {
            let out = dir.path().join(format!("out-{threads}"));
            let code = run(Cli {
                command: CliCommand::RateStudy(RunArgs {
                    config: cfg.clone(),
                    seed: None,
                    threads: Some(threads),
                    out: out.clone(),
                }),
            });
            assert_eq!(code, 0);
            outputs.push((
                std::fs::read(out.join("rate-study.csv")).unwrap(),
                std::fs::read(out.join("summary.json")).unwrap(),
                std::fs::read(out.join("resolved-config.json")).unwrap(),
            ));
        }
        assert_eq!(outputs[0], outputs[1]);
    }
}
