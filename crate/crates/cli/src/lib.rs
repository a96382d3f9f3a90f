//! Command-line front end for the `qdesign` toolkit.

pub mod config;
pub mod spec;

use std::ffi::OsString;
use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use qdesign::aupl::{self, default_design_size, DesignOptions};
use qdesign::crb::{self, default_grid_size, dithering_quantizer, max_crb};
use qdesign::sim::{self, SimConfig, SimReport};
use qdesign::{Error, NoiseDensity, NoiseFamily, Quantizer, Result};

use crate::spec::{parse_family, parse_noise, parse_quantizer};

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_OPTIMIZATION: u8 = 2;
pub const EXIT_INADMISSIBLE: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "qdesign", version, about = "Minimax CRB design of one-bit quantizers")]
#[command(args_override_self = true)]
pub struct Cli {
    /// TOML file of default flag values (`key = value`, optional per-command tables).
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Design an AUPL quantizer and write its JSON description and shape CSVs.
    Design(DesignArgs),
    /// Worst-case bound of several quantizers over a range of noise levels.
    Sweep(SweepArgs),
    /// High-SNR limit of the sine quantizer's bound.
    Limits(FamilyArgs),
    /// Monte Carlo run of the estimator.
    Simulate(SimulateArgs),
    /// Check the sufficient condition for optimality of the threshold quantizer.
    CheckCondition(CheckArgs),
    /// Noise level minimizing the threshold quantizer's worst-case bound.
    CriticalSigma(FamilyArgs),
    /// Bound of one quantizer over the parameter grid.
    CrbCurve(CurveArgs),
}

#[derive(Debug, Args)]
pub struct DesignArgs {
    /// Noise specification, e.g. `gg:beta=2,sigma=1`.
    #[arg(long)]
    pub noise: String,
    /// Number of cells K (default ⌈10/σ⌉ clamped to [50, 400]).
    #[arg(short = 'K', long)]
    pub cells: Option<usize>,
    /// Parameter grid size L (default K).
    #[arg(short = 'L', long)]
    pub grid: Option<usize>,
    /// Output JSON path; `<stem>.shape.csv` and `<stem>.g.csv` are written beside it.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 2000)]
    pub max_iterations: usize,
    #[arg(long, default_value_t = 0)]
    pub random_starts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Noise family: `gaussian`, `laplacian` or `gg:beta=<f>`.
    #[arg(long)]
    pub family: String,
    /// Explicit comma-separated σ values (ascending).
    #[arg(long, value_delimiter = ',')]
    pub sigmas: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0.05)]
    pub sigma_min: f64,
    #[arg(long, default_value_t = 8.0)]
    pub sigma_max: f64,
    /// Number of log-spaced σ values.
    #[arg(long, default_value_t = 40)]
    pub points: usize,
    /// Comma-separated subset of threshold, sine, dither, aupl.
    #[arg(long, value_delimiter = ',', default_value = "threshold,sine,dither,aupl")]
    pub quantizers: Vec<String>,
    /// Parameter grid size (default ⌈10/σ⌉ clamped to [50, 400]); also K for AUPL.
    #[arg(short = 'L', long)]
    pub grid: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct FamilyArgs {
    #[arg(long)]
    pub family: String,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub noise: String,
    #[arg(long)]
    pub quantizer: String,
    #[arg(long, allow_negative_numbers = true)]
    pub theta: f64,
    /// Sensors per trial (N).
    #[arg(short = 'N', long)]
    pub sensors: usize,
    #[arg(long)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// CSV file to append a result row to.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(long)]
    pub noise: String,
    #[arg(long, default_value_t = qdesign::noise::CONDITION_GRID_STEP)]
    pub grid_step: f64,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    #[arg(long)]
    pub noise: String,
    #[arg(long)]
    pub quantizer: String,
    /// Grid size L (default ⌈10/σ⌉ clamped to [100, 2000]).
    #[arg(short = 'L', long)]
    pub grid: Option<usize>,
    /// CSV output `theta,g,crb`.
    #[arg(long)]
    pub out: PathBuf,
    /// JSON summary path (default: the CSV path with a `.json` extension).
    #[arg(long)]
    pub json: Option<PathBuf>,
}

/// Exit status for a library error.
pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::OptimizationFailure(_) => EXIT_OPTIMIZATION,
        Error::Inadmissible => EXIT_INADMISSIBLE,
        _ => EXIT_USAGE,
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit status. Output goes to `out`, diagnostics to `err`.
pub fn run_with_args(args: Vec<OsString>, out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    let args = match config::apply_config(args) {
        Ok(a) => a,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
                return EXIT_USAGE;
            }
            let _ = write!(out, "{text}");
            return EXIT_OK;
        }
    };
    match execute(&cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::Parse(format!("cannot write {}: {e}", path.display())))
}

fn io_error(e: std::io::Error) -> Error {
    Error::Parse(format!("output error: {e}"))
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}{suffix}"))
}

fn require_density(d: &NoiseDensity, flag: &str) -> Result<()> {
    if d.is_point_mass() {
        return Err(Error::Parse(format!("--{flag}: this command needs a noise density, not pointmass")));
    }
    Ok(())
}

pub fn execute(cmd: &Command, out: &mut dyn Write) -> Result<()> {
    match cmd {
        Command::Design(a) => cmd_design(a, out),
        Command::Sweep(a) => cmd_sweep(a, out),
        Command::Limits(a) => cmd_limits(a, out),
        Command::Simulate(a) => cmd_simulate(a, out),
        Command::CheckCondition(a) => cmd_check_condition(a, out),
        Command::CriticalSigma(a) => cmd_critical_sigma(a, out),
        Command::CrbCurve(a) => cmd_crb_curve(a, out),
    }
}

fn cmd_design(a: &DesignArgs, out: &mut dyn Write) -> Result<()> {
    let d = parse_noise(&a.noise)?;
    require_density(&d, "noise")?;
    let k = a.cells.unwrap_or_else(|| default_design_size(d.sigma()));
    let l = a.grid.unwrap_or(k);
    let opts = DesignOptions {
        max_iterations: a.max_iterations,
        random_starts: a.random_starts,
        seed: a.seed,
        ..Default::default()
    };
    let result = aupl::design(&d, k, l, &opts)?;
    let q = result.quantizer()?;
    write_file(&a.out, &(result.to_json() + "\n"))?;
    write_file(&sibling(&a.out, ".shape.csv"), &aupl::shape_csv(&q, 1000))?;
    write_file(&sibling(&a.out, ".g.csv"), &aupl::g_curve_csv(&q, &d, l)?)?;
    writeln!(
        out,
        "K = {k}, L = {l}, phi = {}, quadrature phi = {}, start = {}, iterations = {}",
        result.phi, result.profile.phi, result.start_label, result.iterations
    )
    .map_err(io_error)
}

/// `n` log-spaced values from `lo` to `hi` inclusive.
pub fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| match i {
            0 => lo,
            _ if i == n - 1 => hi,
            _ => (a + (b - a) * i as f64 / (n - 1) as f64).exp(),
        })
        .collect()
}

/// One sweep row.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub sigma: f64,
    pub quantizer: String,
    pub phi: f64,
}

impl SweepRow {
    pub fn min_fisher_info(&self) -> f64 {
        1.0 / self.phi
    }
}

pub const SWEEP_QUANTIZERS: [&str; 4] = ["threshold", "sine", "dither", "aupl"];

/// Worst-case bounds for every σ and quantizer name, in σ order.
pub fn sweep(family: NoiseFamily, sigmas: &[f64], quantizers: &[String], grid: Option<usize>) -> Result<Vec<SweepRow>> {
    use rayon::prelude::*;
    if sigmas.is_empty() || sigmas.iter().any(|s| !(*s > 0.0)) || sigmas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Parse("--sigmas: values must be positive and strictly ascending".into()));
    }
    for q in quantizers {
        if !SWEEP_QUANTIZERS.contains(&q.as_str()) {
            return Err(Error::Parse(format!("--quantizers: unknown quantizer '{q}'")));
        }
    }
    let critical = if quantizers.iter().any(|q| q == "dither") {
        Some(crb::critical_sigma(family)?)
    } else {
        None
    };
    let per_sigma: Vec<Vec<SweepRow>> = sigmas
        .par_iter()
        .map(|&sigma| {
            let d = family.with_sigma(sigma)?;
            let l = grid.unwrap_or_else(|| default_design_size(sigma));
            quantizers
                .iter()
                .map(|name| {
                    let phi = match name.as_str() {
                        "aupl" => aupl::design(&d, l, l, &DesignOptions::default())?.profile.phi,
                        "dither" => {
                            let q = dithering_quantizer(family, sigma, critical.expect("computed above"))?;
                            max_crb(&q, &d, l)?.phi
                        }
                        "sine" => max_crb(&Quantizer::sine(), &d, l)?.phi,
                        _ => max_crb(&Quantizer::threshold(), &d, l)?.phi,
                    };
                    Ok(SweepRow { sigma, quantizer: name.clone(), phi })
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(per_sigma.into_iter().flatten().collect())
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut s = String::from("sigma,quantizer,min_fisher_info,phi\n");
    for r in rows {
        s.push_str(&format!("{},{},{},{}\n", r.sigma, r.quantizer, r.min_fisher_info(), r.phi));
    }
    s
}

fn cmd_sweep(a: &SweepArgs, out: &mut dyn Write) -> Result<()> {
    let family = parse_family(&a.family)?;
    let sigmas = match &a.sigmas {
        Some(s) => s.clone(),
        None => {
            if !(a.sigma_min > 0.0 && a.sigma_max > a.sigma_min) || a.points < 2 {
                return Err(Error::Parse("--sigma-min/--sigma-max/--points: need 0 < min < max and at least 2 points".into()));
            }
            log_spaced(a.sigma_min, a.sigma_max, a.points)
        }
    };
    let rows = sweep(family, &sigmas, &a.quantizers, a.grid)?;
    write_file(&a.out, &sweep_csv(&rows))?;
    writeln!(out, "wrote {} rows to {}", rows.len(), a.out.display()).map_err(io_error)
}

fn cmd_limits(a: &FamilyArgs, out: &mut dyn Write) -> Result<()> {
    let family = parse_family(&a.family)?;
    let mu1 = family.with_variance(1.0)?.normalized_one_sided_mean()?;
    let via_mean = crb::sine_high_snr_limit(family)?;
    let via_gamma = crb::sine_high_snr_limit_gamma_form(family)?;
    let floor = 8.0 / (std::f64::consts::PI * std::f64::consts::PI);
    writeln!(out, "beta = {}", family.beta().expect("parsed family has a shape")).map_err(io_error)?;
    writeln!(out, "mu1 = {mu1}").map_err(io_error)?;
    writeln!(out, "limit (one-sided mean) = {via_mean}").map_err(io_error)?;
    writeln!(out, "limit (gamma functions) = {via_gamma}").map_err(io_error)?;
    writeln!(out, "agreement = {:e}", (via_mean - via_gamma).abs()).map_err(io_error)?;
    writeln!(out, "exceeds 8/pi^2 = {}", via_mean > floor).map_err(io_error)
}

fn cmd_simulate(a: &SimulateArgs, out: &mut dyn Write) -> Result<()> {
    let noise = parse_noise(&a.noise)?;
    if !(-1.0..=1.0).contains(&a.theta) {
        return Err(Error::Parse(format!("--theta: must lie in [-1, 1], got {}", a.theta)));
    }
    let quantizer = parse_quantizer(&a.quantizer, noise.family())?;
    let cfg = SimConfig { theta_true: a.theta, n: a.sensors, trials: a.trials, seed: a.seed, quantizer, noise };
    let report = sim::run(&cfg)?;
    if let Some(path) = &a.out {
        append_csv(path, &report)?;
    }
    writeln!(out, "{}", serde_json::to_string_pretty(&report).expect("report serializes")).map_err(io_error)
}

fn append_csv(path: &Path, report: &SimReport) -> Result<()> {
    let fresh = fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
    let mut f = OpenOptions::new().create(true).append(true).open(path).map_err(io_error)?;
    if fresh {
        writeln!(f, "{}", SimReport::CSV_HEADER).map_err(io_error)?;
    }
    writeln!(f, "{}", report.csv_row()).map_err(io_error)
}

fn cmd_check_condition(a: &CheckArgs, out: &mut dyn Write) -> Result<()> {
    let d = parse_noise(&a.noise)?;
    require_density(&d, "noise")?;
    if d.beta().is_some_and(|b| b <= 1.0) {
        return Err(Error::Parse(
            "--noise: the density is not differentiable at 0 for beta <= 1 (Laplacian-type), so the condition does not apply".into(),
        ));
    }
    match d.threshold_condition_witness(a.grid_step)? {
        None => writeln!(out, "true"),
        Some(w) => writeln!(out, "false\nwitness: w = {}, z = {}, f'(w-z) + f'(w+z) = {}", w.w, w.z, w.value),
    }
    .map_err(io_error)
}

fn cmd_critical_sigma(a: &FamilyArgs, out: &mut dyn Write) -> Result<()> {
    let family = parse_family(&a.family)?;
    let sigma = crb::critical_sigma(family)?;
    let phi = crb::threshold_phi(family, sigma)?;
    writeln!(out, "sigma = {sigma}\nphi = {phi}").map_err(io_error)
}

fn cmd_crb_curve(a: &CurveArgs, out: &mut dyn Write) -> Result<()> {
    let d = parse_noise(&a.noise)?;
    let q = parse_quantizer(&a.quantizer, d.family())?;
    let l = a.grid.unwrap_or_else(|| if d.is_point_mass() { 100 } else { default_grid_size(d.sigma()) });
    let profile = max_crb(&q, &d, l)?;
    write_file(&a.out, &profile.to_csv())?;
    let json = a.json.clone().unwrap_or_else(|| a.out.with_extension("json"));
    write_file(&json, &(profile.sidecar_json() + "\n"))?;
    writeln!(out, "phi = {} at theta = {} (L = {l})", profile.phi, profile.argmax_theta).map_err(io_error)
}
