//! Command-line front end for the `wstate` binary.
//!
//! Exit codes: 0 on success, 1 for numerical or I/O failures and failed
//! checks, 2 for usage errors.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::circuit::{build_protocol_unitary, write_unitary_json, GCompletion, ProtocolParams};
use crate::efficiency::{
    asymptotic_efficiency, competitor_asymptotic, efficiency_closed_form, efficiency_curve,
    format_significant, golden_section_delta_sq, optimal_delta, optimal_efficiency,
};
use crate::error::{Error, Result};
use crate::fock::{ParticleStatistics, StandardKernel};
use crate::protocol::{fidelity, run_protocol_with_completion, w_state, PostSelectedState};
use crate::verify::{self, Outcome, VerifyConfig};

const DIGITS: usize = 12;

#[derive(Debug, Parser)]
#[command(
    name = "wstate",
    version,
    about = "Simulate and analyse linear-optical no-touching W-state generation"
)]
struct Cli {
    #[command(subcommand)]
    command: CliCommand,
}

#[derive(Debug, Subcommand)]
enum CliCommand {
    /// Simulate the circuit and print the post-selected qubit state.
    Simulate(SimulateArgs),
    /// Closed-form success probability at a given delta.
    Efficiency(EfficiencyArgs),
    /// Optimal delta: closed form against a golden-section search.
    Optimize(QubitArgs),
    /// Optimal-efficiency table for N = 2..n (plot-ready CSV).
    Figure2(Figure2Args),
    /// Run the cross-module consistency checks.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
struct QubitArgs {
    /// Number of qubits (>= 2).
    #[arg(long, value_parser = clap::value_parser!(u32).range(2..))]
    n: u32,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    qubits: QubitArgs,
    /// Beam-splitter amplitude delta in [0, 1]; defaults to the optimum for N.
    #[arg(long)]
    delta: Option<f64>,
    /// Override the balanced alpha.
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, value_enum, default_value_t = StatisticsArg::Boson)]
    statistics: StatisticsArg,
    /// Skip the e^{i pi} phase on output path 1 for fermions.
    #[arg(long)]
    no_phase_correction: bool,
    /// Use a seeded random completion of G instead of Gram-Schmidt.
    #[arg(long)]
    random_completion: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Also dump the full mode unitary as JSON.
    #[arg(long)]
    unitary_json: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EfficiencyArgs {
    #[command(flatten)]
    qubits: QubitArgs,
    #[arg(long)]
    delta: Option<f64>,
}

#[derive(Debug, Args)]
struct Figure2Args {
    /// Largest N in the table.
    #[arg(long, value_parser = clap::value_parser!(u32).range(2..))]
    n: u32,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Largest N simulated.
    #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u32).range(2..))]
    n: u32,
    /// Seed for random unitaries and the randomized completion of G.
    #[arg(long, default_value_t = VerifyConfig::default().seed)]
    seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StatisticsArg {
    Boson,
    Fermion,
}

impl From<StatisticsArg> for ParticleStatistics {
    fn from(s: StatisticsArg) -> Self {
        match s {
            StatisticsArg::Boson => ParticleStatistics::Boson,
            StatisticsArg::Fermion => ParticleStatistics::Fermion,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Simulate,
    Efficiency,
    Optimize,
    Figure2,
    Verify,
}

/// Normalized command-line request.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub n: usize,
    pub delta: Option<f64>,
    pub alpha: Option<f64>,
    pub statistics: ParticleStatistics,
    pub phase_correction: bool,
    pub completion_seed: Option<u64>,
    pub seed: u64,
    pub output_path: Option<PathBuf>,
    pub unitary_json: Option<PathBuf>,
    pub format: Format,
}

impl RunConfig {
    pub fn new(command: Command, n: usize) -> Self {
        RunConfig {
            command,
            n,
            delta: None,
            alpha: None,
            statistics: ParticleStatistics::Boson,
            phase_correction: false,
            completion_seed: None,
            seed: VerifyConfig::default().seed,
            output_path: None,
            unitary_json: None,
            format: Format::Csv,
        }
    }

    fn from_cli(cli: Cli) -> Self {
        match cli.command {
            CliCommand::Simulate(a) => {
                let statistics = a.statistics.into();
                RunConfig {
                    delta: a.delta,
                    alpha: a.alpha,
                    statistics,
                    phase_correction: statistics == ParticleStatistics::Fermion
                        && !a.no_phase_correction,
                    completion_seed: a.random_completion,
                    output_path: a.output,
                    unitary_json: a.unitary_json,
                    format: a.format,
                    ..RunConfig::new(Command::Simulate, a.qubits.n as usize)
                }
            }
            CliCommand::Efficiency(a) => RunConfig {
                delta: a.delta,
                ..RunConfig::new(Command::Efficiency, a.qubits.n as usize)
            },
            CliCommand::Optimize(a) => RunConfig::new(Command::Optimize, a.n as usize),
            CliCommand::Figure2(a) => RunConfig {
                output_path: a.output,
                format: a.format,
                ..RunConfig::new(Command::Figure2, a.n as usize)
            },
            CliCommand::Verify(a) => RunConfig {
                seed: a.seed,
                ..RunConfig::new(Command::Verify, a.n as usize)
            },
        }
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let sink: &mut dyn Write = if code == 0 { stdout } else { stderr };
            let _ = write!(sink, "{text}");
            return code;
        }
    };
    let config = RunConfig::from_cli(cli);
    match execute(&config, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            1
        }
    }
}

/// Runs a parsed request, writing the report to `out` unless the config
/// names an output file. Returns the exit code for non-error outcomes.
pub fn execute(config: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    if config.n < 2 {
        return Err(Error::TooFewQubits(config.n));
    }
    match config.command {
        Command::Simulate => with_output(config, out, |w| cmd_simulate(config, w)),
        Command::Efficiency => cmd_efficiency(config, out),
        Command::Optimize => cmd_optimize(config, out),
        Command::Figure2 => with_output(config, out, |w| cmd_figure2(config, w)),
        Command::Verify => cmd_verify(config, out),
    }
}

fn with_output<F>(config: &RunConfig, out: &mut dyn Write, body: F) -> Result<i32>
where
    F: FnOnce(&mut dyn Write) -> Result<i32>,
{
    match &config.output_path {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            let code = body(&mut w)?;
            w.flush()?;
            Ok(code)
        }
        None => body(out),
    }
}

fn fmt(x: f64) -> String {
    if x == 0.0 {
        "0".to_string()
    } else {
        format_significant(x, DIGITS)
    }
}

#[derive(Debug, Serialize)]
struct AmplitudeRow {
    bitstring: String,
    re: f64,
    im: f64,
    probability: f64,
}

#[derive(Debug, Serialize)]
struct SimulationReport {
    n: usize,
    statistics: ParticleStatistics,
    delta: f64,
    alpha: f64,
    phase_correction: bool,
    amplitudes: Vec<AmplitudeRow>,
    success_probability: f64,
    fidelity_w: f64,
    sign_mismatch: Vec<String>,
}

/// One-hot strings whose amplitude points against the W amplitude.
fn sign_mismatches(state: &PostSelectedState) -> Vec<String> {
    (1..=state.n_qubits())
        .map(|k| state.one_hot_index(k))
        .filter(|&i| state.amplitudes()[i].re < -1e-12)
        .map(|i| state.bitstring(i))
        .collect()
}

fn simulation_params(config: &RunConfig) -> Result<ProtocolParams> {
    let n = config.n;
    let delta = config.delta.unwrap_or_else(|| optimal_delta(n));
    let params = match config.alpha {
        Some(alpha) => ProtocolParams::with_alpha(n, delta, alpha, config.statistics)?,
        None => ProtocolParams::balanced(n, delta, config.statistics)?,
    };
    Ok(params.with_phase_correction(config.phase_correction))
}

pub fn cmd_simulate(config: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    let params = simulation_params(config)?;
    let g = match config.completion_seed {
        Some(seed) => GCompletion::randomized(config.n, seed)?,
        None => GCompletion::gram_schmidt(config.n)?,
    };
    if let Some(path) = &config.unitary_json {
        write_unitary_json(&build_protocol_unitary(&params, &g)?, path)?;
    }
    let state = run_protocol_with_completion(&params, &g)?;
    let fid = fidelity(&state, &w_state(config.n)?)?;
    let report = SimulationReport {
        n: config.n,
        statistics: params.statistics,
        delta: params.delta,
        alpha: params.alpha,
        phase_correction: params.fermion_phase_correction,
        amplitudes: state
            .iter()
            .map(|(bitstring, a)| AmplitudeRow {
                bitstring,
                re: a.re,
                im: a.im,
                probability: a.norm_sqr(),
            })
            .collect(),
        success_probability: state.success_probability(),
        fidelity_w: fid,
        sign_mismatch: sign_mismatches(&state),
    };
    match config.format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, &report)?;
            writeln!(out)?;
        }
        Format::Csv => {
            writeln!(
                out,
                "# N={} statistics={} delta={} alpha={} phase_correction={}",
                report.n,
                report.statistics,
                fmt(report.delta),
                fmt(report.alpha),
                report.phase_correction
            )?;
            writeln!(out, "bitstring,re,im,probability")?;
            for r in &report.amplitudes {
                writeln!(
                    out,
                    "{},{},{},{}",
                    r.bitstring,
                    fmt(r.re),
                    fmt(r.im),
                    fmt(r.probability)
                )?;
            }
            writeln!(
                out,
                "# success_probability={}",
                fmt(report.success_probability)
            )?;
            writeln!(out, "# fidelity_w={}", fmt(report.fidelity_w))?;
            if !report.sign_mismatch.is_empty() {
                writeln!(
                    out,
                    "# sign_mismatch={} (amplitudes opposite in sign to W)",
                    report.sign_mismatch.join(" ")
                )?;
            }
        }
    }
    Ok(0)
}

pub fn cmd_efficiency(config: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    let n = config.n;
    let delta = config.delta.unwrap_or_else(|| optimal_delta(n));
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::ParameterOutOfRange(format!(
            "delta = {delta} is outside [0, 1]"
        )));
    }
    writeln!(out, "N={n}")?;
    writeln!(out, "delta={}", fmt(delta))?;
    writeln!(out, "efficiency={}", fmt(efficiency_closed_form(n, delta)))?;
    Ok(0)
}

pub fn cmd_optimize(config: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    let n = config.n;
    let closed = optimal_delta(n);
    let numeric = golden_section_delta_sq(n).sqrt();
    writeln!(out, "N={n}")?;
    writeln!(out, "delta_max={}", fmt(closed))?;
    writeln!(out, "delta_max_sq={}", fmt(closed * closed))?;
    writeln!(out, "delta_max_golden_section={}", fmt(numeric))?;
    writeln!(out, "delta_max_abs_diff={:.3e}", (closed - numeric).abs())?;
    writeln!(out, "eff_max={}", fmt(optimal_efficiency(n)))?;
    writeln!(out, "eff_asymptotic={}", fmt(asymptotic_efficiency(n)))?;
    writeln!(
        out,
        "eff_competitor_asymptotic={}",
        fmt(competitor_asymptotic(n))
    )?;
    Ok(0)
}

pub fn cmd_figure2(config: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    let curve = efficiency_curve(config.n)?;
    match config.format {
        Format::Csv => curve.write_csv(out)?,
        Format::Json => curve.write_json(out)?,
    }
    Ok(0)
}

pub fn cmd_verify(config: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    let vc = VerifyConfig {
        n_max: config.n,
        seed: config.seed,
    };
    writeln!(out, "verify: N=2..{} seed={}", vc.n_max, vc.seed)?;
    let results = verify::run_checks(&StandardKernel, &vc)?;
    for r in &results {
        writeln!(out, "{r}")?;
    }
    let count = |o| results.iter().filter(|r| r.outcome == o).count();
    writeln!(
        out,
        "{} checks: {} passed, {} failed, {} skipped",
        results.len(),
        count(Outcome::Pass),
        count(Outcome::Fail),
        count(Outcome::Skip)
    )?;
    Ok(if verify::all_passed(&results) { 0 } else { 1 })
}
