//! Command-line front end: argument parsing, file loading, output.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or parse error,
//! 3 physically invalid input.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimates::{estimate_ratio, scaling_sweep, ForceProbe};
use crate::force::{energy_shift, eq1_coefficients, gradient_force, EnergyShift, Eq1Coefficients, ForceResult};
use crate::io::{
    complex_pairs, forces_to_csv, format_f64, rational_pairs, read_json, to_json_string, BeamFile, ModelFile,
    PositionsFile, ProfileFile, TensorFile, SCHEMA_VERSION,
};
use crate::molecule::response_tensors;
use crate::radiation::{BeamMode, Handedness};
use crate::rotavg::{rotational_average, so3_sample_average, AverageMethod, ComponentErrors};
use crate::tolerances::Tolerances;
use crate::verify::{run_verify, VerifyContext};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INVALID_INPUT: i32 = 3;

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_SAMPLES: usize = 1_000_000;

#[derive(Debug, Parser)]
#[command(name = "chiraforce", version, about = "Orientation-averaged optical shifts and chiral gradient forces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub options: Options,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Rotational average of a tensor file.
    Avg {
        /// Tensor JSON file.
        tensor: PathBuf,
        #[arg(long, value_enum, default_value_t = MethodArg::Analytic)]
        method: MethodArg,
    },
    /// Energy shift of a model in a beam at the beam file's intensity.
    Energy,
    /// Gradient forces at a list of positions in a beam profile.
    Force,
    /// Run the full invariant suite.
    Verify,
    /// Size-based estimates for one dimension or a sweep.
    Estimate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Analytic,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct Options {
    #[arg(long, global = true)]
    pub model: Option<PathBuf>,
    #[arg(long, global = true)]
    pub beam: Option<PathBuf>,
    #[arg(long, global = true)]
    pub profile: Option<PathBuf>,
    #[arg(long, global = true)]
    pub positions: Option<PathBuf>,
    /// Molecular dimension in nanometres.
    #[arg(long = "d-nm", global = true)]
    pub d_nm: Option<f64>,
    /// Comma-separated molecular dimensions in nanometres.
    #[arg(long, global = true, value_delimiter = ',')]
    pub sweep: Option<Vec<f64>>,
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, global = true, default_value_t = DEFAULT_SAMPLES)]
    pub samples: usize,
    /// Exact rational arithmetic (avg, verify).
    #[arg(long, global = true)]
    pub exact: bool,
    /// Multiplier on every tolerance; overrides CHIRAFORCE_TOLERANCE_SCALE.
    #[arg(long = "tolerance-scale", global = true)]
    pub tolerance_scale: Option<f64>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

/// Fully resolved run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub model: Option<PathBuf>,
    pub beam: Option<PathBuf>,
    pub profile: Option<PathBuf>,
    pub positions: Option<PathBuf>,
    pub d_nm: Option<f64>,
    pub sweep: Option<Vec<f64>>,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub seed: u64,
    pub samples: usize,
    pub tolerances: Tolerances,
    pub exact_mode: bool,
}

/// A usage-level failure, distinct from library errors.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Library(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Library(e)
    }
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Library(Error::Parse(_) | Error::Io(_)) => EXIT_USAGE,
            Failure::Library(_) => EXIT_INVALID_INPUT,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(msg) => write!(f, "usage error: {msg}"),
            Failure::Library(e) => write!(f, "{e}"),
        }
    }
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> std::result::Result<Self, Failure> {
        let o = cli.options;
        let tolerances = match o.tolerance_scale {
            Some(f) if f.is_finite() && f > 0.0 => Tolerances::scaled(f),
            Some(f) => return Err(Failure::Usage(format!("--tolerance-scale must be positive, got {f}"))),
            None => Tolerances::from_env().map_err(Failure::Usage)?,
        };
        if o.samples == 0 {
            return Err(Failure::Usage("--samples must be at least 1".into()));
        }
        Ok(Self {
            command: cli.command,
            model: o.model,
            beam: o.beam,
            profile: o.profile,
            positions: o.positions,
            d_nm: o.d_nm,
            sweep: o.sweep,
            out: o.out,
            format: o.format,
            seed: o.seed,
            samples: o.samples,
            tolerances,
            exact_mode: o.exact,
        })
    }
}

fn require<'a>(path: &'a Option<PathBuf>, flag: &str, command: &str) -> std::result::Result<&'a Path, Failure> {
    path.as_deref()
        .ok_or_else(|| Failure::Usage(format!("{command} needs --{flag} FILE")))
}

fn origin(path: &Path) -> String {
    path.display().to_string()
}

#[derive(Serialize)]
struct TensorOut<C> {
    rank: usize,
    components: Vec<C>,
    unit_tag: String,
}

#[derive(Serialize)]
struct AvgOut<C> {
    schema: u32,
    method: AverageMethod,
    exact: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    samples: usize,
    averaged_tensor: TensorOut<C>,
    coefficients: Vec<C>,
    #[serde(skip_serializing_if = "Option::is_none")]
    standard_errors: Option<ComponentErrors<f64>>,
}

#[derive(Serialize)]
struct BeamEcho {
    wavelength_nm: f64,
    handedness: Handedness,
    omega_rad_s: f64,
    #[serde(rename = "intensity_W_m2", skip_serializing_if = "Option::is_none")]
    intensity_w_m2: Option<f64>,
}

#[derive(Serialize)]
struct EnergyOut {
    schema: u32,
    model: String,
    beam: BeamEcho,
    energy_shift: EnergyShift<f64>,
    eq1_coefficients: Eq1Coefficients<f64>,
}

#[derive(Serialize)]
struct ForceOut {
    schema: u32,
    model: String,
    beam: BeamEcho,
    eq1_coefficients: Eq1Coefficients<f64>,
    results: Vec<ForceResult<f64>>,
}

#[derive(Serialize)]
struct Versioned<T: Serialize> {
    schema: u32,
    #[serde(flatten)]
    body: T,
}

fn run_avg(config: &RunConfig, tensor: &Path, method: MethodArg) -> std::result::Result<String, Failure> {
    let file: TensorFile = read_json(tensor)?;
    let name = origin(tensor);
    if config.exact_mode {
        if method == MethodArg::MonteCarlo {
            return Err(Failure::Usage("Monte Carlo averaging has no exact mode".into()));
        }
        let t = file.to_tensor::<BigRational>(&name)?;
        let avg = rotational_average(&t)?;
        return Ok(to_json_string(&AvgOut {
            schema: SCHEMA_VERSION,
            method: avg.method,
            exact: true,
            seed: None,
            samples: 0,
            averaged_tensor: TensorOut {
                rank: avg.rank,
                components: rational_pairs(avg.averaged_tensor.components()),
                unit_tag: avg.averaged_tensor.unit_tag.clone(),
            },
            coefficients: rational_pairs(&avg.coefficients),
            standard_errors: None,
        })?);
    }
    let t = file.to_tensor::<f64>(&name)?;
    let (avg, seed) = match method {
        MethodArg::Analytic => (rotational_average(&t)?, None),
        MethodArg::MonteCarlo => (so3_sample_average(&t, config.samples, config.seed)?, Some(config.seed)),
    };
    Ok(to_json_string(&AvgOut {
        schema: SCHEMA_VERSION,
        method: avg.method,
        exact: false,
        seed,
        samples: avg.samples,
        averaged_tensor: TensorOut {
            rank: avg.rank,
            components: complex_pairs(avg.averaged_tensor.components()),
            unit_tag: avg.averaged_tensor.unit_tag.clone(),
        },
        coefficients: complex_pairs(&avg.coefficients),
        standard_errors: avg.standard_errors,
    })?)
}

fn load_model_and_beam(config: &RunConfig, command: &str) -> std::result::Result<(crate::molecule::MolecularModel<f64>, BeamFile, BeamMode<f64>), Failure> {
    let model_path = require(&config.model, "model", command)?;
    let beam_path = require(&config.beam, "beam", command)?;
    let model_file: ModelFile = read_json(model_path)?;
    let model = model_file.to_model::<f64>(&origin(model_path), config.tolerances.identity)?;
    let beam_file: BeamFile = read_json(beam_path)?;
    let beam = beam_file.to_beam(&origin(beam_path))?;
    Ok((model, beam_file, beam))
}

fn beam_echo(file: &BeamFile, beam: &BeamMode<f64>) -> BeamEcho {
    BeamEcho {
        wavelength_nm: file.wavelength_nm,
        handedness: beam.handedness,
        omega_rad_s: beam.omega,
        intensity_w_m2: file.intensity_w_m2,
    }
}

fn run_energy(config: &RunConfig) -> std::result::Result<String, Failure> {
    let (model, beam_file, beam) = load_model_and_beam(config, "energy")?;
    let intensity = beam_file
        .intensity_w_m2
        .ok_or_else(|| Failure::Usage("energy needs intensity_W_m2 in the beam file".into()))?;
    if !(intensity >= 0.0) {
        return Err(Error::InvalidBeam("intensity must be non-negative".into()).into());
    }
    let tensors = response_tensors(&model, beam.omega)?;
    let shift = crate::force::energy_shift_with(&beam, &intensity, &tensors, config.tolerances.realness)?;
    Ok(to_json_string(&EnergyOut {
        schema: SCHEMA_VERSION,
        model: model.label.clone(),
        beam: beam_echo(&beam_file, &beam),
        energy_shift: shift,
        eq1_coefficients: eq1_coefficients(&tensors),
    })?)
}

fn run_force(config: &RunConfig) -> std::result::Result<String, Failure> {
    let (model, beam_file, beam) = load_model_and_beam(config, "force")?;
    let profile_path = require(&config.profile, "profile", "force")?;
    let positions_path = require(&config.positions, "positions", "force")?;
    let profile_file: ProfileFile = read_json(profile_path)?;
    let profile = profile_file.to_profile(&origin(profile_path), beam_file.axis)?;
    let positions_file: PositionsFile = read_json(positions_path)?;
    let positions = positions_file.to_positions(&origin(positions_path))?;
    let tensors = response_tensors(&model, beam.omega)?;
    // Realness is checked once at unit intensity; forces are linear in it.
    energy_shift(&beam, &1.0, &tensors)?;
    let results = positions
        .iter()
        .map(|r| gradient_force(&profile, &beam, &tensors, r))
        .collect::<Result<Vec<_>>>()?;
    match config.format {
        Format::Csv => Ok(forces_to_csv(&results)),
        Format::Json => Ok(to_json_string(&ForceOut {
            schema: SCHEMA_VERSION,
            model: model.label.clone(),
            beam: beam_echo(&beam_file, &beam),
            eq1_coefficients: eq1_coefficients(&tensors),
            results,
        })?),
    }
}

fn run_verify_command(config: &RunConfig) -> std::result::Result<(String, bool), Failure> {
    let mut ctx = VerifyContext::new(config.seed, config.samples, config.tolerances.clone());
    if let Some(path) = &config.model {
        let file: ModelFile = read_json(path)?;
        file.to_model::<f64>(&origin(path), config.tolerances.identity)?;
        ctx.models = vec![(origin(path), file)];
    }
    let report = run_verify(&ctx, config.exact_mode);
    Ok((to_json_string(&report)?, report.passed))
}

fn run_estimate(config: &RunConfig) -> std::result::Result<String, Failure> {
    match (&config.d_nm, &config.sweep) {
        (Some(d), None) => {
            if config.format == Format::Csv {
                return Err(Failure::Usage("CSV output is only available for --sweep".into()));
            }
            Ok(to_json_string(&Versioned { schema: SCHEMA_VERSION, body: estimate_ratio(d * 1e-9)? })?)
        }
        (None, Some(sweep)) => {
            let d: Vec<f64> = sweep.iter().map(|x| x * 1e-9).collect();
            let table = scaling_sweep(&d, &ForceProbe::standard())?;
            match config.format {
                Format::Json => Ok(to_json_string(&Versioned { schema: SCHEMA_VERSION, body: table })?),
                Format::Csv => {
                    let mut out = String::from("d_m,chiral_force_N,achiral_force_N,ratio_to_first\n");
                    for r in &table.rows {
                        let row = [r.d, r.chiral_force, r.achiral_force, r.ratio_to_first].map(format_f64);
                        out.push_str(&row.join(","));
                        out.push('\n');
                    }
                    Ok(out)
                }
            }
        }
        _ => Err(Failure::Usage("estimate needs exactly one of --d-nm or --sweep".into())),
    }
}

fn emit(config: &RunConfig, text: &str) -> std::result::Result<(), Failure> {
    match &config.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::Usage(format!("{}: cannot write: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Runs one subcommand and returns the process exit code.
pub fn run_cli(config: RunConfig) -> i32 {
    match run(&config) {
        Ok(code) => code,
        Err(failure) => {
            eprintln!("chiraforce: {failure}");
            failure.exit_code()
        }
    }
}

fn run(config: &RunConfig) -> std::result::Result<i32, Failure> {
    let exact_ok = matches!(config.command, Command::Avg { .. } | Command::Verify);
    if config.exact_mode && !exact_ok {
        return Err(Failure::Usage("--exact applies to avg and verify only".into()));
    }
    let csv_ok = matches!(config.command, Command::Force | Command::Estimate);
    if config.format == Format::Csv && !csv_ok {
        return Err(Failure::Usage("--format csv applies to force and estimate only".into()));
    }
    let text = match &config.command {
        Command::Avg { tensor, method } => run_avg(config, tensor, *method)?,
        Command::Energy => run_energy(config)?,
        Command::Force => run_force(config)?,
        Command::Estimate => run_estimate(config)?,
        Command::Verify => {
            let (text, passed) = run_verify_command(config)?;
            emit(config, &text)?;
            if !passed {
                eprintln!("chiraforce: verification failed");
                return Ok(EXIT_VERIFY_FAILED);
            }
            return Ok(EXIT_OK);
        }
    };
    emit(config, &text)?;
    Ok(EXIT_OK)
}

/// Parses `args` (including the program name) and runs; clap's own usage
/// errors exit with code 2, `--help` and `--version` with 0.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match RunConfig::from_cli(cli) {
        Ok(config) => run_cli(config),
        Err(failure) => {
            eprintln!("chiraforce: {failure}");
            failure.exit_code()
        }
    }
}
