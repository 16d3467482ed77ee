//! Command-line front end of the `bmcap` binary.
//!
//! Settings come from built-in defaults, then an optional JSON file given by
//! `--config`, then flags. Everything is validated before any computation
//! starts. Data goes to the output file or stdout, progress to stderr.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use thiserror::Error;

use crate::error::Error;
use crate::optimize::OptimizerSettings;
use crate::quadrature::QuadratureSpec;
use crate::rates::RateKind;
use crate::sweep::{Sweep, SweepSpec};
use crate::table::{OutputFormat, Table};
use crate::verify;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_COMPUTE: i32 = 3;
pub const EXIT_VERIFY: i32 = 4;

const DEFAULT_MEMORIES: &str = "0,0.8,1.6,2.5";
const DEFAULT_NS: &str = "1..30";
const DEFAULT_R_POINTS: usize = 101;
const DEFAULT_N_MAX: usize = 64;
const FIGURE5_MEMORIES: &str =
    "0,0.25,0.5,0.75,1,1.25,1.5,1.75,2,2.25,2.5,2.75,3,3.25,3.5,3.75,4,4.25,4.5,4.75,5,5.25,5.5,5.75,6";
const FIGURE5_ETAS: &str = "0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1";
const FIGURE5_STEM: &str = "figure5";

#[derive(Debug, Parser)]
#[command(name = "bmcap", version, about = "Classical rates of a lossy bosonic channel with correlated noise")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Finite-n maxima over (r, y), one row per (kind, s, n).
    #[command(allow_negative_numbers = true)]
    Finite(FiniteArgs),
    /// Asymptotic maxima per (kind, s), or the profile over r with --sweep r.
    #[command(allow_negative_numbers = true)]
    Asymptotic(AsymptoticArgs),
    /// Optimal r versus s, and the Holevo maximum on an (eta, s) grid.
    #[command(allow_negative_numbers = true)]
    Figure5(CommonArgs),
    /// Runs the oracle suite.
    #[command(allow_negative_numbers = true)]
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// holevo, heterodyne, homodyne, all, or a comma list.
    #[arg(long)]
    pub kind: Option<String>,
    /// Memory strengths, comma-separated.
    #[arg(long)]
    pub s: Option<String>,
    /// Mean photon number per mode.
    #[arg(long = "N")]
    pub photons: Option<f64>,
    /// Transmittivity; a comma list for figure5.
    #[arg(long)]
    pub eta: Option<String>,
    /// Absolute and relative quadrature tolerance.
    #[arg(long)]
    pub quad_tol: Option<f64>,
    /// csv or json (text or json for verify).
    #[arg(long)]
    pub format: Option<String>,
    /// Output file; a file stem for figure5. Defaults to stdout.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// JSON file with default settings.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Worker threads for the sweep.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct FiniteArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Block lengths: `a..b` ranges and comma lists.
    #[arg(long)]
    pub n: Option<String>,
    /// Swept variable; only `n` is meaningful here.
    #[arg(long)]
    pub sweep: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct AsymptoticArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// `s` for maxima per s (the default), `r` for the profile over r.
    #[arg(long)]
    pub sweep: Option<String>,
    /// Same as `--sweep s`.
    #[arg(long)]
    pub max: bool,
    /// Points of the r profile.
    #[arg(long)]
    pub r_points: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Largest block length of the dense-matrix checks.
    #[arg(long)]
    pub n_max: Option<usize>,
    /// Seed of the random parameter draws.
    #[arg(long)]
    pub seed: Option<u64>,
}

/// Settings file. Lists may be given as JSON arrays or as strings in
/// flag syntax.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub kind: Option<ListValue>,
    pub n: Option<ListValue>,
    pub s: Option<ListValue>,
    #[serde(rename = "N")]
    pub photons: Option<f64>,
    pub eta: Option<ListValue>,
    pub sweep: Option<String>,
    pub max: Option<bool>,
    pub r_points: Option<usize>,
    pub quad_tol: Option<f64>,
    pub format: Option<String>,
    pub output: Option<PathBuf>,
    pub threads: Option<usize>,
    pub n_max: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum ListValue {
    Number(f64),
    Numbers(Vec<f64>),
    Text(String),
    Texts(Vec<String>),
}

impl ListValue {
    fn to_flag(&self) -> String {
        match self {
            ListValue::Number(x) => x.to_string(),
            ListValue::Numbers(xs) => xs.iter().map(f64::to_string).collect::<Vec<_>>().join(","),
            ListValue::Text(s) => s.clone(),
            ListValue::Texts(v) => v.join(","),
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid `{field}`: {message}")]
    Config { field: String, message: String },
    #[error("{0}")]
    Compute(#[from] Error),
    #[error("{context}: {source}")]
    Io { context: String, source: std::io::Error },
    #[error("{failed} verification check(s) failed")]
    Verification { failed: usize },
}

impl CliError {
    fn config(field: &str, message: impl Into<String>) -> Self {
        CliError::Config { field: field.into(), message: message.into() }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => EXIT_CONFIG,
            CliError::Compute(_) | CliError::Io { .. } => EXIT_COMPUTE,
            CliError::Verification { .. } => EXIT_VERIFY,
        }
    }
}

// Invalid-parameter errors raised while validating a sweep are config errors.
fn validation(e: Error) -> CliError {
    match e {
        Error::InvalidParameter { name, reason } => CliError::config(name, reason),
        other => CliError::config("config", other.to_string()),
    }
}

/// Parses `a..b` (inclusive) ranges and comma lists of positive integers.
pub fn parse_ns(text: &str) -> Result<Vec<usize>, CliError> {
    let mut out = Vec::new();
    for part in text.split(',').map(str::trim) {
        if let Some((a, b)) = part.split_once("..") {
            let a: usize = a.trim().parse().map_err(|_| CliError::config("n", format!("bad range start in `{part}`")))?;
            let b: usize = b.trim().parse().map_err(|_| CliError::config("n", format!("bad range end in `{part}`")))?;
            if a > b {
                return Err(CliError::config("n", format!("empty range `{part}`")));
            }
            out.extend(a..=b);
        } else {
            let v: f64 = part.parse().map_err(|_| CliError::config("n", format!("`{part}` is not an integer")))?;
            if v.fract() != 0.0 || v < 0.0 {
                return Err(CliError::config("n", format!("`{part}` is not a non-negative integer")));
            }
            out.push(v as usize);
        }
    }
    Ok(out)
}

/// Parses a comma list of finite floats.
pub fn parse_floats(field: &str, text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(str::trim)
        .map(|p| {
            p.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| CliError::config(field, format!("`{p}` is not a finite number")))
        })
        .collect()
}

/// Parses `all` or a comma list of rate names.
pub fn parse_kinds(text: &str) -> Result<Vec<RateKind>, CliError> {
    if text.trim() == "all" {
        return Ok(RateKind::ALL.to_vec());
    }
    text.split(',')
        .map(|p| p.trim().parse::<RateKind>().map_err(|e| CliError::config("kind", e.to_string())))
        .collect()
}

/// Fully resolved settings of one invocation.
#[derive(Debug, Clone)]
struct Resolved {
    kinds: Vec<RateKind>,
    memories: Vec<f64>,
    photons: f64,
    etas: Vec<f64>,
    quad: QuadratureSpec,
    format: Option<String>,
    output: Option<PathBuf>,
    threads: Option<usize>,
}

fn load_file(path: Option<&Path>) -> Result<FileConfig, CliError> {
    let Some(path) = path else { return Ok(FileConfig::default()) };
    let text = fs::read_to_string(path).map_err(|e| CliError::config("config", format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::config("config", format!("{}: {e}", path.display())))
}

fn resolve_common(
    args: &CommonArgs,
    file: &FileConfig,
    default_memories: &str,
    default_etas: &str,
) -> Result<Resolved, CliError> {
    let kind = args.kind.clone().or_else(|| file.kind.as_ref().map(ListValue::to_flag)).unwrap_or_else(|| "all".into());
    let s = args.s.clone().or_else(|| file.s.as_ref().map(ListValue::to_flag)).unwrap_or_else(|| default_memories.into());
    let eta = args.eta.clone().or_else(|| file.eta.as_ref().map(ListValue::to_flag)).unwrap_or_else(|| default_etas.into());
    let photons = args.photons.or(file.photons).unwrap_or(8.0);

    let kinds = parse_kinds(&kind)?;
    let memories = parse_floats("s", &s)?;
    let etas = parse_floats("eta", &eta)?;
    if let Some(bad) = etas.iter().find(|e| !(0.0..=1.0).contains(*e)) {
        return Err(CliError::config("eta", format!("transmittivity must lie in [0, 1], got {bad}")));
    }
    if !(photons > 0.0) || !photons.is_finite() {
        return Err(CliError::config("N", format!("photon number must be positive and finite, got {photons}")));
    }

    let mut quad = QuadratureSpec::default();
    if let Some(tol) = args.quad_tol.or(file.quad_tol) {
        if !(tol > 0.0) || !tol.is_finite() {
            return Err(CliError::config("quad-tol", format!("must be positive, got {tol}")));
        }
        quad.abs_tol = tol;
        quad.rel_tol = tol;
    }
    let threads = args.threads.or(file.threads);
    if threads == Some(0) {
        return Err(CliError::config("threads", "must be at least 1"));
    }
    Ok(Resolved {
        kinds,
        memories,
        photons,
        etas,
        quad,
        format: args.format.clone().or_else(|| file.format.clone()),
        output: args.output.clone().or_else(|| file.output.clone()),
        threads,
    })
}

fn single_eta(res: &Resolved) -> Result<f64, CliError> {
    match res.etas.as_slice() {
        [eta] => Ok(*eta),
        _ => Err(CliError::config("eta", "expected a single transmittivity")),
    }
}

fn table_format(res: &Resolved) -> Result<OutputFormat, CliError> {
    match res.format.as_deref() {
        None => Ok(OutputFormat::Csv),
        Some(f) => f.parse().map_err(|_| CliError::config("format", format!("expected `csv` or `json`, got `{f}`"))),
    }
}

fn settings(res: &Resolved) -> OptimizerSettings {
    OptimizerSettings { quad: res.quad, ..OptimizerSettings::default() }
}

/// A validated unit of work.
enum Plan {
    Table { sweep: Sweep, format: OutputFormat, output: Option<PathBuf> },
    Figure5 { ropt: Sweep, capacity: Sweep, format: OutputFormat, stem: PathBuf },
    Verify { n_max: usize, seed: u64, json: bool, output: Option<PathBuf> },
}

fn plan(command: &Command) -> Result<(Plan, Option<usize>), CliError> {
    match command {
        Command::Finite(args) => {
            let file = load_file(args.common.config.as_deref())?;
            let res = resolve_common(&args.common, &file, DEFAULT_MEMORIES, "0.7")?;
            let sweep_kind = args.sweep.clone().or_else(|| file.sweep.clone());
            if let Some(sw) = sweep_kind.filter(|s| s != "n") {
                return Err(CliError::config("sweep", format!("finite sweeps run over n, got `{sw}`")));
            }
            let ns_text = args.n.clone().or_else(|| file.n.as_ref().map(ListValue::to_flag)).unwrap_or_else(|| DEFAULT_NS.into());
            let ns = parse_ns(&ns_text)?;
            let sweep = Sweep {
                spec: SweepSpec::FiniteN { kinds: res.kinds.clone(), memories: res.memories.clone(), ns },
                photons: res.photons,
                eta: single_eta(&res)?,
                settings: settings(&res),
            };
            sweep.validate().map_err(validation)?;
            let format = table_format(&res)?;
            Ok((Plan::Table { sweep, format, output: res.output.clone() }, res.threads))
        }
        Command::Asymptotic(args) => {
            let file = load_file(args.common.config.as_deref())?;
            let res = resolve_common(&args.common, &file, DEFAULT_MEMORIES, "0.7")?;
            let max = args.max || file.max.unwrap_or(false);
            let mode = args.sweep.clone().or_else(|| file.sweep.clone()).unwrap_or_else(|| "s".into());
            let spec = match (mode.as_str(), max) {
                ("s", _) => SweepSpec::Maxima { kinds: res.kinds.clone(), memories: res.memories.clone() },
                ("r", false) => SweepSpec::RProfile {
                    kinds: res.kinds.clone(),
                    memories: res.memories.clone(),
                    points: args.r_points.or(file.r_points).unwrap_or(DEFAULT_R_POINTS),
                },
                ("r", true) => return Err(CliError::config("sweep", "`--sweep r` and `--max` are exclusive")),
                (other, _) => return Err(CliError::config("sweep", format!("expected `r` or `s`, got `{other}`"))),
            };
            let sweep = Sweep { spec, photons: res.photons, eta: single_eta(&res)?, settings: settings(&res) };
            sweep.validate().map_err(validation)?;
            let format = table_format(&res)?;
            Ok((Plan::Table { sweep, format, output: res.output.clone() }, res.threads))
        }
        Command::Figure5(args) => {
            let file = load_file(args.config.as_deref())?;
            let res = resolve_common(args, &file, FIGURE5_MEMORIES, FIGURE5_ETAS)?;
            let ropt = Sweep {
                spec: SweepSpec::Maxima { kinds: res.kinds.clone(), memories: res.memories.clone() },
                photons: res.photons,
                eta: 0.7,
                settings: settings(&res),
            };
            let capacity = Sweep {
                spec: SweepSpec::EtaMemory { etas: res.etas.clone(), memories: res.memories.clone() },
                photons: res.photons,
                eta: 0.7,
                settings: settings(&res),
            };
            ropt.validate().map_err(validation)?;
            capacity.validate().map_err(validation)?;
            let format = table_format(&res)?;
            let stem = res.output.clone().unwrap_or_else(|| PathBuf::from(FIGURE5_STEM));
            Ok((Plan::Figure5 { ropt, capacity, format, stem }, res.threads))
        }
        Command::Verify(args) => {
            let file = load_file(args.common.config.as_deref())?;
            let res = resolve_common(&args.common, &file, DEFAULT_MEMORIES, "0.7")?;
            let json = match res.format.as_deref() {
                None | Some("text") => false,
                Some("json") => true,
                Some(other) => return Err(CliError::config("format", format!("expected `text` or `json`, got `{other}`"))),
            };
            let n_max = args.n_max.or(file.n_max).unwrap_or(DEFAULT_N_MAX);
            if n_max < 2 {
                return Err(CliError::config("n-max", format!("must be at least 2, got {n_max}")));
            }
            let seed = args.seed.or(file.seed).unwrap_or(verify::DEFAULT_SEED);
            Ok((Plan::Verify { n_max, seed, json, output: res.output.clone() }, res.threads))
        }
    }
}

fn write_output(path: Option<&Path>, body: &str, out: &mut dyn Write) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, body).map_err(|source| CliError::Io { context: format!("writing {}", p.display()), source }),
        None => out
            .write_all(body.as_bytes())
            .map_err(|source| CliError::Io { context: "writing stdout".into(), source }),
    }
}

fn figure5_path(stem: &Path, suffix: &str, format: OutputFormat) -> PathBuf {
    let mut base = stem.to_path_buf();
    if matches!(base.extension().and_then(|e| e.to_str()), Some("csv" | "json")) {
        base.set_extension("");
    }
    let name = format!(
        "{}_{suffix}.{}",
        base.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_else(|| FIGURE5_STEM.into()),
        format.extension()
    );
    base.with_file_name(name)
}

enum Computed {
    Table(Table),
    Figure5(Table, Table),
    Verify(Vec<verify::CheckReport>),
}

fn compute(plan: &Plan) -> Result<Computed, Error> {
    match plan {
        Plan::Table { sweep, .. } => Ok(Computed::Table(sweep.run()?)),
        Plan::Figure5 { ropt, capacity, .. } => {
            let maxima = ropt.run()?;
            let file_a = maxima.select(&["kind", "s", "r_opt"]).expect("maxima columns");
            Ok(Computed::Figure5(file_a, capacity.run()?))
        }
        Plan::Verify { n_max, seed, .. } => Ok(Computed::Verify(verify::run_all(*n_max, *seed)?)),
    }
}

fn announce(plan: &Plan, err: &mut dyn Write) {
    let _ = match plan {
        Plan::Table { sweep, .. } => writeln!(err, "bmcap: evaluating {} grid points", sweep.len()),
        Plan::Figure5 { ropt, capacity, .. } => {
            writeln!(err, "bmcap: evaluating {} + {} grid points", ropt.len(), capacity.len())
        }
        Plan::Verify { n_max, .. } => writeln!(err, "bmcap: running oracle suite up to n = {n_max}"),
    };
}

fn emit(plan: Plan, computed: Computed, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    match (plan, computed) {
        (Plan::Table { format, output, .. }, Computed::Table(table)) => {
            write_output(output.as_deref(), &table.render(format), out)?;
            if let Some(p) = output {
                let _ = writeln!(err, "bmcap: wrote {} rows to {}", table.len(), p.display());
            }
            Ok(())
        }
        (Plan::Figure5 { format, stem, .. }, Computed::Figure5(file_a, file_b)) => {
            for (suffix, table) in [("ropt", &file_a), ("capacity", &file_b)] {
                let path = figure5_path(&stem, suffix, format);
                write_output(Some(&path), &table.render(format), out)?;
                let _ = writeln!(err, "bmcap: wrote {} rows to {}", table.len(), path.display());
            }
            Ok(())
        }
        (Plan::Verify { json, output, .. }, Computed::Verify(reports)) => {
            let body = if json { verify::render_json(&reports) } else { verify::render_text(&reports) };
            write_output(output.as_deref(), &body, out)?;
            let failed = reports.iter().filter(|r| !r.passed).count();
            if failed > 0 {
                return Err(CliError::Verification { failed });
            }
            Ok(())
        }
        _ => unreachable!("plan and result kinds always match"),
    }
}

/// Runs the command line `args` (program name first) and returns the exit
/// code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return code;
        }
    };
    let result = plan(&cli.command).and_then(|(plan, threads)| {
        announce(&plan, err);
        let computed = match threads {
            Some(t) => rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| CliError::config("threads", e.to_string()))?
                .install(|| compute(&plan))?,
            None => compute(&plan)?,
        };
        emit(plan, computed, out, err)
    });
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "bmcap: error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_block_lengths() {
        assert_eq!(parse_ns("1..4").unwrap(), vec![1, 2, 3, 4]);
        assert_eq!(parse_ns("1,3..5,9").unwrap(), vec![1, 3, 4, 5, 9]);
        assert!(parse_ns("5..1").is_err());
        assert!(parse_ns("1.5").is_err());
        assert!(parse_ns("x").is_err());
    }

    #[test]
    fn parses_lists_and_kinds() {
        assert_eq!(parse_floats("s", "0, 0.8,-1.6").unwrap(), vec![0.0, 0.8, -1.6]);
        assert!(parse_floats("s", "0,,1").is_err());
        assert!(parse_floats("s", "nan").is_err());
        assert_eq!(parse_kinds("all").unwrap().len(), 3);
        assert_eq!(parse_kinds("homodyne,holevo").unwrap(), vec![RateKind::Homodyne, RateKind::Holevo]);
        assert!(parse_kinds("coherent").is_err());
    }

    #[test]
    fn file_lists_in_either_syntax() {
        let cfg: FileConfig = serde_json::from_str(r#"{"s": [0, 0.8], "n": "1..3", "kind": ["holevo"], "eta": 0.5, "N": 4}"#).unwrap();
        assert_eq!(cfg.s.unwrap().to_flag(), "0,0.8");
        assert_eq!(cfg.n.unwrap().to_flag(), "1..3");
        assert_eq!(cfg.kind.unwrap().to_flag(), "holevo");
        assert_eq!(cfg.eta.unwrap().to_flag(), "0.5");
        assert!(serde_json::from_str::<FileConfig>(r#"{"bogus": 1}"#).is_err());
    }

    #[test]
    fn figure5_file_names() {
        let p = figure5_path(Path::new("out/fig5.csv"), "ropt", OutputFormat::Csv);
        assert_eq!(p, PathBuf::from("out/fig5_ropt.csv"));
        let p = figure5_path(Path::new("fig"), "capacity", OutputFormat::Json);
        assert_eq!(p, PathBuf::from("fig_capacity.json"));
    }

    #[test]
    fn bad_eta_is_a_config_error() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(["bmcap", "finite", "--eta", "1.5", "--n", "1"], &mut out, &mut err);
        assert_eq!(code, EXIT_CONFIG);
        assert!(String::from_utf8(err).unwrap().contains("eta"));
    }
}
