//! Command-line flags, the optional TOML config file that mirrors them, and
//! resolution into a checked [`RunConfig`].

use std::path::{Path, PathBuf};

use benfordnet::ego::ClassificationThresholds;
use benfordnet::ingest::{DegreeKind, ParseMode, RowFilter};
use benfordnet::stats::DEFAULT_CHI_WARN;
use benfordnet::synth::{GeneratorSpec, Model};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "benfordnet", version, about = "Benford first-digit conformance for social network data")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Analyze,
    Ego,
    Validate,
    Generate,
    PlotData,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score a degree distribution or CSV count columns against Benford.
    Analyze(Flags),
    /// Score every user's egocentric network and flag deviants.
    Ego(Flags),
    /// PASS/WARN/FAIL verdict per CSV count column.
    Validate(Flags),
    /// Write a seeded synthetic fixture plus manifest.
    Generate(Flags),
    /// Write the per-digit CSV (digit,observed,expected,deviation_pct).
    PlotData(Flags),
}

impl Command {
    pub fn split(self) -> (CommandKind, Flags) {
        match self {
            Command::Analyze(f) => (CommandKind::Analyze, f),
            Command::Ego(f) => (CommandKind::Ego, f),
            Command::Validate(f) => (CommandKind::Validate, f),
            Command::Generate(f) => (CommandKind::Generate, f),
            Command::PlotData(f) => (CommandKind::PlotData, f),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Edges,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum ModelName {
    LogUniform,
    PowerLaw,
    PinterestMin5,
    BotnetBand,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Out,
    In,
}

/// Every flag, shared by all subcommands. The config file uses the same
/// names in snake_case; a flag given on the command line wins.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Flags {
    /// TOML file with defaults for any of these flags.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    #[arg(long, short)]
    pub input: Option<PathBuf>,
    /// Output path; stdout when omitted (generate requires it).
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Input/output format; inferred from the extension when omitted.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// CSV count column (repeatable).
    #[arg(long = "column", value_name = "NAME")]
    pub column: Vec<String>,
    #[arg(long, value_name = "N")]
    pub min_degree: Option<u64>,
    /// Ego bins as CONF,SUSP.
    #[arg(long, value_name = "CONF,SUSP")]
    pub thresholds: Option<String>,
    /// Validation verdicts as PASS,WARN.
    #[arg(long, value_name = "PASS,WARN")]
    pub verdicts: Option<String>,
    #[arg(long)]
    pub strict: bool,
    #[arg(long, conflicts_with = "strict")]
    pub skip: bool,
    /// Sample size above which chi-square carries a warning.
    #[arg(long, value_name = "N")]
    pub chi_warn: Option<u64>,
    /// Edge direction used for degree counts.
    #[arg(long, value_enum)]
    pub degree: Option<Direction>,
    /// External CSV of friend counts for `ego` (first column is the node id).
    #[arg(long, value_name = "PATH")]
    pub degrees: Option<PathBuf>,
    /// Count column in the --degrees file.
    #[arg(long, value_name = "NAME")]
    pub degree_column: Option<String>,
    /// Drop CSV rows where every listed column is zero (comma separated).
    #[arg(long, value_name = "COLS")]
    pub drop_all_zero: Option<String>,
    /// Drop CSV rows where any listed column is zero (comma separated).
    #[arg(long, value_name = "COLS")]
    pub drop_any_zero: Option<String>,
    /// Per-digit CSV written alongside the `analyze` report.
    #[arg(long, value_name = "PATH")]
    pub digits_csv: Option<PathBuf>,
    #[arg(long, value_name = "N")]
    pub threads: Option<usize>,

    #[arg(long, value_enum)]
    pub model: Option<ModelName>,
    #[arg(long)]
    pub n: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub lo: Option<u64>,
    #[arg(long)]
    pub hi: Option<u64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub kmin: Option<u64>,
    #[arg(long)]
    pub kmax: Option<u64>,
    #[arg(long)]
    pub m: Option<u64>,
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long)]
    pub a: Option<u64>,
    #[arg(long)]
    pub b: Option<u64>,
    /// Graph fixtures: number of conforming egos.
    #[arg(long)]
    pub egos: Option<u64>,
    /// Graph fixtures: number of botnet-band egos.
    #[arg(long)]
    pub bots: Option<u64>,
    /// Graph fixtures: friends per ego.
    #[arg(long)]
    pub ego_size: Option<u64>,
}

impl Flags {
    /// Fills every unset field from `file`.
    pub fn or(self, file: Flags) -> Flags {
        macro_rules! pick {
            ($($f:ident),*) => {
                Flags {
                    config: self.config,
                    column: if self.column.is_empty() { file.column } else { self.column },
                    strict: self.strict || (file.strict && !self.skip),
                    skip: self.skip || (file.skip && !self.strict),
                    $($f: self.$f.or(file.$f),)*
                }
            };
        }
        pick!(
            input, output, format, min_degree, thresholds, verdicts, chi_warn, degree, degrees,
            degree_column, drop_all_zero, drop_any_zero, digits_csv, threads, model, n, seed, lo,
            hi, alpha, kmin, kmax, m, q, a, b, egos, bots, ego_size
        )
    }

    pub fn load_file(path: &Path) -> Result<Flags, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        toml::from_str(&text)
            .map_err(|e| CliError::Config(format!("config file {}: {e}", path.display())))
    }
}

/// Verdict bars for `validate`: PASS when r > pass, WARN when warn < r <= pass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerdictThresholds {
    pub pass: f64,
    pub warn: f64,
}

impl Default for VerdictThresholds {
    fn default() -> Self {
        Self { pass: 0.99, warn: 0.9 }
    }
}

/// Fixture to generate.
#[derive(Debug, Clone, PartialEq)]
pub enum Fixture {
    Values { spec: GeneratorSpec, column: String },
    Graph {
        egos: u64,
        bots: u64,
        ego_size: u64,
        model: Model,
        bot_model: Model,
        seed: u64,
    },
}

/// Fully resolved, checked configuration for one run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: CommandKind,
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub columns: Vec<String>,
    pub thresholds: ClassificationThresholds,
    pub verdicts: VerdictThresholds,
    pub mode: ParseMode,
    pub chi_warn: u64,
    pub degree: DegreeKind,
    pub degrees: Option<(PathBuf, String)>,
    pub filter: Option<RowFilter>,
    pub digits_csv: Option<PathBuf>,
    pub threads: usize,
    pub fixture: Option<Fixture>,
}

fn parse_pair(text: &str, what: &str) -> Result<(f64, f64), CliError> {
    let bad = || CliError::Config(format!("{what}: expected two comma-separated numbers, got {text:?}"));
    let (a, b) = text.split_once(',').ok_or_else(bad)?;
    let a: f64 = a.trim().parse().map_err(|_| bad())?;
    let b: f64 = b.trim().parse().map_err(|_| bad())?;
    Ok((a, b))
}

fn split_cols(text: &str) -> Vec<String> {
    text.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect()
}

fn infer_format(path: Option<&Path>) -> Format {
    match path.and_then(|p| p.extension()).and_then(|e| e.to_str()) {
        Some(e) if e.eq_ignore_ascii_case("csv") => Format::Csv,
        _ => Format::Edges,
    }
}

impl RunConfig {
    /// Merges flags over the config file (if any) and checks everything that
    /// can be checked before touching input data.
    pub fn resolve(command: CommandKind, flags: Flags) -> Result<RunConfig, CliError> {
        let flags = match &flags.config {
            Some(path) => {
                let file = Flags::load_file(path)?;
                flags.or(file)
            }
            None => flags,
        };

        let needs_input = !matches!(command, CommandKind::Generate);
        if needs_input {
            let input = flags
                .input
                .as_ref()
                .ok_or_else(|| CliError::Config("--input is required".into()))?;
            if !input.is_file() {
                let missing = std::io::Error::new(std::io::ErrorKind::NotFound, "no such input file");
                return Err(CliError::io(input, missing));
            }
        }
        if command == CommandKind::Generate && flags.output.is_none() {
            return Err(CliError::Config("generate requires --output".into()));
        }

        let format = flags.format.unwrap_or_else(|| {
            let probe = if needs_input { flags.input.as_deref() } else { flags.output.as_deref() };
            infer_format(probe)
        });

        let mut thresholds = ClassificationThresholds::default();
        if let Some(t) = &flags.thresholds {
            let (c, s) = parse_pair(t, "--thresholds")?;
            thresholds.conformant_min = c;
            thresholds.suspicious_max = s;
        }
        if let Some(m) = flags.min_degree {
            thresholds.min_degree = m;
        }
        thresholds.validate().map_err(|e| CliError::Config(e.to_string()))?;

        let mut verdicts = VerdictThresholds::default();
        if let Some(v) = &flags.verdicts {
            let (p, w) = parse_pair(v, "--verdicts")?;
            if w.partial_cmp(&p) != Some(std::cmp::Ordering::Less) {
                return Err(CliError::Config(format!("--verdicts: WARN bar {w} must be below PASS bar {p}")));
            }
            verdicts = VerdictThresholds { pass: p, warn: w };
        }

        let filter = match (&flags.drop_all_zero, &flags.drop_any_zero) {
            (Some(_), Some(_)) => {
                return Err(CliError::Config("use only one of --drop-all-zero and --drop-any-zero".into()))
            }
            (Some(c), None) => Some(RowFilter::AllZero(split_cols(c))),
            (None, Some(c)) => Some(RowFilter::AnyZero(split_cols(c))),
            (None, None) => None,
        };

        let columns = flags.column.clone();

        if matches!(command, CommandKind::Analyze | CommandKind::PlotData)
            && format == Format::Csv
            && flags.column.is_empty()
        {
            return Err(CliError::Config("CSV input needs at least one --column".into()));
        }
        if command == CommandKind::PlotData && format == Format::Csv && flags.column.len() != 1 {
            return Err(CliError::Config("plot-data takes exactly one --column".into()));
        }
        if command == CommandKind::Ego && format != Format::Edges {
            return Err(CliError::Config("ego needs an edge-list input".into()));
        }
        if command == CommandKind::Validate && format != Format::Csv {
            return Err(CliError::Config("validate needs a CSV input".into()));
        }

        let degrees = match (&flags.degrees, &flags.degree_column) {
            (Some(p), Some(c)) => Some((p.clone(), c.clone())),
            (Some(_), None) => return Err(CliError::Config("--degrees needs --degree-column".into())),
            (None, Some(_)) => return Err(CliError::Config("--degree-column needs --degrees".into())),
            (None, None) => None,
        };

        let fixture = if command == CommandKind::Generate {
            Some(resolve_fixture(&flags, format)?)
        } else {
            None
        };

        Ok(RunConfig {
            command,
            input: flags.input,
            output: flags.output,
            format,
            columns,
            thresholds,
            verdicts,
            mode: if flags.skip { ParseMode::Skip } else { ParseMode::Strict },
            chi_warn: flags.chi_warn.unwrap_or(DEFAULT_CHI_WARN),
            degree: match flags.degree {
                Some(Direction::In) => DegreeKind::In,
                _ => DegreeKind::Out,
            },
            degrees,
            filter,
            digits_csv: flags.digits_csv,
            threads: flags.threads.unwrap_or(1).max(1),
            fixture,
        })
    }
}

fn build_model(name: ModelName, f: &Flags) -> Model {
    match name {
        ModelName::LogUniform => Model::log_uniform(f.lo.unwrap_or(1), f.hi.unwrap_or(1_000_000)),
        ModelName::PowerLaw => Model::power_law(
            f.alpha.unwrap_or(2.0),
            f.kmin.unwrap_or(1),
            f.kmax.unwrap_or(1_000_000),
        ),
        ModelName::PinterestMin5 => Model::PinterestMin5 {
            m: f.m.unwrap_or(5),
            q: f.q.unwrap_or(0.4),
            alpha: f.alpha.unwrap_or(2.0),
            kmin: f.kmin.unwrap_or(1),
            kmax: f.kmax.unwrap_or(1_000_000),
        },
        ModelName::BotnetBand => Model::botnet_band(f.a.unwrap_or(400), f.b.unwrap_or(600)),
    }
}

fn resolve_fixture(f: &Flags, format: Format) -> Result<Fixture, CliError> {
    let seed = f.seed.unwrap_or(0);
    let config = |e: benfordnet::ConfigError| CliError::Config(e.to_string());
    match format {
        Format::Csv => {
            let name = f
                .model
                .ok_or_else(|| CliError::Config("generate needs --model".into()))?;
            let n = f.n.ok_or_else(|| CliError::Config("generate needs --n".into()))?;
            let spec = GeneratorSpec::new(build_model(name, f), n, seed);
            spec.validate().map_err(config)?;
            let column = f.column.first().cloned().unwrap_or_else(|| "count".to_string());
            Ok(Fixture::Values { spec, column })
        }
        Format::Edges => {
            // Friend degrees of ordinary egos; three decades keeps edge counts small.
            let model = match f.model {
                Some(name) => build_model(name, f),
                None => Model::log_uniform(f.lo.unwrap_or(1), f.hi.unwrap_or(1000)),
            };
            model.validate().map_err(config)?;
            let bot_model = Model::botnet_band(f.a.unwrap_or(400), f.b.unwrap_or(600));
            bot_model.validate().map_err(config)?;
            let ego_size = f.ego_size.unwrap_or(100);
            if ego_size < 1 {
                return Err(CliError::Config("--ego-size must be at least 1".into()));
            }
            let egos = f.egos.unwrap_or(100);
            let bots = f.bots.unwrap_or(0);
            if egos + bots == 0 {
                return Err(CliError::Config("graph fixture needs --egos or --bots".into()));
            }
            Ok(Fixture::Graph {
                egos,
                bots,
                ego_size,
                model,
                bot_model,
                seed,
            })
        }
    }
}
