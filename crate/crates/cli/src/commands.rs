use std::collections::HashMap;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use benfordnet::ego::{scan_egos, EgoOptions, GraphDegrees};
use benfordnet::ingest::{
    column_histograms, parse_edge_list, parse_graph, AttributeReader, ColumnTally, DegreeKind,
    ParseMode, RowFilter,
};
use benfordnet::synth::{build_synthetic_graph, EgoPlan, GraphPlan};
use benfordnet::{conformance_with, ConformanceReport, StatsError};
use sha2::{Digest, Sha256};

use crate::config::{Fixture, Format, RunConfig};
use crate::error::{exit, CliError};
use crate::report::*;

const READ_BUFFER: usize = 64 * 1024;

fn open_input(path: &Path) -> Result<BufReader<File>, CliError> {
    let f = File::open(path).map_err(|e| CliError::io(path, e))?;
    Ok(BufReader::with_capacity(READ_BUFFER, f))
}

fn input_path(cfg: &RunConfig) -> Result<&Path, CliError> {
    cfg.input
        .as_deref()
        .ok_or_else(|| CliError::Config("--input is required".into()))
}

/// Destination for a report: the named file or stdout.
fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| CliError::io(p, e))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn out_err(path: Option<&Path>) -> impl Fn(io::Error) -> CliError + '_ {
    move |e| CliError::io(path.unwrap_or(Path::new("<stdout>")), e)
}

fn write_json<T: serde::Serialize>(path: Option<&Path>, value: &T) -> Result<(), CliError> {
    let mut out = open_output(path)?;
    serde_json::to_writer_pretty(&mut out, value).map_err(|e| out_err(path)(e.into()))?;
    writeln!(out).and_then(|_| out.flush()).map_err(out_err(path))
}

fn fmt_r(r: Option<f64>) -> String {
    r.map_or_else(|| "undefined".to_string(), |r| format!("{r:.6}"))
}

fn summary_line(label: &str, r: &ConformanceReport) -> String {
    let warn = if r.chi_square.large_n_warning {
        " (large n: chi-square not meaningful)"
    } else {
        ""
    };
    format!(
        "{label}: n={} r={} mad={:.6} chi2={:.3}{warn}",
        r.n,
        fmt_r(r.pearson_r),
        r.mad,
        r.chi_square.statistic
    )
}

fn read_header(path: &Path) -> Result<Vec<String>, CliError> {
    let mut line = String::new();
    open_input(path)?
        .read_line(&mut line)
        .map_err(|e| CliError::io(path, e))?;
    Ok(line
        .trim_end_matches(['\r', '\n'])
        .split(',')
        .map(|s| s.trim().to_string())
        .collect())
}

/// Reads the requested CSV columns (plus any filter columns) in one pass.
fn read_csv_series(
    path: &Path,
    columns: &[String],
    filter: Option<&RowFilter>,
    mode: ParseMode,
) -> Result<(Vec<ColumnTally>, SourceStats), CliError> {
    let mut read_cols: Vec<&str> = columns.iter().map(String::as_str).collect();
    if let Some(RowFilter::AllZero(cols) | RowFilter::AnyZero(cols)) = filter {
        for c in cols {
            if !read_cols.contains(&c.as_str()) {
                read_cols.push(c);
            }
        }
    }
    let ingest = |e| CliError::ingest(path, e);
    let mut reader = AttributeReader::new(open_input(path)?, &read_cols, mode).map_err(ingest)?;
    if let Some(f) = filter {
        reader = reader.with_filter(f.clone()).map_err(ingest)?;
    }
    let tallies = column_histograms(&mut reader).map_err(ingest)?;
    let stats = SourceStats {
        records: reader.rows_read(),
        skipped: reader.skipped_rows(),
        filtered: reader.filtered_rows(),
    };
    let series = tallies.into_iter().take(columns.len()).collect();
    Ok((series, stats))
}

fn read_edge_series(path: &Path, kind: DegreeKind, mode: ParseMode) -> Result<(Vec<ColumnTally>, SourceStats), CliError> {
    let table = parse_edge_list(open_input(path)?, mode).map_err(|e| CliError::ingest(path, e))?;
    let label = match kind {
        DegreeKind::Out => "out_degree",
        DegreeKind::In => "in_degree",
    };
    let stats = SourceStats {
        records: table.edge_count(),
        skipped: table.skipped_lines(),
        filtered: 0,
    };
    let tally = ColumnTally {
        column: label.to_string(),
        histogram: table.histogram(kind),
        missing: 0,
    };
    Ok((vec![tally], stats))
}

fn read_series(cfg: &RunConfig) -> Result<(Vec<ColumnTally>, SourceStats), CliError> {
    let path = input_path(cfg)?;
    match cfg.format {
        Format::Csv => read_csv_series(path, &cfg.columns, cfg.filter.as_ref(), cfg.mode),
        Format::Edges => read_edge_series(path, cfg.degree, cfg.mode),
    }
}

fn score(series: &ColumnTally, chi_warn: u64) -> Result<ConformanceReport, CliError> {
    conformance_with(&series.histogram, chi_warn).map_err(|e: StatsError| {
        CliError::Data(format!("{}: {e}", series.column))
    })
}

pub fn cmd_analyze(cfg: &RunConfig) -> Result<i32, CliError> {
    let (series, source) = read_series(cfg)?;
    let mut reports = Vec::with_capacity(series.len());
    for s in &series {
        let report = score(s, cfg.chi_warn)?;
        eprintln!("{}", summary_line(&s.column, &report));
        reports.push(SeriesReport {
            label: s.column.clone(),
            missing: s.missing,
            report,
        });
    }
    if let Some(path) = &cfg.digits_csv {
        for r in &reports {
            let target = if reports.len() == 1 {
                path.clone()
            } else {
                suffixed(path, &r.label)
            };
            let mut out = open_output(Some(&target))?;
            write_digits_csv(&mut out, &r.report)
                .and_then(|_| out.flush())
                .map_err(|e| CliError::io(&target, e))?;
        }
    }
    let doc = AnalyzeOutput {
        schema: ANALYZE_SCHEMA.into(),
        input: input_path(cfg)?.display().to_string(),
        format: cfg.format,
        source,
        reports,
    };
    write_json(cfg.output.as_deref(), &doc)?;
    Ok(exit::OK)
}

/// `dir/name.csv` + `friends` -> `dir/name-friends.csv`.
fn suffixed(path: &Path, label: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("digits");
    let name = match path.extension().and_then(|e| e.to_str()) {
        Some(ext) => format!("{stem}-{label}.{ext}"),
        None => format!("{stem}-{label}"),
    };
    path.with_file_name(name)
}

pub fn cmd_plot_data(cfg: &RunConfig) -> Result<i32, CliError> {
    let (series, _) = read_series(cfg)?;
    let s = series
        .first()
        .ok_or_else(|| CliError::Config("plot-data needs one series".into()))?;
    let report = score(s, cfg.chi_warn)?;
    let path = cfg.output.as_deref();
    let mut out = open_output(path)?;
    write_digits_csv(&mut out, &report)
        .and_then(|_| out.flush())
        .map_err(out_err(path))?;
    Ok(exit::OK)
}

pub fn cmd_validate(cfg: &RunConfig) -> Result<i32, CliError> {
    let path = input_path(cfg)?;
    let columns = if cfg.columns.is_empty() {
        let header = read_header(path)?;
        header.into_iter().skip(1).filter(|c| !c.is_empty()).collect()
    } else {
        cfg.columns.clone()
    };
    if columns.is_empty() {
        return Err(CliError::Data(format!("{}: no count columns", path.display())));
    }
    let (series, source) = read_csv_series(path, &columns, cfg.filter.as_ref(), cfg.mode)?;
    let mut out = Vec::with_capacity(series.len());
    let mut failed = 0;
    for s in &series {
        let report = conformance_with(&s.histogram, cfg.chi_warn).ok();
        let r = report.as_ref().and_then(|r| r.pearson_r);
        let verdict = Verdict::from_r(r, &cfg.verdicts);
        if verdict == Verdict::Fail {
            failed += 1;
        }
        let detail = match &report {
            Some(rep) => format!(
                "r={} n={} deviation_pct[1]={:.1}",
                fmt_r(r),
                rep.n,
                rep.deviation_pct[0]
            ),
            None => "empty sample".to_string(),
        };
        eprintln!("{}: {verdict} {detail}", s.column);
        out.push(ValidateColumn {
            label: s.column.clone(),
            verdict,
            missing: s.missing,
            report,
        });
    }
    let doc = ValidateOutput {
        schema: VALIDATE_SCHEMA.into(),
        input: path.display().to_string(),
        verdicts: cfg.verdicts,
        source,
        columns: out,
        failed,
    };
    write_json(cfg.output.as_deref(), &doc)?;
    Ok(if failed > 0 { exit::VALIDATION_FAILED } else { exit::OK })
}

fn load_external_degrees(path: &Path, column: &str, mode: ParseMode) -> Result<HashMap<u64, u64>, CliError> {
    let mut reader =
        AttributeReader::new(open_input(path)?, &[column], mode).map_err(|e| CliError::ingest(path, e))?;
    let mut map = HashMap::new();
    while let Some((id, values)) = reader.next_row().map_err(|e| CliError::ingest(path, e))? {
        let Ok(node) = id.parse::<u64>() else {
            if mode == ParseMode::Skip {
                continue;
            }
            return Err(CliError::Data(format!(
                "{}: node id {id:?} is not a nonnegative integer",
                path.display()
            )));
        };
        let id = node;
        if let Some(v) = values[0] {
            map.insert(id, v);
        }
    }
    Ok(map)
}

pub fn cmd_ego(cfg: &RunConfig) -> Result<i32, CliError> {
    let path = input_path(cfg)?;
    let graph = parse_graph(open_input(path)?, cfg.mode).map_err(|e| CliError::ingest(path, e))?;
    let opts = EgoOptions {
        thresholds: cfg.thresholds,
        chi_warn: cfg.chi_warn,
        threads: cfg.threads,
    };
    let (reports, summary) = match &cfg.degrees {
        Some((dpath, col)) => {
            let ext = load_external_degrees(dpath, col, cfg.mode)?;
            scan_egos(&graph, &ext, &opts)
        }
        None => {
            let src = GraphDegrees {
                table: graph.degrees(),
                kind: cfg.degree,
            };
            scan_egos(&graph, &src, &opts)
        }
    };

    let opath = cfg.output.as_deref();
    let mut out = open_output(opath)?;
    let err = out_err(opath);
    for r in &reports {
        serde_json::to_writer(&mut out, &EgoLine::Ego(r.into())).map_err(|e| err(e.into()))?;
        out.write_all(b"\n").map_err(&err)?;
    }
    let tail = EgoLine::Summary(SummaryRecord {
        schema: EGO_SCHEMA.into(),
        input: path.display().to_string(),
        thresholds: cfg.thresholds,
        summary,
    });
    serde_json::to_writer(&mut out, &tail).map_err(|e| err(e.into()))?;
    out.write_all(b"\n").and_then(|_| out.flush()).map_err(&err)?;

    eprintln!(
        "egos: users={} reported={} skipped={} conformant={} intermediate={} suspicious={} undefined={} fraction>={}: {:.4} fraction<{}: {:.4}",
        summary.users,
        summary.reported,
        summary.skipped,
        summary.conformant,
        summary.intermediate,
        summary.suspicious,
        summary.undefined,
        cfg.thresholds.conformant_min,
        summary.fraction_conformant,
        cfg.thresholds.suspicious_max,
        summary.fraction_suspicious,
    );
    Ok(exit::OK)
}

/// Tees everything written into a SHA-256 digest.
struct DigestWriter<W: Write> {
    inner: W,
    hasher: Sha256,
}

impl<W: Write> Write for DigestWriter<W> {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        let n = self.inner.write(buf)?;
        self.hasher.update(&buf[..n]);
        Ok(n)
    }

    fn flush(&mut self) -> io::Result<()> {
        self.inner.flush()
    }
}

pub fn manifest_path(output: &Path) -> PathBuf {
    let mut name = output.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    output.with_file_name(name)
}

pub fn cmd_generate(cfg: &RunConfig) -> Result<i32, CliError> {
    let path = cfg
        .output
        .as_deref()
        .ok_or_else(|| CliError::Config("generate requires --output".into()))?;
    let fixture = cfg
        .fixture
        .as_ref()
        .ok_or_else(|| CliError::Config("no generator spec".into()))?;
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = DigestWriter {
        inner: BufWriter::new(file),
        hasher: Sha256::new(),
    };
    let ioerr = |e| CliError::io(path, e);

    let (seed, spec, records, bot_users) = match fixture {
        Fixture::Values { spec, column } => {
            let stream = spec.stream().map_err(|e| CliError::Config(e.to_string()))?;
            writeln!(w, "id,{column}").map_err(ioerr)?;
            for (i, v) in stream.enumerate() {
                writeln!(w, "{i},{v}").map_err(ioerr)?;
            }
            let json = serde_json::to_value(spec).expect("spec serializes");
            (spec.seed, json, spec.n, Vec::new())
        }
        Fixture::Graph {
            egos,
            bots,
            ego_size,
            model,
            bot_model,
            seed,
        } => {
            let mut plan = GraphPlan {
                egos: Vec::with_capacity((egos + bots) as usize),
                seed: *seed,
            };
            plan.egos
                .extend((0..*egos).map(|_| EgoPlan::generated(*ego_size, model.clone())));
            plan.egos
                .extend((0..*bots).map(|_| EgoPlan::generated(*ego_size, bot_model.clone())));
            let graph = build_synthetic_graph(&plan).map_err(|e| CliError::Config(e.to_string()))?;
            graph.write_edge_list(&mut w).map_err(ioerr)?;
            let json = serde_json::json!({
                "egos": egos,
                "bots": bots,
                "ego_size": ego_size,
                "friend_model": model,
                "bot_model": bot_model,
            });
            (*seed, json, graph.edge_count(), (*egos..egos + bots).collect())
        }
    };
    w.flush().map_err(ioerr)?;
    let digest = hex::encode(w.hasher.finalize());

    let manifest = Manifest {
        schema: MANIFEST_SCHEMA.into(),
        format: cfg.format,
        seed,
        rng: RNG_DESCRIPTION.into(),
        spec,
        records,
        sha256: digest.clone(),
        bot_users,
    };
    let mpath = manifest_path(path);
    write_json(Some(&mpath), &manifest)?;
    eprintln!("wrote {} ({records} records, sha256 {digest})", path.display());
    Ok(exit::OK)
}
