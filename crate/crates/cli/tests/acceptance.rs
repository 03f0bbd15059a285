//! Acceptance suite. Prints one PASS/FAIL line per criterion.
//!
//! Runs under its own harness so it can own the global allocator: peak heap
//! during the streaming check is read from a counting allocator.
//!
//! A criterion listed in `KNOWN_UNATTAINABLE` is still run at its full
//! tolerance and still prints FAIL; it only stops that failure from failing
//! the process. If it ever passes, the suite says so.

use std::alloc::{GlobalAlloc, Layout, System};
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use benfordnet::ego::{scan_egos, Bin, EgoOptions};
use benfordnet::ingest::Graph;
use benfordnet::synth::{build_synthetic_graph, EgoPlan, GeneratorSpec, GraphPlan, Model};
use benfordnet::{benford_expected, chi_square, conformance, fsd, mad, pearson_r, FsdHistogram, DIGITS};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

struct Counting;

static CURRENT: AtomicUsize = AtomicUsize::new(0);
static PEAK: AtomicUsize = AtomicUsize::new(0);

unsafe impl GlobalAlloc for Counting {
    unsafe fn alloc(&self, layout: Layout) -> *mut u8 {
        let p = System.alloc(layout);
        if !p.is_null() {
            let now = CURRENT.fetch_add(layout.size(), Ordering::Relaxed) + layout.size();
            PEAK.fetch_max(now, Ordering::Relaxed);
        }
        p
    }

    unsafe fn dealloc(&self, ptr: *mut u8, layout: Layout) {
        System.dealloc(ptr, layout);
        CURRENT.fetch_sub(layout.size(), Ordering::Relaxed);
    }

    unsafe fn realloc(&self, ptr: *mut u8, layout: Layout, new_size: usize) -> *mut u8 {
        let p = System.realloc(ptr, layout, new_size);
        if !p.is_null() {
            if new_size >= layout.size() {
                let now = CURRENT.fetch_add(new_size - layout.size(), Ordering::Relaxed)
                    + (new_size - layout.size());
                PEAK.fetch_max(now, Ordering::Relaxed);
            } else {
                CURRENT.fetch_sub(layout.size() - new_size, Ordering::Relaxed);
            }
        }
        p
    }
}

#[global_allocator]
static ALLOC: Counting = Counting;

/// Criteria run at full tolerance whose failure is analysed and expected.
/// 5: a k^-2 power law has digit law 1/(d(d+1)), whose limiting Pearson r
/// against Benford is 0.97578, below the 0.99 bar for any sample size.
const KNOWN_UNATTAINABLE: &[u32] = &[5];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn cli(args: &[&str]) -> i32 {
    let mut argv = vec!["benfordnet"];
    argv.extend_from_slice(args);
    match benfordnet_cli::run_args(argv) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("benfordnet: {e}");
            e.exit_code()
        }
    }
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn c1_expected_table() -> Outcome {
    let printed: [(f64, i32); DIGITS] = [
        (0.301, 3),
        (0.176, 3),
        (0.125, 3),
        (0.097, 3),
        (0.07918, 5),
        (0.067, 3),
        (0.05799, 5),
        (0.051, 3),
        (0.046, 3),
    ];
    let e = benford_expected();
    let mut worst = 0.0f64;
    let mut ok = true;
    for (d, &(v, places)) in printed.iter().enumerate() {
        let p = e.prob(d as u8 + 1);
        let err = (p - v).abs();
        // Rounded to `places` decimals the value must equal the printed one.
        ok &= err <= 0.5 * 10f64.powi(-places) + 1e-15;
        worst = worst.max(err / 10f64.powi(-places));
    }
    let sum: f64 = e.as_array().iter().sum();
    ok &= (sum - 1.0).abs() <= 1e-12;
    outcome(ok, format!("max err {worst:.3} of the printed step, |sum-1| = {:.1e}", (sum - 1.0).abs()))
}

fn string_fsd(v: u64) -> u8 {
    v.to_string().as_bytes()[0] - b'0'
}

fn c2_fsd_oracle() -> Outcome {
    let mut mismatches = 0u64;
    for v in 1..=1_000_000u64 {
        if fsd(v).ok() != Some(string_fsd(v)) {
            mismatches += 1;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..10_000 {
        // Spread over all magnitudes, not just the top decade.
        let v: u64 = rng.gen::<u64>() >> rng.gen_range(0..64);
        let v = v.max(1);
        if fsd(v).ok() != Some(string_fsd(v)) {
            mismatches += 1;
        }
    }
    for v in [1, 9, 10, u64::MAX, 10_000_000_000_000_000_000] {
        if fsd(v).ok() != Some(string_fsd(v)) {
            mismatches += 1;
        }
    }
    outcome(mismatches == 0, format!("{mismatches} mismatches over 1,010,005 values"))
}

/// Textbook formulas, written independently of the library.
fn reference_stats(counts: &[u64; DIGITS]) -> (Option<f64>, f64, f64) {
    let n: u64 = counts.iter().sum();
    let e: Vec<f64> = (1..=9).map(|d| (1.0 + 1.0 / d as f64).ln() / 10f64.ln()).collect();
    let o: Vec<f64> = counts.iter().map(|&c| c as f64 / n as f64).collect();
    let k = DIGITS as f64;
    let (sx, sy) = (o.iter().sum::<f64>(), e.iter().sum::<f64>());
    let sxy: f64 = o.iter().zip(&e).map(|(a, b)| a * b).sum();
    let sxx: f64 = o.iter().map(|a| a * a).sum();
    let syy: f64 = e.iter().map(|b| b * b).sum();
    let den = ((k * sxx - sx * sx) * (k * syy - sy * sy)).sqrt();
    let r = (den > 1e-300).then(|| (k * sxy - sx * sy) / den);
    let m = o.iter().zip(&e).map(|(a, b)| (a - b).abs()).sum::<f64>() / k;
    let chi: f64 = counts
        .iter()
        .zip(&e)
        .map(|(&c, &p)| {
            let exp = n as f64 * p;
            (c as f64 - exp).powi(2) / exp
        })
        .sum();
    (r, m, chi)
}

fn c3_stats_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let e = benford_expected();
    let (mut dr, mut dm, mut dc) = (0.0f64, 0.0f64, 0.0f64);
    let mut ok = true;
    for i in 0..100 {
        let mut counts = [0u64; DIGITS];
        let scale = [10, 1_000, 1_000_000][i % 3];
        for c in counts.iter_mut() {
            *c = rng.gen_range(0..scale);
        }
        if counts.iter().all(|&c| c == 0) {
            counts[0] = 1;
        }
        let h = FsdHistogram::from_counts(counts, 0);
        let obs = h.proportions();
        let (rr, rm, rc) = reference_stats(&counts);
        let r = pearson_r(&obs, e.as_array());
        match (r, rr) {
            (Some(a), Some(b)) => dr = dr.max((a - b).abs()),
            (None, None) => {}
            _ => ok = false,
        }
        dm = dm.max((mad(&obs, e.as_array()) - rm).abs());
        let chi = chi_square(&h, &e, u64::MAX).unwrap().statistic;
        dc = dc.max((chi - rc).abs() / rc.abs().max(1.0));
    }
    ok &= dr <= 1e-12 && dm <= 1e-12 && dc <= 1e-12;
    outcome(ok, format!("max |dr| {dr:.1e}, |dMAD| {dm:.1e}, rel dchi2 {dc:.1e}"))
}

fn c4_conforming() -> (Outcome, f64) {
    let spec = GeneratorSpec::new(Model::log_uniform(1, 1_000_000), 1_000_000, 4);
    let hist: FsdHistogram = spec.stream().unwrap().collect();
    let rep = conformance(&hist).unwrap();
    let r = rep.pearson_r.unwrap();
    (
        outcome(r >= 0.9999 && rep.mad <= 0.002, format!("r = {r:.6}, MAD = {:.6}", rep.mad)),
        r,
    )
}

fn c5_power_law() -> Outcome {
    let spec = GeneratorSpec::new(Model::power_law(2.0, 1, 1_000_000), 100_000, 5);
    let hist: FsdHistogram = spec.stream().unwrap().collect();
    let r = conformance(&hist).unwrap().pearson_r.unwrap();
    outcome(r >= 0.99, format!("r = {r:.6} (required >= 0.99; analytic limit 0.975777)"))
}

fn c6_pinterest(conforming_r: f64) -> Outcome {
    let spec = GeneratorSpec::new(Model::pinterest(5, 0.4), 100_000, 6);
    let hist: FsdHistogram = spec.stream().unwrap().collect();
    let rep = conformance(&hist).unwrap();
    let p5 = rep.observed(5);
    let r = rep.pearson_r.unwrap_or(f64::NEG_INFINITY);
    outcome(
        p5 > 0.158 && r < conforming_r,
        format!("observed[5] = {p5:.4}, r = {r:.4} vs conforming {conforming_r:.6}"),
    )
}

/// Ego-to-friend edges plus planned friend degrees: the same counts an
/// edge-list round trip yields, without materializing filler edges.
fn ego_scan_of(plan: &GraphPlan) -> Vec<benfordnet::EgoReport> {
    let g = build_synthetic_graph(plan).unwrap();
    let graph: Graph = g.ego_edges().collect();
    let degrees = g.planned_out_degrees();
    scan_egos(&graph, &degrees, &EgoOptions::default()).0
}

fn c7_ego_band() -> Outcome {
    let plan = GraphPlan {
        egos: (0..1000)
            .map(|_| EgoPlan::generated(100, Model::log_uniform(1, 1000)))
            .collect(),
        seed: 7,
    };
    let reports = ego_scan_of(&plan);
    let n = reports.len() as f64;
    let high = reports.iter().filter(|r| r.pearson_r().is_some_and(|r| r > 0.9)).count() as f64 / n;
    let low = reports.iter().filter(|r| r.pearson_r().is_some_and(|r| r < 0.5)).count() as f64 / n;
    outcome(
        reports.len() == 1000 && high >= 0.85 && low <= 0.02,
        format!("{} egos, frac r>0.9 = {high:.3}, frac r<0.5 = {low:.3}", reports.len()),
    )
}

fn c8_detection() -> Outcome {
    let runs = 50u64;
    let mut good = 0u64;
    for seed in 0..runs {
        let mut egos: Vec<EgoPlan> = (0..100)
            .map(|_| EgoPlan::generated(100, Model::log_uniform(1, 1000)))
            .collect();
        egos.extend((0..10).map(|_| EgoPlan::generated(100, Model::botnet_band(400, 600))));
        let reports = ego_scan_of(&GraphPlan { egos, seed });
        let bots_suspicious = reports
            .iter()
            .filter(|r| r.user >= 100)
            .all(|r| r.bin == Bin::Suspicious);
        let tail_is_bots = reports.iter().take(10).all(|r| r.user >= 100);
        if reports.len() == 110 && bots_suspicious && tail_is_bots {
            good += 1;
        }
    }
    let frac = good as f64 / runs as f64;
    outcome(frac >= 0.95, format!("{good}/{runs} runs with all bots suspicious and lowest-ranked"))
}

fn c9_validate(dir: &Path) -> Outcome {
    let spike = dir.join("spike.csv");
    {
        let mut w = BufWriter::new(fs::File::create(&spike).unwrap());
        writeln!(w, "id,count").unwrap();
        let mut id = 0;
        let mut row = |w: &mut BufWriter<fs::File>, v: u64| {
            id += 1;
            writeln!(w, "{id},{v}").unwrap();
        };
        for i in 0..945 {
            row(&mut w, [1, 12, 150, 1999][i % 4]);
        }
        for d in 2..=9u64 {
            for _ in 0..if d == 9 { 6 } else { 7 } {
                row(&mut w, d * 10);
            }
        }
    }
    let spike_out = dir.join("spike.json");
    let code = cli(&["validate", "-i", spike.to_str().unwrap(), "-o", spike_out.to_str().unwrap()]);
    let v = read_json(&spike_out);
    let col = &v["columns"][0];
    let dev1 = col["report"]["deviation_pct"][0].as_f64().unwrap_or(0.0);
    let spike_ok = code == 1 && col["verdict"] == "FAIL" && dev1 > 200.0;

    let survey = dir.join("survey.csv");
    let gen = cli(&[
        "generate", "--model", "log_uniform", "--lo", "1", "--hi", "1000000", "--n", "100000",
        "--seed", "9", "-o", survey.to_str().unwrap(),
    ]);
    let survey_out = dir.join("survey.json");
    let code2 = cli(&["validate", "-i", survey.to_str().unwrap(), "-o", survey_out.to_str().unwrap()]);
    let v2 = read_json(&survey_out);
    let col2 = &v2["columns"][0];
    let r2 = col2["report"]["pearson_r"].as_f64().unwrap_or(f64::NAN);
    let survey_ok = gen == 0 && code2 == 0 && col2["verdict"] == "PASS" && r2 > 0.99;
    outcome(
        spike_ok && survey_ok,
        format!(
            "spike: exit {code}, {}, dev[1] = {dev1:.1}%; survey: exit {code2}, {}, r = {r2:.5}",
            col["verdict"], col2["verdict"]
        ),
    )
}

const STREAM_ROWS: u64 = 10_000_000;
const HEAP_CEILING: usize = 4 << 20;
const STREAM_TIME_LIMIT: Duration = Duration::from_secs(120);

fn c10_streaming(dir: &Path) -> Outcome {
    let input = dir.join("big.csv");
    {
        let mut w = BufWriter::with_capacity(1 << 20, fs::File::create(&input).unwrap());
        writeln!(w, "id,count").unwrap();
        let spec = GeneratorSpec::new(Model::log_uniform(1, 1_000_000), STREAM_ROWS, 10);
        for (id, v) in spec.stream().unwrap().enumerate() {
            writeln!(w, "{id},{v}").unwrap();
        }
    }
    let bytes = fs::metadata(&input).unwrap().len();
    let out = dir.join("big.json");
    let (i, o) = (input.to_str().unwrap().to_owned(), out.to_str().unwrap().to_owned());

    let base = CURRENT.load(Ordering::Relaxed);
    PEAK.store(base, Ordering::Relaxed);
    let t0 = Instant::now();
    let code = cli(&["analyze", "-i", &i, "--column", "count", "-o", &o]);
    let elapsed = t0.elapsed();
    let peak = PEAK.load(Ordering::Relaxed).saturating_sub(base);

    let v = read_json(&out);
    let rep = &v["reports"][0];
    let n = rep["n"].as_u64().unwrap_or(0);
    let r = rep["pearson_r"].as_f64().unwrap_or(f64::NAN);
    fs::remove_file(&input).ok();
    outcome(
        code == 0 && n == STREAM_ROWS && r >= 0.9999 && peak <= HEAP_CEILING && elapsed <= STREAM_TIME_LIMIT,
        format!(
            "{} MB in {:.1} s, peak heap {} KiB (ceiling {} KiB), n = {n}, r = {r:.6}",
            bytes / 1_000_000,
            elapsed.as_secs_f64(),
            peak / 1024,
            HEAP_CEILING / 1024
        ),
    )
}

fn main() {
    let dir = tempfile::tempdir().unwrap();
    let mut results: Vec<(u32, &str, Outcome, Duration)> = Vec::new();
    let mut timed = |id: u32, name: &'static str, f: &mut dyn FnMut() -> Outcome| {
        let t = Instant::now();
        let o = f();
        results.push((id, name, o, t.elapsed()));
    };
    let mut conforming_r = f64::NAN;
    timed(1, "expected distribution", &mut c1_expected_table);
    timed(2, "fsd oracle", &mut c2_fsd_oracle);
    timed(3, "statistics oracle", &mut c3_stats_oracle);
    timed(4, "conforming population", &mut || {
        let (o, r) = c4_conforming();
        conforming_r = r;
        o
    });
    timed(5, "power-law population", &mut c5_power_law);
    timed(6, "pinterest anomaly", &mut || c6_pinterest(conforming_r));
    timed(7, "egocentric band", &mut c7_ego_band);
    timed(8, "detection end-to-end", &mut c8_detection);
    timed(9, "validation verdicts", &mut || c9_validate(dir.path()));
    timed(10, "streaming scale", &mut || c10_streaming(dir.path()));

    let mut unexpected = 0;
    println!();
    for (id, name, o, t) in &results {
        let known = KNOWN_UNATTAINABLE.contains(id);
        let tag = match (o.pass, known) {
            (true, false) => "PASS",
            (true, true) => "PASS (listed as unattainable; update KNOWN_UNATTAINABLE)",
            (false, true) => "FAIL (known, unattainable)",
            (false, false) => {
                unexpected += 1;
                "FAIL"
            }
        };
        println!("criterion {id:>2} {name:<24} {tag:<5} [{:>6.2} s] {}", t.as_secs_f64(), o.detail);
    }
    let passed = results.iter().filter(|r| r.2.pass).count();
    println!("\n{passed}/{} criteria passed, {unexpected} unexpected failures", results.len());
    if unexpected > 0 {
        std::process::exit(1);
    }
}
