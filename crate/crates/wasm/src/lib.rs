//! Browser bindings for the demo page in `www/`.
//!
//! Each export takes plain numbers or text and returns a JSON string, so the
//! page needs no glue beyond `JSON.parse`.

use benfordnet::ego::{scan_egos, Bin, EgoOptions, GraphDegrees};
use benfordnet::ingest::DegreeKind;
use benfordnet::synth::{build_synthetic_graph, EgoPlan, GeneratorSpec, GraphPlan, Model};
use benfordnet::{conformance, ClassificationThresholds, ConformanceReport, FsdHistogram};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Largest population the page may request in one call.
pub const MAX_POPULATION: u64 = 2_000_000;

#[derive(Debug, Serialize)]
struct PopulationView {
    model: &'static str,
    report: ConformanceReport,
}

fn model_from(name: &str, p1: f64, p2: f64) -> Result<Model, String> {
    let model = match name {
        "log_uniform" => Model::log_uniform(1, 10u64.pow(p1.clamp(1.0, 15.0) as u32)),
        "power_law" => Model::power_law(p1, 1, 1_000_000),
        "pinterest_min5" => Model::pinterest(p1.max(1.0) as u64, p2),
        "botnet_band" => Model::botnet_band(p1.max(1.0) as u64, p2.max(1.0) as u64),
        other => return Err(format!("unknown model {other:?}")),
    };
    model.validate().map_err(|e| e.to_string())?;
    Ok(model)
}

/// Generates a population and scores it.
///
/// Parameters by model: `log_uniform` p1 = decades; `power_law` p1 = alpha;
/// `pinterest_min5` p1 = m, p2 = q; `botnet_band` p1 = a, p2 = b.
pub fn population(name: &str, p1: f64, p2: f64, n: u64, seed: u64) -> Result<String, String> {
    if n > MAX_POPULATION {
        return Err(format!("n is capped at {MAX_POPULATION} in the browser"));
    }
    let model = model_from(name, p1, p2)?;
    let spec = GeneratorSpec::new(model, n, seed);
    let hist: FsdHistogram = spec.stream().map_err(|e| e.to_string())?.collect();
    let report = conformance(&hist).map_err(|e| e.to_string())?;
    let view = PopulationView {
        model: spec.model.name(),
        report,
    };
    serde_json::to_string(&view).map_err(|e| e.to_string())
}

#[derive(Debug, Serialize)]
struct EgoPoint {
    user: u64,
    bot: bool,
    r: Option<f64>,
    bin: Bin,
}

#[derive(Debug, Serialize)]
struct EgoView {
    points: Vec<EgoPoint>,
    conformant: u64,
    intermediate: u64,
    suspicious: u64,
    undefined: u64,
    /// Injected bots among the lowest-r positions, out of `bots`.
    bots_in_tail: u64,
    bots: u64,
}

/// Builds a graph of `egos` ordinary egos and `bots` botnet-band egos, scans
/// it, and returns each focal user's r and bin.
pub fn ego_scan(
    egos: u64,
    bots: u64,
    ego_size: u64,
    seed: u64,
    conformant_min: f64,
    suspicious_max: f64,
) -> Result<String, String> {
    if egos + bots == 0 || egos + bots > 2_000 || ego_size == 0 || ego_size > 2_000 {
        return Err("use 1..=2000 egos and an ego size of 1..=2000".into());
    }
    let thresholds = ClassificationThresholds::new(conformant_min, suspicious_max, ego_size)
        .map_err(|e| e.to_string())?;
    let mut plan = GraphPlan {
        egos: Vec::new(),
        seed,
    };
    plan.egos
        .extend((0..egos).map(|_| EgoPlan::generated(ego_size, Model::log_uniform(1, 1000))));
    plan.egos
        .extend((0..bots).map(|_| EgoPlan::generated(ego_size, Model::botnet_band(400, 600))));
    let graph = build_synthetic_graph(&plan).map_err(|e| e.to_string())?.to_graph();
    let src = GraphDegrees {
        table: graph.degrees(),
        kind: DegreeKind::Out,
    };
    let opts = EgoOptions {
        thresholds,
        ..EgoOptions::default()
    };
    let (reports, _) = scan_egos(&graph, &src, &opts);
    let focal = egos + bots;
    let points: Vec<EgoPoint> = reports
        .iter()
        .filter(|r| r.user < focal)
        .map(|r| EgoPoint {
            user: r.user,
            bot: r.user >= egos,
            r: r.pearson_r(),
            bin: r.bin,
        })
        .collect();
    let tail = points.iter().take(bots as usize).filter(|p| p.bot).count() as u64;
    let count = |b: Bin| points.iter().filter(|p| p.bin == b).count() as u64;
    let view = EgoView {
        conformant: count(Bin::Conformant),
        intermediate: count(Bin::Intermediate),
        suspicious: count(Bin::Suspicious),
        undefined: count(Bin::Undefined),
        bots_in_tail: tail,
        bots,
        points,
    };
    serde_json::to_string(&view).map_err(|e| e.to_string())
}

/// Scores every nonnegative integer found in `text` (any separators).
pub fn analyze_text(text: &str) -> Result<String, String> {
    let hist: FsdHistogram = text
        .split(|c: char| !c.is_ascii_digit())
        .filter(|t| !t.is_empty())
        .filter_map(|t| t.parse::<u64>().ok())
        .collect();
    let report = conformance(&hist).map_err(|e| e.to_string())?;
    serde_json::to_string(&report).map_err(|e| e.to_string())
}

#[wasm_bindgen(js_name = population)]
pub fn population_js(model: &str, p1: f64, p2: f64, n: u32, seed: u32) -> Result<String, JsValue> {
    population(model, p1, p2, u64::from(n), u64::from(seed)).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = egoScan)]
pub fn ego_scan_js(
    egos: u32,
    bots: u32,
    ego_size: u32,
    seed: u32,
    conformant_min: f64,
    suspicious_max: f64,
) -> Result<String, JsValue> {
    ego_scan(
        u64::from(egos),
        u64::from(bots),
        u64::from(ego_size),
        u64::from(seed),
        conformant_min,
        suspicious_max,
    )
    .map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = analyzeText)]
pub fn analyze_text_js(text: &str) -> Result<String, JsValue> {
    analyze_text(text).map_err(|e| JsValue::from_str(&e))
}
