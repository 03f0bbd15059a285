use std::io::Cursor;

use benfordnet::ego::{scan_egos, Bin, EgoOptions, GraphDegrees};
use benfordnet::ingest::{column_histogram, parse_edge_list, parse_graph, AttributeReader, DegreeKind, ParseMode};
use benfordnet::synth::{build_synthetic_graph, EgoPlan, GeneratorSpec, GraphPlan, Model};
use benfordnet::{conformance, FsdHistogram};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn edge_text(edges: &[(u64, u64)]) -> String {
    edges.iter().map(|(a, b)| format!("{a} {b}\n")).collect()
}

fn small_plan(seed: u64) -> GraphPlan {
    let mut egos: Vec<EgoPlan> = (0..12)
        .map(|_| EgoPlan::generated(100, Model::log_uniform(1, 1000)))
        .collect();
    egos.extend((0..2).map(|_| EgoPlan::generated(100, Model::botnet_band(400, 600))));
    GraphPlan { egos, seed }
}

#[test]
fn written_graph_parses_back_to_planned_degrees() {
    let g = build_synthetic_graph(&small_plan(1)).unwrap();
    let mut buf = Vec::new();
    g.write_edge_list(&mut buf).unwrap();
    let table = parse_edge_list(Cursor::new(buf), ParseMode::Strict).unwrap();
    assert_eq!(table.edge_count(), g.edge_count());
    for (node, d) in g.planned_out_degrees() {
        assert_eq!(table.out_degree(node), d, "node {node}");
    }
}

#[test]
fn ego_scan_is_independent_of_edge_order() {
    let g = build_synthetic_graph(&small_plan(2)).unwrap();
    let mut edges: Vec<(u64, u64)> = g.edges().collect();
    let scan = |text: String| {
        let graph = parse_graph(Cursor::new(text), ParseMode::Strict).unwrap();
        let src = GraphDegrees {
            table: graph.degrees(),
            kind: DegreeKind::Out,
        };
        scan_egos(&graph, &src, &EgoOptions::default())
    };
    let (a, sa) = scan(edge_text(&edges));
    edges.shuffle(&mut ChaCha8Rng::seed_from_u64(9));
    let (b, sb) = scan(edge_text(&edges));
    assert_eq!(sa, sb);
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.user, y.user);
        assert_eq!(x.hist, y.hist);
        assert_eq!(x.bin, y.bin);
    }
    let bots: Vec<u64> = a.iter().take(2).map(|r| r.user).collect();
    assert!(bots.iter().all(|&u| u >= 12), "{bots:?}");
    assert!(a.iter().take(2).all(|r| r.bin == Bin::Suspicious));
}

#[test]
fn streaming_equals_batch() {
    let spec = GeneratorSpec::new(Model::pinterest(5, 0.4), 50_000, 3);
    let values: Vec<u64> = spec.stream().unwrap().collect();

    let batch: FsdHistogram = values.iter().copied().collect();

    let mut csv = String::from("id,count\n");
    for (i, v) in values.iter().enumerate() {
        csv.push_str(&format!("{i},{v}\n"));
    }
    let mut reader = AttributeReader::new(Cursor::new(csv), &["count"], ParseMode::Strict).unwrap();
    let streamed = column_histogram(&mut reader, "count").unwrap();
    assert_eq!(streamed.histogram, batch);

    let mut parts = values.chunks(7_777).map(|c| c.iter().copied().collect::<FsdHistogram>());
    let first = parts.next().unwrap();
    let merged = parts.fold(first, |acc, h| acc.merged(&h));
    assert_eq!(merged, batch);
    assert_eq!(conformance(&merged).unwrap(), conformance(&batch).unwrap());
}

#[test]
fn million_row_csv_conforms() {
    let spec = GeneratorSpec::new(Model::log_uniform(1, 1_000_000), 1_000_000, 11);
    let mut csv = String::with_capacity(16_000_000);
    csv.push_str("user,followers\n");
    for (i, v) in spec.stream().unwrap().enumerate() {
        csv.push_str(&format!("{i},{v}\n"));
    }
    let mut reader = AttributeReader::new(Cursor::new(csv), &["followers"], ParseMode::Strict).unwrap();
    let tally = column_histogram(&mut reader, "followers").unwrap();
    let rep = conformance(&tally.histogram).unwrap();
    assert_eq!(rep.n, 1_000_000);
    assert!(rep.pearson_r.unwrap() >= 0.9999);
    assert!(rep.mad <= 0.002);
    assert!(rep.chi_square.large_n_warning);
}
