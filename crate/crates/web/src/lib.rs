//! wasm-bindgen bindings behind `www/index.html`.
//!
//! Every entry point takes the graph as text ("n m" then one "u v" line per
//! edge) and returns a string: JSON for data, SVG markup for drawings.
//! Errors come back as plain messages, which JS sees as thrown strings.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use sgh_core::embed::{embed, EmbedOptions, Embedding};
use sgh_core::families;
use sgh_core::graph::{parse_graph, Graph};
use sgh_core::hyperbolic::{approx_acosh, render_svg, HyperbolicOracle, HyperbolicParams, RenderOptions};
use sgh_core::router::{route, verify_all_pairs, DyadicOracle, NextHopPolicy, VerifyOptions};

/// Largest graph the page will realize in the hyperbolic plane.
pub const HYPERBOLIC_LIMIT: usize = 64;

fn message(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn load(text: &str, root: usize) -> Result<(Graph, Embedding), String> {
    let g = parse_graph(text).map_err(message)?;
    let emb = embed(&g, &EmbedOptions { root, ..EmbedOptions::default() }).map_err(message)?;
    Ok((g, emb))
}

fn params(emb: &Embedding, d: Option<f64>) -> Result<HyperbolicParams, String> {
    if emb.table.len() > HYPERBOLIC_LIMIT {
        return Err(format!(
            "the hyperbolic view is limited to {HYPERBOLIC_LIMIT} vertices; this graph has {}",
            emb.table.len()
        ));
    }
    HyperbolicParams::new(emb.table.max_address_depth(), d, None).map_err(message)
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("plain data serializes")
}

/// Graph text for one of the built-in families: `path`, `star`,
/// `caterpillar`, `binary`, `tree` (random), `gnp` (random connected).
#[wasm_bindgen]
pub fn sample_graph(family: &str, n: usize, seed: u64) -> Result<String, String> {
    if !(2..=4096).contains(&n) {
        return Err("n must be between 2 and 4096".into());
    }
    let g = match family {
        "path" => families::path(n),
        "star" => families::star(n),
        "caterpillar" => families::caterpillar(n.div_ceil(4), 3),
        "binary" => families::complete_binary_tree((n + 1).ilog2().saturating_sub(1)),
        "tree" => families::random_tree(n, seed),
        "gnp" => families::gnp_connected(n, (2.0 * (n as f64).ln() / n as f64).min(1.0), seed),
        other => return Err(format!("unknown family {other:?}")),
    };
    let mut text = format!("{} {}\n", g.vertex_count(), g.edge_count());
    for (u, v) in g.edges() {
        text.push_str(&format!("{u} {v}\n"));
    }
    Ok(text)
}

#[derive(Serialize)]
struct Row {
    vertex: usize,
    x: String,
    y: String,
}

#[derive(Serialize)]
struct Summary {
    vertices: usize,
    edges: usize,
    heavy_paths: usize,
    dummies: usize,
    max_bits: usize,
    coordinates: Vec<Row>,
}

/// Coordinates and size figures of the embedding, as JSON.
#[wasm_bindgen]
pub fn embed_summary(graph: &str, root: usize) -> Result<String, String> {
    let (g, emb) = load(graph, root)?;
    let coordinates = emb
        .table
        .points()
        .iter()
        .enumerate()
        .map(|(vertex, p)| Row { vertex, x: p.x().to_string(), y: p.y().to_string() })
        .collect();
    Ok(to_json(&Summary {
        vertices: g.vertex_count(),
        edges: g.edge_count(),
        heavy_paths: emb.decomposition.path_count(),
        dummies: emb.dummy_count(),
        max_bits: emb.table.coordinate_bits().max,
        coordinates,
    }))
}

/// Poincaré-disk drawing. `d <= 0` picks the buffer width automatically;
/// `layers` is a comma list of edges, circles, buffers, heptagons.
#[wasm_bindgen]
pub fn render(graph: &str, root: usize, d: f64, layers: &str, size: u32) -> Result<String, String> {
    let (g, emb) = load(graph, root)?;
    let params = params(&emb, (d > 0.0).then_some(d))?;
    let (_, frames) = HyperbolicOracle::realize(&emb.table, &params).map_err(message)?;
    let options = RenderOptions { layers: layers.parse()?, disk_size: size, ..Default::default() };
    render_svg(&emb.table, &g, &frames, &options).map_err(message)
}

#[derive(Serialize)]
struct Verdict {
    summary: String,
    greedy: bool,
    dead_ends: Vec<(usize, usize)>,
    max_hops: usize,
    mean_stretch: f64,
}

/// All-pairs greedy check in `"dyadic"` or `"hyperbolic"` space, as JSON.
/// Lists at most 20 `(vertex, destination)` dead ends.
#[wasm_bindgen]
pub fn verify(graph: &str, root: usize, space: &str) -> Result<String, String> {
    let (g, emb) = load(graph, root)?;
    let options = VerifyOptions::default();
    let report = match space {
        "dyadic" => verify_all_pairs(&g, &DyadicOracle::new(&emb.table), &options),
        "hyperbolic" => {
            let (oracle, _) = HyperbolicOracle::realize(&emb.table, &params(&emb, None)?).map_err(message)?;
            verify_all_pairs(&g, &oracle, &options)
        }
        other => return Err(format!("unknown space {other:?}")),
    };
    Ok(to_json(&Verdict {
        summary: report.to_string(),
        greedy: report.is_greedy(),
        dead_ends: report.failures.iter().take(20).map(|&(_, t, v)| (v, t)).collect(),
        max_hops: report.max_hops,
        mean_stretch: report.mean_stretch,
    }))
}

#[derive(Serialize)]
struct Hop {
    vertex: usize,
    distance: String,
}

/// Greedy route trace in dyadic space with exact distances, plus the
/// hyperbolic distances when the graph is small enough.
#[wasm_bindgen]
pub fn trace_route(graph: &str, root: usize, from: usize, to: usize) -> Result<String, String> {
    let (g, emb) = load(graph, root)?;
    let r = route(&g, &DyadicOracle::new(&emb.table), from, to, NextHopPolicy::SmallestId).map_err(message)?;
    let mut hops: Vec<Hop> =
        r.hops.iter().zip(&r.distances).map(|(&vertex, d)| Hop { vertex, distance: d.to_string() }).collect();
    if emb.table.len() <= HYPERBOLIC_LIMIT {
        let params = params(&emb, None)?;
        let (oracle, _) = HyperbolicOracle::realize(&emb.table, &params).map_err(message)?;
        let target = &oracle.points()[to];
        for hop in &mut hops {
            let c = oracle.points()[hop.vertex].product(target, params.precision_bits);
            hop.distance = format!("{}, hyperbolic {:.4}", hop.distance, approx_acosh(&c));
        }
    }
    Ok(to_json(&hops))
}
