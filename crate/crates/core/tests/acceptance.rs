//! One test per acceptance criterion. Each prints a single `PASS`/`FAIL` line
//! before asserting, so `cargo test -- --nocapture` gives a readable summary.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sgh_core::balanced::{build_wbt, make_autocratic, WeightedItem};
use sgh_core::codec::{decode, encode, encode_point};
use sgh_core::decomposition::{classify_edges, EdgeKind};
use sgh_core::dyadic::{tree_distance, DyadicPoint, DyadicRational, TreeAddress};
use sgh_core::embed::{embed, EmbedOptions, EmbeddingTable};
use sgh_core::families;
use sgh_core::graph::{build_spanning_tree, parse_graph, Graph, RootedTree, SpanningStrategy};
use sgh_core::hyperbolic::{hyperbolic_distance, place_frames_for, to_f64, verify_hyperbolic, HyperbolicParams};
use sgh_core::router::{
    route, verify_all_pairs, DistanceOracle, DyadicOracle, ExactDyadicOracle, NextHopPolicy, VerifyOptions,
};

fn report(id: u32, name: &str, pass: bool, detail: &str) {
    println!("criterion {id} [{}] {name}: {detail}", if pass { "PASS" } else { "FAIL" });
}

fn p4() -> Graph {
    parse_graph("4 3\n0 1\n1 2\n2 3\n").unwrap()
}

/// Named graphs of the scalable suite, smallest first within each family.
fn suite() -> Vec<(String, Graph)> {
    let mut out = Vec::new();
    for n in [16, 64, 256, 1024, 4096] {
        out.push((format!("path/{n}"), families::path(n)));
        out.push((format!("star/{n}"), families::star(n)));
        out.push((format!("caterpillar/{n}"), families::caterpillar(n / 4, 3)));
    }
    for h in [3, 5, 7, 9, 11] {
        out.push((format!("binary/{}", (1usize << (h + 1)) - 1), families::complete_binary_tree(h)));
    }
    for n in [16, 64, 256, 1024, 4096] {
        for seed in 0..20 {
            out.push((format!("random-tree/{n}/{seed}"), families::random_tree(n, seed)));
        }
    }
    for n in [64usize, 256, 1024] {
        let p = 2.0 * (n as f64).ln() / n as f64;
        for seed in 0..10 {
            out.push((format!("gnp/{n}/{seed}"), families::gnp_connected(n, p, seed)));
        }
    }
    out
}

fn family(name: &str) -> String {
    let mut parts = name.split('/');
    let kind = parts.next().unwrap();
    let n = parts.next().unwrap();
    format!("{kind}/{n}")
}

fn addr(s: &str) -> TreeAddress {
    s.parse().unwrap()
}

#[test]
fn criterion_1_golden_p4() {
    let g = p4();
    let emb = embed(&g, &EmbedOptions::default()).unwrap();
    let expected = [("", "0"), ("", "100"), ("", "111"), ("111", "111")];
    let table_ok = expected
        .iter()
        .enumerate()
        .all(|(v, (x, y))| emb.table.point(v) == &DyadicPoint::new(addr(x), addr(y)).unwrap());

    let oracle = ExactDyadicOracle::new(&emb.table);
    let r = route(&g, &oracle, 0, 3, NextHopPolicy::SmallestId).unwrap();
    let sixteenths = |k: u32| DyadicRational::new(k.into(), 4);
    let distances_ok = r.distances == vec![sixteenths(59), sixteenths(54), sixteenths(48), DyadicRational::zero()];
    let pass = table_ok && r.hops == vec![0, 1, 2, 3] && distances_ok;
    let shown: Vec<_> = r.distances.iter().map(ToString::to_string).collect();
    report(1, "golden P4", pass, &format!("route {:?}, distances {}", r.hops, shown.join(" -> ")));
    assert!(pass);
}

#[test]
fn criterion_2_dyadic_greedy() {
    let start = Instant::now();
    let mut by_family: BTreeMap<String, (usize, usize, usize)> = BTreeMap::new();
    for (name, g) in suite() {
        let emb = embed(&g, &EmbedOptions::default()).unwrap();
        let report = verify_all_pairs(&g, &DyadicOracle::new(&emb.table), &VerifyOptions::default());
        let entry = by_family.entry(family(&name)).or_default();
        entry.0 += 1;
        entry.1 += report.failures.len();
        entry.2 += usize::from(!report.is_greedy());
    }
    let elapsed = start.elapsed().as_secs_f64();
    let mut total = 0;
    for (fam, (graphs, failures, failing)) in &by_family {
        println!("  {fam:<18} graphs {graphs:>2}  failing graphs {failing:>2}  dead ends {failures}");
        total += failures;
    }
    let pass = total == 0 && elapsed <= 300.0;
    report(2, "dyadic greedy", pass, &format!("{total} dead ends across the suite in {elapsed:.1} s"));
    assert!(pass);
}

#[test]
fn criterion_3_autocratic() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut pairs = 0usize;
    let mut violations = 0usize;
    for _ in 0..1000 {
        let m = rng.gen_range(1..=200);
        let items: Vec<_> = (0..m).map(|i| WeightedItem::new(i, rng.gen_range(1..=1_000_000))).collect();
        let wbt = build_wbt(&items).unwrap();
        let auto = make_autocratic(&wbt);
        let before: BTreeMap<_, _> = wbt.leaves().into_iter().map(|(k, a)| (k, a.len())).collect();
        let leaves = auto.leaves();
        for (k, a) in &leaves {
            let d = before[k];
            if a.len() != (2 * d).saturating_sub(1) {
                violations += 1;
            }
        }
        for (v, av) in &leaves {
            for (w, aw) in &leaves {
                if v != w {
                    pairs += 1;
                    if tree_distance(av, aw) <= aw.len() {
                        violations += 1;
                    }
                }
            }
        }
    }
    let pass = violations == 0;
    report(3, "autocratic property", pass, &format!("{pairs} leaf pairs, {violations} violations"));
    assert!(pass);
}

#[test]
fn criterion_4_succinctness() {
    let mut maxima = Vec::new();
    let mut within_bound = true;
    for k in 4..=12u32 {
        let n = 1usize << k;
        let mut worst = 0;
        for seed in 0..5 {
            let g = families::random_tree(n, seed);
            let emb = embed(&g, &EmbedOptions::default()).unwrap();
            worst = worst.max(emb.table.coordinate_bits().max);
        }
        within_bound &= worst as f64 <= 32.0 * k as f64 + 64.0;
        maxima.push(worst);
    }
    let steps: Vec<i64> = maxima.windows(2).map(|w| w[1] as i64 - w[0] as i64).collect();
    let max_step = steps.iter().copied().max().unwrap();
    let pass = within_bound && max_step <= 40;
    report(4, "succinctness", pass, &format!("max bits for n = 2^4..2^12: {maxima:?}, largest doubling step {max_step}"));
    assert!(pass);
}

#[test]
fn criterion_5_hyperbolic_desk_scale() {
    let mut graphs: Vec<(String, Graph)> =
        suite().into_iter().filter(|(_, g)| g.vertex_count() <= 48).collect();
    graphs.push(("p4".into(), p4()));
    for n in [2, 3, 4, 8, 24, 48] {
        graphs.push((format!("star/{n}"), families::star(n)));
    }
    for h in 0..=4 {
        graphs.push((format!("binary/h{h}"), families::complete_binary_tree(h)));
    }
    for n in [32, 48] {
        for seed in 0..5 {
            graphs.push((format!("random-tree/{n}/{seed}"), families::random_tree(n, seed)));
        }
        let p = 2.0 * (n as f64).ln() / n as f64;
        graphs.push((format!("gnp/{n}"), families::gnp_connected(n, p, 1)));
    }
    let mut failures = 0;
    for (name, g) in &graphs {
        let emb = embed(g, &EmbedOptions::default()).unwrap();
        let params = HyperbolicParams::for_table(&emb.table);
        let r = verify_hyperbolic(&emb.table, g, &params, &VerifyOptions::default()).unwrap();
        if !r.is_greedy() {
            println!("  {name}: {r}");
        }
        failures += r.failures.len();
    }
    let pass = failures == 0;
    report(5, "hyperbolic realization", pass, &format!("{} graphs, {failures} failures", graphs.len()));
    assert!(pass);
}

#[test]
fn criterion_6_distance_sandwich() {
    let mut nodes = vec![TreeAddress::root()];
    for depth in 1..=4 {
        let prev: Vec<_> = nodes.iter().filter(|a| a.len() == depth - 1).cloned().collect();
        for a in prev {
            nodes.push(a.child(false));
            nodes.push(a.child(true));
        }
    }
    let params = HyperbolicParams::new(4, None, None).unwrap();
    let frames = place_frames_for(nodes.iter(), &params).unwrap();
    let p = params.precision_bits;
    let (d, l) = (params.d, params.edge_length());
    let tol = 2f64.powi(-32);
    let mut checked = 0;
    let mut worst_slack = f64::INFINITY;
    for (i, a) in nodes.iter().enumerate() {
        for b in &nodes[i + 1..] {
            let k = tree_distance(a, b);
            if k > 6 {
                continue;
            }
            let pa = frames.get(a).unwrap().position();
            let pb = frames.get(b).unwrap().position();
            let dh = to_f64(&hyperbolic_distance(&pa, &pb, p).unwrap());
            let k = k as f64;
            worst_slack = worst_slack.min(dh - d * k + tol).min(l * k + tol - dh);
            checked += 1;
        }
    }
    let pass = worst_slack >= 0.0;
    report(6, "distance sandwich", pass, &format!("{checked} node pairs, D = {d}, smallest slack {worst_slack:.3e}"));
    assert!(pass);
}

fn random_table(rng: &mut ChaCha8Rng) -> EmbeddingTable {
    let n = rng.gen_range(0..64);
    let points = (0..n)
        .map(|_| {
            let len = rng.gen_range(0..300);
            let y = TreeAddress::from_bits((0..len).map(|_| rng.gen::<bool>()));
            DyadicPoint::new(y.prefix(rng.gen_range(0..=len)), y).unwrap()
        })
        .collect();
    EmbeddingTable::new(points)
}

#[test]
fn criterion_7_codec() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut mismatches = 0;
    for _ in 0..1000 {
        let t = random_table(&mut rng);
        if decode(&encode(&t).unwrap()).as_ref() != Ok(&t) {
            mismatches += 1;
        }
    }
    let emb = embed(&p4(), &EmbedOptions::default()).unwrap();
    let mut record = Vec::new();
    encode_point(1, emb.table.point(1), &mut record).unwrap();
    let pass = mismatches == 0 && record == [0x00, 0x00, 0x03, 0x00, 0x80];
    report(7, "codec", pass, &format!("1000 round trips, {mismatches} mismatches, P4 vertex 1 record {record:02x?}"));
    assert!(pass);
}

/// Most light edges on any root-to-leaf path.
fn max_light_edges(t: &RootedTree, kinds: &[Option<EdgeKind>]) -> usize {
    let mut count = vec![0usize; t.len()];
    let mut best = 0;
    for v in t.preorder() {
        if let Some(w) = t.parent(v) {
            count[v] = count[w] + usize::from(kinds[v] == Some(EdgeKind::Light));
        }
        best = best.max(count[v]);
    }
    best
}

#[test]
fn criterion_8_heavy_path_invariants() {
    let mut graphs = 0;
    let mut violations = 0;
    for (_, g) in suite() {
        // labels come from the spanning tree before dummy leaves are added
        let real = build_spanning_tree(&g, 0, SpanningStrategy::default()).unwrap();
        let kinds = classify_edges(&real);
        for v in 0..real.len() {
            if kinds[v] == Some(EdgeKind::Light) && real.subtree_size(real.parent(v).unwrap()) < 2 * real.subtree_size(v) {
                violations += 1;
            }
        }
        let bound = real.len().ilog2() as usize + 1;
        if max_light_edges(&real, &kinds) > bound {
            violations += 1;
        }
        graphs += 1;
    }
    let pass = violations == 0;
    report(8, "heavy-path invariants", pass, &format!("{graphs} graphs, {violations} violations"));
    assert!(pass);
}

#[test]
fn oracles_agree_on_the_suite_sample() {
    for (_, g) in suite().into_iter().filter(|(_, g)| g.vertex_count() <= 64) {
        let emb = embed(&g, &EmbedOptions::default()).unwrap();
        let fast = DyadicOracle::new(&emb.table);
        let exact = ExactDyadicOracle::new(&emb.table);
        for v in 0..g.vertex_count() {
            for t in 0..g.vertex_count() {
                assert_eq!(fast.distance(v, t).to_rational(), exact.distance(v, t));
            }
        }
    }
}
