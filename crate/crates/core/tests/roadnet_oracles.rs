mod common;

use std::collections::BTreeSet;

use common::*;
use floodroute_core::geo::haversine_m;
use floodroute_core::raster::{world_to_cell, CellIndex, GridGeometry};
use floodroute_core::roadnet::*;
use proptest::prelude::*;
use rand::Rng;
use serde_json::{json, Value};

fn random_polyline(r: &mut impl Rng, g: &GridGeometry, margin: f64) -> Vec<[f64; 2]> {
    let [x0, y0, x1, y1] = g.extent();
    let (w, h) = (x1 - x0, y1 - y0);
    (0..r.gen_range(2..5))
        .map(|_| {
            [
                r.gen_range(x0 - margin * w..x1 + margin * w),
                r.gen_range(y0 - margin * h..y1 + margin * h),
            ]
        })
        .collect()
}

fn point_segment_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let d = [b[0] - a[0], b[1] - a[1]];
    let len2 = d[0] * d[0] + d[1] * d[1];
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / len2).clamp(0.0, 1.0)
    };
    (p[0] - (a[0] + t * d[0])).hypot(p[1] - (a[1] + t * d[1]))
}

fn rect_segment_distance(rect: [f64; 4], a: [f64; 2], b: [f64; 2]) -> f64 {
    if segment_touches_rect(a, b, rect) {
        return 0.0;
    }
    let corners = [[rect[0], rect[1]], [rect[2], rect[1]], [rect[0], rect[3]], [rect[2], rect[3]]];
    corners
        .iter()
        .map(|c| point_segment_distance(*c, a, b))
        .chain([point_rect_distance(a, rect), point_rect_distance(b, rect)])
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn supercover_contains_dense_samples_and_nothing_far() {
    let mut r = rng(41);
    for _ in 0..30 {
        let g = random_geometry(&mut r, 32, 32);
        let line = random_polyline(&mut r, &g, 0.2);
        let cells = edge_cells(&line, &g);
        for w in line.windows(2) {
            for i in 0..10_000 {
                let t = i as f64 / 9_999.0;
                let p = [w[0][0] + t * (w[1][0] - w[0][0]), w[0][1] + t * (w[1][1] - w[0][1])];
                if let Some(c) = world_to_cell(&g, p[0], p[1]) {
                    assert!(cells.contains(&c), "sample {p:?} in {c:?} missing");
                }
            }
        }
        for c in &cells {
            let rect = g.footprint(*c);
            let d = line
                .windows(2)
                .map(|w| rect_segment_distance(rect, w[0], w[1]))
                .fold(f64::INFINITY, f64::min);
            assert!(d <= g.cell_size(), "{c:?} is {d} from the polyline");
        }
    }
}

#[test]
fn supercover_equals_exact_footprint_scan() {
    let mut r = rng(42);
    for _ in 0..60 {
        let g = random_geometry(&mut r, 24, 24);
        let line = random_polyline(&mut r, &g, 0.3);
        let exact = brute_force_cells(&line, &g);
        let got = edge_cells(&line, &g);
        assert!(exact.is_subset_of(&got));
        // anything extra only grazes within rounding slack
        for c in got.difference(&exact) {
            let rect = g.footprint(*c);
            let d = line
                .windows(2)
                .map(|w| rect_segment_distance(rect, w[0], w[1]))
                .fold(f64::INFINITY, f64::min);
            assert!(d < 1e-6 * g.cell_size(), "{c:?} at {d}");
        }
    }
}

trait SubsetOf {
    fn is_subset_of(&self, other: &Self) -> bool;
}

impl SubsetOf for BTreeSet<CellIndex> {
    fn is_subset_of(&self, other: &Self) -> bool {
        self.is_subset(other)
    }
}

#[test]
fn overlay_matches_composed_oracle() {
    let mut r = rng(43);
    for _ in 0..40 {
        let g = random_geometry(&mut r, 20, 20);
        let graph = graph_on(&mut r, &g, 10);
        let mask = random_mask(&mut r, g, 0.05);
        let overlay = apply_flood_overlay(&graph, &mask);
        assert_eq!(overlay.blocked.len(), graph.edges().len());
        assert_eq!(overlay.source_mask_geometry, g);
        for e in graph.edges() {
            let expected = brute_force_cells(&e.polyline, &g).into_iter().any(|c| mask.is_flooded(c));
            assert_eq!(overlay.blocked[&e.id], expected, "edge {}", e.id);
        }
    }
}

#[test]
fn nearest_node_matches_linear_scan() {
    let mut r = rng(44);
    for _ in 0..50 {
        let g = random_geometry(&mut r, 10, 10);
        let n = r.gen_range(1..12);
        let graph = graph_on(&mut r, &g, n);
        let [x0, y0, x1, y1] = g.extent();
        for _ in 0..20 {
            let (lon, lat) = (r.gen_range(x0..x1), r.gen_range(y0..y1));
            let radius = r.gen_range(1.0..5000.0);
            let expected = graph
                .nodes()
                .iter()
                .map(|n| (haversine_m([lon, lat], n.position()), n.id.clone()))
                .filter(|(d, _)| *d <= radius)
                .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)))
                .map(|(_, id)| id);
            assert_eq!(nearest_node(&graph, lon, lat, radius).map(str::to_string), expected);
        }
    }
}

#[test]
fn snapping_ties_ignore_node_order() {
    // two nodes mirrored around the query point
    let build = |order: &[usize]| {
        let all = [Node::new("b", 0.001, 0.0), Node::new("a", -0.001, 0.0), Node::new("c", 0.0, 0.5)];
        RoadGraph::new(order.iter().map(|i| all[*i].clone()).collect(), vec![]).unwrap()
    };
    for order in [[0, 1, 2], [1, 0, 2], [2, 1, 0]] {
        assert_eq!(nearest_node(&build(&order), 0.0, 0.0, 500.0), Some("a"));
    }
}

fn union_find_components(graph: &RoadGraph) -> usize {
    let ids: Vec<&str> = graph.nodes().iter().map(|n| n.id.as_str()).collect();
    let index = |id: &str| ids.iter().position(|x| *x == id).unwrap();
    let mut parent: Vec<usize> = (0..ids.len()).collect();
    fn find(p: &mut Vec<usize>, x: usize) -> usize {
        if p[x] != x {
            let root = find(p, p[x]);
            p[x] = root;
        }
        p[x]
    }
    for e in graph.edges() {
        let (a, b) = (find(&mut parent, index(&e.from)), find(&mut parent, index(&e.to)));
        parent[a] = b;
    }
    (0..ids.len()).filter(|i| find(&mut parent, *i) == *i).count()
}

#[test]
fn component_count_matches_union_find() {
    let mut r = rng(45);
    for _ in 0..50 {
        let n = r.gen_range(1..15);
        let full = random_graph(&mut r, n, 3, 1.0, true);
        // drop a random subset of edges to split components
        let kept: Vec<Edge> = full.edges().iter().filter(|_| r.gen_bool(0.6)).cloned().collect();
        let graph = RoadGraph::new(full.nodes().to_vec(), kept).unwrap();
        let report = validate_graph(&graph);
        assert_eq!(report.component_count, union_find_components(&graph));
        assert_eq!(report.components.iter().map(Vec::len).sum::<usize>(), n);
        for id in &report.isolated_nodes {
            assert!(graph.edges().iter().all(|e| &e.from != id && &e.to != id));
        }
    }
}

#[test]
fn sub_millimetre_edges_are_reported() {
    let text = r#"{"nodes":[{"id":"a","lon":0,"lat":0},{"id":"b","lon":0.000000001,"lat":0}],
        "edges":[{"id":"tiny","from":"a","to":"b","polyline":[[0,0],[0.000000001,0]]}]}"#;
    let g = load_roadnet(text.as_bytes()).unwrap();
    assert_eq!(validate_graph(&g).zero_length_edges, vec!["tiny".to_string()]);
}

type Mutation = Box<dyn Fn(&mut Value)>;

/// Random valid road network JSON.
fn random_roadnet_json(r: &mut impl Rng) -> Value {
    let n = r.gen_range(2..8);
    let nodes: Vec<Value> = (0..n)
        .map(|i| json!({"id": format!("n{i}"), "lon": -79.0 + r.gen_range(0.0..0.05), "lat": 34.6 + r.gen_range(0.0..0.05)}))
        .collect();
    let edges: Vec<Value> = (1..n)
        .map(|i| {
            let j = r.gen_range(0..i);
            let (a, b) = (&nodes[j], &nodes[i]);
            let mid = [-79.0 + r.gen_range(0.0..0.05), 34.6 + r.gen_range(0.0..0.05)];
            json!({
                "id": format!("e{i}"),
                "from": a["id"],
                "to": b["id"],
                "polyline": [[a["lon"], a["lat"]], mid, [b["lon"], b["lat"]]],
                "strength": r.gen_range(0.5..3.0),
            })
        })
        .collect();
    json!({"nodes": nodes, "edges": edges, "pois": [{"id": "p1", "kind": "lodging", "lon": -79.0, "lat": 34.6, "name": "Inn"}]})
}

#[test]
fn generated_networks_load_and_single_mutations_fail() {
    let mut r = rng(46);
    for _ in 0..40 {
        let valid = random_roadnet_json(&mut r);
        let (graph, pois) = load_roadnet_with_pois(valid.to_string().as_bytes()).unwrap();
        assert_eq!(graph.edges().len(), valid["edges"].as_array().unwrap().len());
        assert_eq!(pois.len(), 1);
        for e in graph.edges() {
            assert!((e.length_m - edge_length(&e.polyline).unwrap()).abs() == 0.0);
        }

        let k = r.gen_range(0..valid["edges"].as_array().unwrap().len());
        let mutations: Vec<(&str, Mutation)> = vec![
            ("dangling", Box::new(move |v: &mut Value| v["edges"][k]["to"] = json!("n999"))),
            ("short polyline", Box::new(move |v: &mut Value| {
                let first = v["edges"][k]["polyline"][0].clone();
                v["edges"][k]["polyline"] = json!([first]);
            })),
            ("zero strength", Box::new(move |v: &mut Value| v["edges"][k]["strength"] = json!(0.0))),
            ("negative strength", Box::new(move |v: &mut Value| v["edges"][k]["strength"] = json!(-1.5))),
            ("duplicate edge", Box::new(move |v: &mut Value| {
                let copy = v["edges"][k].clone();
                v["edges"].as_array_mut().unwrap().push(copy);
            })),
            ("duplicate node", Box::new(|v: &mut Value| {
                let copy = v["nodes"][0].clone();
                v["nodes"].as_array_mut().unwrap().push(copy);
            })),
            ("moved endpoint", Box::new(move |v: &mut Value| v["edges"][k]["polyline"][0][0] = json!(10.0))),
            ("zero length", Box::new(move |v: &mut Value| {
                let from = v["edges"][k]["from"].clone();
                let p = v["nodes"].as_array().unwrap().iter().find(|n| n["id"] == from).unwrap().clone();
                v["edges"][k]["to"] = from;
                v["edges"][k]["polyline"] = json!([[p["lon"], p["lat"]], [p["lon"], p["lat"]]]);
            })),
            ("duplicate poi", Box::new(|v: &mut Value| {
                let copy = v["pois"][0].clone();
                v["pois"].as_array_mut().unwrap().push(copy);
            })),
            ("bad poi kind", Box::new(|v: &mut Value| v["pois"][0]["kind"] = json!("castle"))),
            ("missing id", Box::new(move |v: &mut Value| {
                v["edges"][k].as_object_mut().unwrap().remove("id");
            })),
        ];
        for (what, mutate) in mutations {
            let mut bad = valid.clone();
            mutate(&mut bad);
            assert!(
                load_roadnet_with_pois(bad.to_string().as_bytes()).is_err(),
                "mutation {what} was accepted"
            );
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn larger_masks_block_more(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = random_geometry(&mut r, 16, 16);
        let graph = graph_on(&mut r, &g, 8);
        let small = random_mask(&mut r, g, 0.05);
        let extra = random_mask(&mut r, g, 0.05);
        let large = floodroute_core::inundation::fuse_masks(&small, &extra).unwrap();
        let b1 = apply_flood_overlay(&graph, &small);
        let b2 = apply_flood_overlay(&graph, &large);
        for id in b1.blocked_edges() {
            prop_assert!(b2.is_blocked(id));
        }
    }

    #[test]
    fn reversal_keeps_cells(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = random_geometry(&mut r, 16, 16);
        let line = random_polyline(&mut r, &g, 0.3);
        let mut rev = line.clone();
        rev.reverse();
        prop_assert_eq!(edge_cells(&line, &g), edge_cells(&rev, &g));
    }
}
