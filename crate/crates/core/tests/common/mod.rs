#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use floodroute_core::inundation::FloodMask;
use floodroute_core::raster::{CellIndex, GridGeometry, RasterGrid};
use floodroute_core::roadnet::{Edge, HazardOverlay, Node, RoadGraph};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const NODATA: f64 = -9999.0;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn unit_geometry(cols: usize, rows: usize) -> GridGeometry {
    GridGeometry::new(cols, rows, 0.0, 0.0, 1.0).unwrap()
}

pub fn random_geometry(rng: &mut impl Rng, cols: usize, rows: usize) -> GridGeometry {
    let x = rng.gen_range(-80.0..-78.0);
    let y = rng.gen_range(34.0..35.0);
    let size = [0.001, 0.0005, 0.25, 1.0][rng.gen_range(0..4)];
    GridGeometry::new(cols, rows, x, y, size).unwrap()
}

/// Elevations in [0, 10) with roughly `nodata_share` nodata cells.
pub fn random_dem(rng: &mut impl Rng, geometry: GridGeometry, nodata_share: f64) -> RasterGrid {
    let values = (0..geometry.cell_count())
        .map(|_| {
            if rng.gen_bool(nodata_share) {
                NODATA
            } else {
                // quarter-metre steps make ties and exact level hits common
                (rng.gen_range(0..40) as f64) * 0.25
            }
        })
        .collect();
    RasterGrid::new(geometry, values, NODATA).unwrap()
}

pub fn random_mask(rng: &mut impl Rng, geometry: GridGeometry, p: f64) -> FloodMask {
    FloodMask::new(geometry, (0..geometry.cell_count()).map(|_| rng.gen_bool(p)).collect()).unwrap()
}

pub fn cell(col: usize, row: usize) -> CellIndex {
    CellIndex::new(col, row)
}

/// Random connected graph on `n` nodes inside the unit-cell frame
/// `[0, span) x [0, span)`: a random spanning tree plus `extra` edges,
/// some of them parallel. With `integer_weights`, lengths are whole
/// meters and strengths 1; otherwise both are arbitrary positive floats.
pub fn random_graph(rng: &mut impl Rng, n: usize, extra: usize, span: f64, integer_weights: bool) -> RoadGraph {
    let mut ids: Vec<String> = (0..n).map(|i| format!("n{i:02}")).collect();
    ids.shuffle(rng);
    let nodes: Vec<Node> = ids
        .iter()
        .map(|id| Node::new(id.clone(), rng.gen_range(0.0..span), rng.gen_range(0.0..span)))
        .collect();
    let mut pairs = Vec::new();
    for i in 1..n {
        pairs.push((rng.gen_range(0..i), i));
    }
    for _ in 0..extra {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        if a != b {
            pairs.push((a, b));
        }
    }
    let edges = pairs
        .into_iter()
        .enumerate()
        .map(|(k, (a, b))| {
            let (from, to) = (&nodes[a], &nodes[b]);
            let mut polyline = vec![from.position()];
            if rng.gen_bool(0.5) {
                polyline.push([rng.gen_range(0.0..span), rng.gen_range(0.0..span)]);
            }
            polyline.push(to.position());
            let (length_m, strength) = if integer_weights {
                (rng.gen_range(1..20) as f64, 1.0)
            } else {
                (rng.gen_range(0.5..50.0), rng.gen_range(0.5..3.0))
            };
            Edge {
                id: format!("e{k:03}"),
                from: from.id.clone(),
                to: to.id.clone(),
                polyline,
                length_m,
                strength,
                name: None,
            }
        })
        .collect();
    RoadGraph::new(nodes, edges).unwrap()
}

pub fn overlay_blocking(graph: &RoadGraph, blocked: &BTreeSet<String>) -> HazardOverlay {
    HazardOverlay {
        blocked: graph
            .edges()
            .iter()
            .map(|e| (e.id.clone(), blocked.contains(&e.id)))
            .collect::<BTreeMap<_, _>>(),
        source_mask_geometry: unit_geometry(1, 1),
    }
}

/// Minimum path-order cost over every simple path, by exhaustive DFS.
pub fn brute_force_min_cost(graph: &RoadGraph, from: &str, to: &str, usable: &dyn Fn(&Edge) -> bool) -> Option<f64> {
    fn dfs(
        graph: &RoadGraph,
        at: &str,
        to: &str,
        cost: f64,
        visited: &mut BTreeSet<String>,
        usable: &dyn Fn(&Edge) -> bool,
        best: &mut Option<f64>,
    ) {
        if at == to {
            *best = Some(best.map_or(cost, |b| b.min(cost)));
            return;
        }
        for e in graph.edges() {
            if !usable(e) {
                continue;
            }
            let next = if e.from == at {
                &e.to
            } else if e.to == at {
                &e.from
            } else {
                continue;
            };
            if visited.contains(next) {
                continue;
            }
            visited.insert(next.clone());
            dfs(graph, next, to, cost + e.length_m * e.strength, visited, usable, best);
            visited.remove(next);
        }
    }
    let mut best = None;
    let mut visited = BTreeSet::from([from.to_string()]);
    dfs(graph, from, to, 0.0, &mut visited, usable, &mut best);
    best
}

/// Exact test of a segment against a closed axis-aligned rectangle
/// (Liang–Barsky clipping).
pub fn segment_touches_rect(p: [f64; 2], q: [f64; 2], rect: [f64; 4]) -> bool {
    let (mut t0, mut t1) = (0.0f64, 1.0f64);
    let d = [q[0] - p[0], q[1] - p[1]];
    let checks = [
        (-d[0], p[0] - rect[0]),
        (d[0], rect[2] - p[0]),
        (-d[1], p[1] - rect[1]),
        (d[1], rect[3] - p[1]),
    ];
    for (pk, qk) in checks {
        if pk == 0.0 {
            if qk < 0.0 {
                return false;
            }
        } else {
            let r = qk / pk;
            if pk < 0.0 {
                t0 = t0.max(r);
            } else {
                t1 = t1.min(r);
            }
            if t0 > t1 {
                return false;
            }
        }
    }
    true
}

/// Distance from a point to a closed rectangle.
pub fn point_rect_distance(p: [f64; 2], rect: [f64; 4]) -> f64 {
    let dx = (rect[0] - p[0]).max(0.0).max(p[0] - rect[2]);
    let dy = (rect[1] - p[1]).max(0.0).max(p[1] - rect[3]);
    dx.hypot(dy)
}

/// Brute-force supercover: scan every cell footprint.
pub fn brute_force_cells(polyline: &[[f64; 2]], g: &GridGeometry) -> BTreeSet<CellIndex> {
    g.cells()
        .filter(|c| {
            let rect = g.footprint(*c);
            polyline.windows(2).any(|w| segment_touches_rect(w[0], w[1], rect))
        })
        .collect()
}

/// Random graph stretched over the extent of `g`, with haversine lengths.
pub fn graph_on(r: &mut impl Rng, g: &GridGeometry, n: usize) -> RoadGraph {
    let base = random_graph(r, n, n, 1.0, false);
    let [x0, y0, x1, y1] = g.extent();
    let map = |p: [f64; 2]| [x0 + p[0] * (x1 - x0), y0 + p[1] * (y1 - y0)];
    let nodes = base.nodes().iter().map(|n| Node::new(n.id.clone(), map(n.position())[0], map(n.position())[1])).collect();
    let edges = base
        .edges()
        .iter()
        .map(|e| {
            let polyline = e.polyline.iter().map(|p| map(*p)).collect();
            Edge::new(e.id.clone(), e.from.clone(), e.to.clone(), polyline, e.strength, None).unwrap()
        })
        .collect();
    RoadGraph::new(nodes, edges).unwrap()
}
