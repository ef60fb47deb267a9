//! Deterministic workloads shared by the benchmarks.

use floodroute_core::raster::{GridGeometry, RasterGrid};
use floodroute_core::roadnet::{Edge, Node};
use floodroute_core::RoadGraph;

/// `side x side` street lattice with 0.001 degree spacing. Strengths vary
/// with a fixed pattern so equal-cost ties are rare.
pub fn lattice_graph(side: usize) -> RoadGraph {
    let id = |c: usize, r: usize| format!("n{r:04}_{c:04}");
    let pos = |c: usize, r: usize| [-79.0 + c as f64 * 0.001, 34.6 + r as f64 * 0.001];
    let mut nodes = Vec::with_capacity(side * side);
    let mut edges = Vec::new();
    for r in 0..side {
        for c in 0..side {
            let [lon, lat] = pos(c, r);
            nodes.push(Node::new(id(c, r), lon, lat));
            let mut link = |c2: usize, r2: usize| {
                let strength = 1.0 + ((c * 7 + r * 13 + c2 + r2) % 5) as f64 * 0.25;
                let e = Edge::new(
                    format!("e_{}_{}", id(c, r), id(c2, r2)),
                    id(c, r),
                    id(c2, r2),
                    vec![pos(c, r), pos(c2, r2)],
                    strength,
                    None,
                )
                .expect("lattice edges are valid");
                edges.push(e);
            };
            if c + 1 < side {
                link(c + 1, r);
            }
            if r + 1 < side {
                link(c, r + 1);
            }
        }
    }
    RoadGraph::new(nodes, edges).expect("lattice is valid")
}

/// Bumpy valley DEM: a river down the middle column plus a ripple.
pub fn valley_dem(side: usize) -> RasterGrid {
    let g = GridGeometry::new(side, side, -79.0, 34.6, 0.001).expect("valid geometry");
    let mid = side as f64 / 2.0;
    let values = g
        .cells()
        .map(|c| {
            let x = c.col as f64;
            let y = c.row as f64;
            0.5 + 0.2 * (x - mid).abs() + 1.5 * ((x * 0.3).sin() * (y * 0.2).cos())
        })
        .collect();
    RasterGrid::new(g, values, -9999.0).expect("values fill the grid")
}

/// A zig-zag polyline crossing a `side`-cell grid diagonally `turns` times.
pub fn zigzag(side: usize, turns: usize) -> Vec<[f64; 2]> {
    let span = side as f64 * 0.001;
    (0..=turns)
        .map(|i| {
            let t = i as f64 / turns as f64;
            let y = if i % 2 == 0 { 0.05 } else { 0.95 };
            [-79.0 + span * (0.02 + 0.96 * t), 34.6 + span * y]
        })
        .collect()
}
