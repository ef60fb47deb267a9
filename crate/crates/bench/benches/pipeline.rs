use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use floodroute_bench::{lattice_graph, valley_dem, zigzag};
use floodroute_core::inundation::{connected_inundation, default_seeds, FloodMask};
use floodroute_core::roadnet::{apply_flood_overlay, edge_cells};
use floodroute_core::routing::{shortest_route, RouteRequest};

fn dijkstra(c: &mut Criterion) {
    let mut group = c.benchmark_group("shortest_route");
    for side in [20, 50, 100] {
        let graph = lattice_graph(side);
        let g = floodroute_core::raster::GridGeometry::new(side, side, -79.0, 34.6, 0.001).unwrap();
        let overlay = apply_flood_overlay(&graph, &FloodMask::dry(g));
        let from = graph.nodes()[0].id.clone();
        let to = graph.nodes()[graph.nodes().len() - 1].id.clone();
        let request = RouteRequest::new(from, to);
        group.bench_with_input(BenchmarkId::from_parameter(side * side), &request, |b, req| {
            b.iter(|| shortest_route(black_box(&graph), &overlay, req).unwrap())
        });
    }
    group.finish();
}

fn flood_fill(c: &mut Criterion) {
    let mut group = c.benchmark_group("connected_inundation");
    for side in [64, 256, 512] {
        let dem = valley_dem(side);
        let seeds = default_seeds(&dem, 0.02).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(side * side), &dem, |b, dem| {
            b.iter(|| connected_inundation(black_box(dem), 4.0, &seeds).unwrap())
        });
    }
    group.finish();
}

fn supercover(c: &mut Criterion) {
    let mut group = c.benchmark_group("edge_cells");
    for side in [64, 512] {
        let g = floodroute_core::raster::GridGeometry::new(side, side, -79.0, 34.6, 0.001).unwrap();
        let line = zigzag(side, 8);
        group.bench_with_input(BenchmarkId::from_parameter(side), &line, |b, line| {
            b.iter(|| edge_cells(black_box(line), &g))
        });
    }
    group.finish();
}

criterion_group!(benches, dijkstra, flood_fill, supercover);
criterion_main!(benches);
