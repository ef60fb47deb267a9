//! Shortest evacuation routes over the passable part of a road graph.
//!
//! Edge cost is `length_m * strength`. An edge is passable unless the
//! hazard overlay blocks it or the request closes it explicitly.

use std::cmp::Ordering;
use std::collections::{BTreeSet, BinaryHeap};

use serde_json::{json, Value};
use thiserror::Error;

use crate::roadnet::{HazardOverlay, RoadGraph};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RoutingError {
    #[error("unknown node {0:?}")]
    UnknownNode(String),
    #[error("unknown edge {0:?}")]
    UnknownEdge(String),
    #[error("invalid route GeoJSON: {0}")]
    GeoJson(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Route {
    /// Visited nodes, origin first. Never empty.
    pub node_ids: Vec<String>,
    /// `edge_ids[i]` joins `node_ids[i]` and `node_ids[i + 1]`.
    pub edge_ids: Vec<String>,
    pub total_cost: f64,
    pub total_length_m: f64,
}

impl Route {
    pub fn origin(&self) -> &str {
        &self.node_ids[0]
    }

    pub fn destination(&self) -> &str {
        &self.node_ids[self.node_ids.len() - 1]
    }

    /// `{"node_ids", "edge_ids", "total_cost", "total_length_m"}`.
    pub fn summary(&self) -> Value {
        json!({
            "node_ids": self.node_ids,
            "edge_ids": self.edge_ids,
            "total_cost": self.total_cost,
            "total_length_m": self.total_length_m,
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RouteRequest {
    pub origin: String,
    pub destination: String,
    /// Operator closures on top of the overlay.
    pub closed_edges: BTreeSet<String>,
}

impl RouteRequest {
    pub fn new(origin: impl Into<String>, destination: impl Into<String>) -> Self {
        Self {
            origin: origin.into(),
            destination: destination.into(),
            closed_edges: BTreeSet::new(),
        }
    }

    pub fn closing<I, S>(mut self, edges: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.closed_edges.extend(edges.into_iter().map(Into::into));
        self
    }
}

#[derive(Debug, Clone, Copy)]
struct Frontier {
    cost: f64,
    node: usize,
}

impl PartialEq for Frontier {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Frontier {}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Frontier {
    // reversed: BinaryHeap pops the cheapest entry, then the smallest node index
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.node.cmp(&self.node))
    }
}

/// Dijkstra from `request.origin` to `request.destination`.
///
/// Returns `Ok(None)` when the destination cannot be reached. Among
/// equal-cost frontier entries the node with the smaller id is settled
/// first, and a tentative distance is only replaced by a strictly smaller
/// one, so results are reproducible.
pub fn shortest_route(
    graph: &RoadGraph,
    overlay: &HazardOverlay,
    request: &RouteRequest,
) -> Result<Option<Route>, RoutingError> {
    let origin = graph
        .node_idx(&request.origin)
        .ok_or_else(|| RoutingError::UnknownNode(request.origin.clone()))?;
    let target = graph
        .node_idx(&request.destination)
        .ok_or_else(|| RoutingError::UnknownNode(request.destination.clone()))?;
    let mut passable = vec![true; graph.edges().len()];
    for id in &request.closed_edges {
        let i = graph.edge_idx(id).ok_or_else(|| RoutingError::UnknownEdge(id.clone()))?;
        passable[i] = false;
    }
    for id in overlay.blocked_edges() {
        if let Some(i) = graph.edge_idx(id) {
            passable[i] = false;
        }
    }

    let n = graph.nodes().len();
    let mut dist = vec![f64::INFINITY; n];
    let mut pred: Vec<Option<(usize, usize)>> = vec![None; n];
    let mut settled = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[origin] = 0.0;
    heap.push(Frontier { cost: 0.0, node: origin });

    while let Some(Frontier { cost, node }) = heap.pop() {
        if settled[node] {
            continue;
        }
        settled[node] = true;
        if node == target {
            break;
        }
        for &(edge, next) in graph.incident(node) {
            if !passable[edge] || settled[next] {
                continue;
            }
            let candidate = cost + graph.edges()[edge].cost();
            if candidate < dist[next] {
                dist[next] = candidate;
                pred[next] = Some((edge, node));
                heap.push(Frontier {
                    cost: candidate,
                    node: next,
                });
            }
        }
    }
    if !settled[target] {
        return Ok(None);
    }

    let mut nodes = vec![target];
    let mut edges = Vec::new();
    let mut at = target;
    while let Some((edge, prev)) = pred[at] {
        edges.push(edge);
        nodes.push(prev);
        at = prev;
    }
    nodes.reverse();
    edges.reverse();
    Ok(Some(build_route(graph, &nodes, &edges)))
}

fn build_route(graph: &RoadGraph, nodes: &[usize], edges: &[usize]) -> Route {
    let (mut total_cost, mut total_length_m) = (0.0, 0.0);
    for e in edges {
        let edge = &graph.edges()[*e];
        total_cost += edge.cost();
        total_length_m += edge.length_m;
    }
    Route {
        node_ids: nodes.iter().map(|i| graph.nodes()[*i].id.clone()).collect(),
        edge_ids: edges.iter().map(|i| graph.edges()[*i].id.clone()).collect(),
        total_cost,
        total_length_m,
    }
}

/// Recomputes `primary` after closing `newly_closed`. When none of the
/// closures touch the primary route it is returned unchanged.
pub fn backup_route(
    graph: &RoadGraph,
    overlay: &HazardOverlay,
    request: &RouteRequest,
    primary: &Route,
    newly_closed: &BTreeSet<String>,
) -> Result<Option<Route>, RoutingError> {
    if let Some(unknown) = newly_closed.iter().find(|id| graph.edge(id).is_none()) {
        return Err(RoutingError::UnknownEdge(unknown.clone()));
    }
    if !primary.edge_ids.iter().any(|e| newly_closed.contains(e)) {
        return Ok(Some(primary.clone()));
    }
    let request = RouteRequest {
        origin: primary.origin().to_string(),
        destination: primary.destination().to_string(),
        closed_edges: request.closed_edges.union(newly_closed).cloned().collect(),
    };
    shortest_route(graph, overlay, &request)
}

const SUMMARY_KIND: &str = "route_summary";

/// GeoJSON FeatureCollection: one LineString per edge with its stored
/// polyline, then a geometry-less summary feature.
pub fn route_geojson(route: &Route, graph: &RoadGraph) -> Result<Value, RoutingError> {
    let mut features = Vec::with_capacity(route.edge_ids.len() + 1);
    for id in &route.edge_ids {
        let edge = graph.edge(id).ok_or_else(|| RoutingError::UnknownEdge(id.clone()))?;
        features.push(json!({
            "type": "Feature",
            "geometry": {"type": "LineString", "coordinates": edge.polyline},
            "properties": {"edge_id": edge.id, "length_m": edge.length_m},
        }));
    }
    let mut summary = route.summary();
    summary["kind"] = json!(SUMMARY_KIND);
    features.push(json!({"type": "Feature", "geometry": null, "properties": summary}));
    Ok(json!({"type": "FeatureCollection", "features": features}))
}

/// [`route_geojson`] as newline-terminated compact JSON.
pub fn route_to_geojson(route: &Route, graph: &RoadGraph) -> Result<String, RoutingError> {
    Ok(crate::to_canonical_json(&route_geojson(route, graph)?))
}

/// Reads a route back from the summary feature of [`route_to_geojson`] output.
pub fn parse_route_geojson(text: &str) -> Result<Route, RoutingError> {
    let bad = |m: &str| RoutingError::GeoJson(m.to_string());
    let value: Value = serde_json::from_str(text).map_err(|e| RoutingError::GeoJson(e.to_string()))?;
    if value["type"] != "FeatureCollection" {
        return Err(bad("not a FeatureCollection"));
    }
    let features = value["features"].as_array().ok_or_else(|| bad("missing features"))?;
    let summary = features
        .iter()
        .find(|f| f["properties"]["kind"] == SUMMARY_KIND)
        .ok_or_else(|| bad("missing route summary feature"))?;
    let props = &summary["properties"];
    let ids = |key: &str| -> Result<Vec<String>, RoutingError> {
        props[key]
            .as_array()
            .ok_or_else(|| bad(key))?
            .iter()
            .map(|v| v.as_str().map(str::to_string).ok_or_else(|| bad(key)))
            .collect()
    };
    let route = Route {
        node_ids: ids("node_ids")?,
        edge_ids: ids("edge_ids")?,
        total_cost: props["total_cost"].as_f64().ok_or_else(|| bad("total_cost"))?,
        total_length_m: props["total_length_m"].as_f64().ok_or_else(|| bad("total_length_m"))?,
    };
    if route.node_ids.is_empty() || route.edge_ids.len() + 1 != route.node_ids.len() {
        return Err(bad("node and edge counts disagree"));
    }
    if features.len() != route.edge_ids.len() + 1 {
        return Err(bad("one LineString per edge expected"));
    }
    Ok(route)
}
