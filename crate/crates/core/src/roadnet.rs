//! Road graph model, scenario JSON import, and the flood overlay.
//!
//! Edges are undirected. An edge is blocked when its polyline touches any
//! flooded cell, however small the contact.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::io::Read;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geo::haversine_m;
use crate::inundation::FloodMask;
use crate::raster::{CellIndex, GridGeometry};

/// Snap radius used when a scenario does not set one.
pub const DEFAULT_SNAP_RADIUS_M: f64 = 500.0;

/// Edges shorter than this are listed by [`validate_graph`].
pub const ZERO_LENGTH_TOLERANCE_M: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RoadnetError {
    #[error("invalid road network JSON: {0}")]
    Json(String),
    #[error("duplicate node id {0:?}")]
    DuplicateNode(String),
    #[error("duplicate edge id {0:?}")]
    DuplicateEdge(String),
    #[error("duplicate poi id {0:?}")]
    DuplicatePoi(String),
    #[error("edge {edge:?} references missing node {node:?}")]
    DanglingEndpoint { edge: String, node: String },
    #[error("edge {edge:?} polyline has {points} point(s), at least 2 required")]
    ShortPolyline { edge: String, points: usize },
    #[error("edge {edge:?} polyline does not start at {from:?} and end at {to:?}")]
    EndpointMismatch { edge: String, from: String, to: String },
    #[error("edge {edge:?} has non-positive length {length}")]
    NonPositiveLength { edge: String, length: f64 },
    #[error("edge {edge:?} has non-positive strength {strength}")]
    NonPositiveStrength { edge: String, strength: f64 },
    #[error("{id:?} has a non-finite coordinate")]
    NonFiniteCoordinate { id: String },
    #[error("polyline needs at least 2 points, got {0}")]
    TooFewPoints(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub id: String,
    pub lon: f64,
    pub lat: f64,
}

impl Node {
    pub fn new(id: impl Into<String>, lon: f64, lat: f64) -> Self {
        Self { id: id.into(), lon, lat }
    }

    pub fn position(&self) -> [f64; 2] {
        [self.lon, self.lat]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub id: String,
    pub from: String,
    pub to: String,
    /// `[lon, lat]` vertices from `from` to `to`.
    pub polyline: Vec<[f64; 2]>,
    pub length_m: f64,
    /// Multiplier on length; traversal cost is `length_m * strength`.
    pub strength: f64,
    pub name: Option<String>,
}

impl Edge {
    /// Builds an edge whose length is the haversine length of `polyline`.
    pub fn new(
        id: impl Into<String>,
        from: impl Into<String>,
        to: impl Into<String>,
        polyline: Vec<[f64; 2]>,
        strength: f64,
        name: Option<String>,
    ) -> Result<Self, RoadnetError> {
        let id = id.into();
        let length_m = edge_length(&polyline).map_err(|_| RoadnetError::ShortPolyline {
            edge: id.clone(),
            points: polyline.len(),
        })?;
        Ok(Self {
            id,
            from: from.into(),
            to: to.into(),
            polyline,
            length_m,
            strength,
            name,
        })
    }

    pub fn cost(&self) -> f64 {
        self.length_m * self.strength
    }
}

/// Validated undirected road graph. Nodes and edges are kept sorted by id.
#[derive(Debug, Clone, PartialEq)]
pub struct RoadGraph {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    node_index: HashMap<String, usize>,
    edge_index: HashMap<String, usize>,
    // per node: (edge index, neighbour node index), in edge id order
    adjacency: Vec<Vec<(usize, usize)>>,
}

fn finite(p: [f64; 2]) -> bool {
    p[0].is_finite() && p[1].is_finite()
}

impl RoadGraph {
    pub fn new(mut nodes: Vec<Node>, mut edges: Vec<Edge>) -> Result<Self, RoadnetError> {
        nodes.sort_by(|a, b| a.id.cmp(&b.id));
        edges.sort_by(|a, b| a.id.cmp(&b.id));
        let mut node_index = HashMap::with_capacity(nodes.len());
        for (i, n) in nodes.iter().enumerate() {
            if node_index.insert(n.id.clone(), i).is_some() {
                return Err(RoadnetError::DuplicateNode(n.id.clone()));
            }
            if !finite(n.position()) {
                return Err(RoadnetError::NonFiniteCoordinate { id: n.id.clone() });
            }
        }
        let mut edge_index = HashMap::with_capacity(edges.len());
        let mut adjacency = vec![Vec::new(); nodes.len()];
        for (i, e) in edges.iter().enumerate() {
            if edge_index.insert(e.id.clone(), i).is_some() {
                return Err(RoadnetError::DuplicateEdge(e.id.clone()));
            }
            let endpoint = |node: &str| {
                node_index.get(node).copied().ok_or_else(|| RoadnetError::DanglingEndpoint {
                    edge: e.id.clone(),
                    node: node.to_string(),
                })
            };
            let from = endpoint(&e.from)?;
            let to = endpoint(&e.to)?;
            if e.polyline.len() < 2 {
                return Err(RoadnetError::ShortPolyline {
                    edge: e.id.clone(),
                    points: e.polyline.len(),
                });
            }
            if !e.polyline.iter().all(|p| finite(*p)) {
                return Err(RoadnetError::NonFiniteCoordinate { id: e.id.clone() });
            }
            if e.polyline[0] != nodes[from].position() || e.polyline[e.polyline.len() - 1] != nodes[to].position() {
                return Err(RoadnetError::EndpointMismatch {
                    edge: e.id.clone(),
                    from: e.from.clone(),
                    to: e.to.clone(),
                });
            }
            if !(e.length_m.is_finite() && e.length_m > 0.0) {
                return Err(RoadnetError::NonPositiveLength {
                    edge: e.id.clone(),
                    length: e.length_m,
                });
            }
            if !(e.strength.is_finite() && e.strength > 0.0) {
                return Err(RoadnetError::NonPositiveStrength {
                    edge: e.id.clone(),
                    strength: e.strength,
                });
            }
            adjacency[from].push((i, to));
            if from != to {
                adjacency[to].push((i, from));
            }
        }
        Ok(Self {
            nodes,
            edges,
            node_index,
            edge_index,
            adjacency,
        })
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node(&self, id: &str) -> Option<&Node> {
        self.node_index.get(id).map(|i| &self.nodes[*i])
    }

    pub fn edge(&self, id: &str) -> Option<&Edge> {
        self.edge_index.get(id).map(|i| &self.edges[*i])
    }

    pub fn node_idx(&self, id: &str) -> Option<usize> {
        self.node_index.get(id).copied()
    }

    pub fn edge_idx(&self, id: &str) -> Option<usize> {
        self.edge_index.get(id).copied()
    }

    /// `(edge index, neighbour index)` pairs of node `index`, in edge id order.
    pub fn incident(&self, index: usize) -> &[(usize, usize)] {
        &self.adjacency[index]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PoiKind {
    Shelter,
    Lodging,
    Building,
}

impl PoiKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            PoiKind::Shelter => "shelter",
            PoiKind::Lodging => "lodging",
            PoiKind::Building => "building",
        }
    }
}

/// Point of interest: shelter, lodging or building.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Poi {
    pub id: String,
    pub kind: PoiKind,
    pub lon: f64,
    pub lat: f64,
    pub name: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct NodeRecord {
    id: String,
    lon: f64,
    lat: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct EdgeRecord {
    id: String,
    from: String,
    to: String,
    polyline: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    strength: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
struct RoadnetFile {
    nodes: Vec<NodeRecord>,
    edges: Vec<EdgeRecord>,
    #[serde(default)]
    pois: Vec<Poi>,
}

/// Loads the graph part of a road network file.
pub fn load_roadnet(source: impl Read) -> Result<RoadGraph, RoadnetError> {
    load_roadnet_with_pois(source).map(|(g, _)| g)
}

/// Loads graph and points of interest. Edge lengths are always computed
/// from the polylines; `strength` defaults to 1.0.
pub fn load_roadnet_with_pois(source: impl Read) -> Result<(RoadGraph, Vec<Poi>), RoadnetError> {
    let file: RoadnetFile = serde_json::from_reader(source).map_err(|e| RoadnetError::Json(e.to_string()))?;
    let nodes = file.nodes.into_iter().map(|n| Node::new(n.id, n.lon, n.lat)).collect();
    let edges = file
        .edges
        .into_iter()
        .map(|e| Edge::new(e.id, e.from, e.to, e.polyline, e.strength.unwrap_or(1.0), e.name))
        .collect::<Result<Vec<_>, _>>()?;
    let graph = RoadGraph::new(nodes, edges)?;
    let mut seen = BTreeSet::new();
    for p in &file.pois {
        if !seen.insert(p.id.as_str()) {
            return Err(RoadnetError::DuplicatePoi(p.id.clone()));
        }
        if !finite([p.lon, p.lat]) {
            return Err(RoadnetError::NonFiniteCoordinate { id: p.id.clone() });
        }
    }
    Ok((graph, file.pois))
}

/// Road network JSON in the import schema, sorted by id.
pub fn write_roadnet(graph: &RoadGraph, pois: &[Poi]) -> String {
    let file = RoadnetFile {
        nodes: graph
            .nodes
            .iter()
            .map(|n| NodeRecord {
                id: n.id.clone(),
                lon: n.lon,
                lat: n.lat,
            })
            .collect(),
        edges: graph
            .edges
            .iter()
            .map(|e| EdgeRecord {
                id: e.id.clone(),
                from: e.from.clone(),
                to: e.to.clone(),
                polyline: e.polyline.clone(),
                strength: Some(e.strength),
                name: e.name.clone(),
            })
            .collect(),
        pois: pois.to_vec(),
    };
    let mut out = serde_json::to_string_pretty(&file).expect("road network serializes");
    out.push('\n');
    out
}

/// Sum of haversine segment lengths in meters.
pub fn edge_length(polyline: &[[f64; 2]]) -> Result<f64, RoadnetError> {
    if polyline.len() < 2 {
        return Err(RoadnetError::TooFewPoints(polyline.len()));
    }
    Ok(polyline.windows(2).map(|w| haversine_m(w[0], w[1])).sum())
}

// slack in cell units so boundary contacts survive rounding
const SUPERCOVER_EPS: f64 = 1e-9;

/// Every in-grid cell whose closed footprint touches the polyline.
pub fn edge_cells(polyline: &[[f64; 2]], geometry: &GridGeometry) -> BTreeSet<CellIndex> {
    let mut cells = BTreeSet::new();
    match polyline {
        [] => {}
        [p] => segment_cells(*p, *p, geometry, &mut cells),
        _ => {
            for w in polyline.windows(2) {
                segment_cells(w[0], w[1], geometry, &mut cells);
            }
        }
    }
    cells
}

fn clamp_range(lo: f64, hi: f64, n: usize) -> Option<(usize, usize)> {
    if !(lo.is_finite() && hi.is_finite()) || hi < 0.0 || lo > (n - 1) as f64 {
        return None;
    }
    let lo = lo.max(0.0) as usize;
    let hi = (hi.min((n - 1) as f64)) as usize;
    (lo <= hi).then_some((lo, hi))
}

fn segment_cells(p: [f64; 2], q: [f64; 2], g: &GridGeometry, out: &mut BTreeSet<CellIndex>) {
    let to_grid = |pt: [f64; 2]| {
        [
            (pt[0] - g.x_origin()) / g.cell_size(),
            (pt[1] - g.y_origin()) / g.cell_size(),
        ]
    };
    let (mut a, mut b) = (to_grid(p), to_grid(q));
    if !(finite(a) && finite(b)) {
        return;
    }
    // orient by u so the segment and its reverse produce identical arithmetic
    if (b[0], b[1]) < (a[0], a[1]) {
        std::mem::swap(&mut a, &mut b);
    }
    let eps = SUPERCOVER_EPS;
    let Some((c_lo, c_hi)) = clamp_range((a[0] - eps).ceil() - 1.0, (b[0] + eps).floor(), g.cols()) else {
        return;
    };
    let du = b[0] - a[0];
    for c in c_lo..=c_hi {
        let (v0, v1) = if du <= 0.0 {
            (a[1].min(b[1]), a[1].max(b[1]))
        } else {
            let s0 = a[0].max(c as f64 - eps);
            let s1 = b[0].min(c as f64 + 1.0 + eps);
            if s0 > s1 {
                continue;
            }
            let slope = (b[1] - a[1]) / du;
            let va = a[1] + (s0 - a[0]) * slope;
            let vb = a[1] + (s1 - a[0]) * slope;
            (va.min(vb), va.max(vb))
        };
        if let Some((r_lo, r_hi)) = clamp_range((v0 - eps).ceil() - 1.0, (v1 + eps).floor(), g.rows()) {
            for r in r_lo..=r_hi {
                out.insert(CellIndex::new(c, r));
            }
        }
    }
}

/// Per-edge blocked verdicts derived from one flood mask.
#[derive(Debug, Clone, PartialEq)]
pub struct HazardOverlay {
    pub blocked: BTreeMap<String, bool>,
    pub source_mask_geometry: GridGeometry,
}

impl HazardOverlay {
    /// `false` for unknown edge ids.
    pub fn is_blocked(&self, edge_id: &str) -> bool {
        self.blocked.get(edge_id).copied().unwrap_or(false)
    }

    pub fn blocked_edges(&self) -> impl Iterator<Item = &str> {
        self.blocked.iter().filter(|(_, b)| **b).map(|(id, _)| id.as_str())
    }

    pub fn blocked_count(&self) -> usize {
        self.blocked.values().filter(|b| **b).count()
    }

    /// Overlay report: `{"blocked": {id: bool}, "summary": {...}}`.
    pub fn report(&self) -> serde_json::Value {
        let blocked = self.blocked_count();
        serde_json::json!({
            "blocked": self.blocked,
            "summary": {
                "blocked": blocked,
                "passable": self.blocked.len() - blocked,
                "total": self.blocked.len(),
            }
        })
    }
}

/// An edge is blocked iff any cell under its polyline is flooded.
pub fn apply_flood_overlay(graph: &RoadGraph, mask: &FloodMask) -> HazardOverlay {
    let blocked = graph
        .edges
        .iter()
        .map(|e| {
            let wet = edge_cells(&e.polyline, mask.geometry())
                .into_iter()
                .any(|c| mask.is_flooded(c));
            (e.id.clone(), wet)
        })
        .collect();
    HazardOverlay {
        blocked,
        source_mask_geometry: *mask.geometry(),
    }
}

/// Closest node within `max_radius_m`; equal distances go to the smaller id.
pub fn nearest_node(graph: &RoadGraph, lon: f64, lat: f64, max_radius_m: f64) -> Option<&str> {
    let mut best: Option<(f64, &Node)> = None;
    // nodes are id-sorted, so strict `<` keeps the smallest id on ties
    for n in &graph.nodes {
        let d = haversine_m([lon, lat], n.position());
        if d <= max_radius_m && best.is_none_or(|(bd, _)| d < bd) {
            best = Some((d, n));
        }
    }
    best.map(|(_, n)| n.id.as_str())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphReport {
    pub component_count: usize,
    /// Node ids per component; each list sorted, components ordered by first id.
    pub components: Vec<Vec<String>>,
    pub isolated_nodes: Vec<String>,
    pub zero_length_edges: Vec<String>,
}

pub fn validate_graph(graph: &RoadGraph) -> GraphReport {
    let n = graph.nodes.len();
    let mut component_of = vec![usize::MAX; n];
    let mut components = Vec::new();
    for start in 0..n {
        if component_of[start] != usize::MAX {
            continue;
        }
        let id = components.len();
        let mut members = vec![start];
        component_of[start] = id;
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for &(_, v) in &graph.adjacency[u] {
                if component_of[v] == usize::MAX {
                    component_of[v] = id;
                    members.push(v);
                    queue.push_back(v);
                }
            }
        }
        members.sort_unstable();
        components.push(members.into_iter().map(|i| graph.nodes[i].id.clone()).collect::<Vec<_>>());
    }
    GraphReport {
        component_count: components.len(),
        components,
        isolated_nodes: (0..n)
            .filter(|i| graph.adjacency[*i].is_empty())
            .map(|i| graph.nodes[i].id.clone())
            .collect(),
        zero_length_edges: graph
            .edges
            .iter()
            .filter(|e| e.length_m < ZERO_LENGTH_TOLERANCE_M)
            .map(|e| e.id.clone())
            .collect(),
    }
}
