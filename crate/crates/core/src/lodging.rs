//! Flood-safe lodging and shelter lists ranked by route length.

use serde::Serialize;

use crate::inundation::FloodMask;
use crate::raster::world_to_cell;
use crate::roadnet::{nearest_node, HazardOverlay, Poi, PoiKind, RoadGraph};
use crate::routing::{shortest_route, RouteRequest, RoutingError};

#[derive(Debug, Clone, PartialEq)]
pub struct LodgingOption {
    pub poi: Poi,
    pub flooded: bool,
    pub reachable: bool,
    /// Present iff `reachable`.
    pub route_length_m: Option<f64>,
    pub snap_node: Option<String>,
}

#[derive(Serialize)]
struct LodgingRecord<'a> {
    id: &'a str,
    name: &'a str,
    kind: PoiKind,
    flooded: bool,
    reachable: bool,
    route_length_m: Option<f64>,
    snap_node: Option<&'a str>,
}

impl LodgingOption {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(LodgingRecord {
            id: &self.poi.id,
            name: &self.poi.name,
            kind: self.poi.kind,
            flooded: self.flooded,
            reachable: self.reachable,
            route_length_m: self.route_length_m,
            snap_node: self.snap_node.as_deref(),
        })
        .expect("lodging record serializes")
    }
}

/// JSON array of lodging records in list order.
pub fn lodging_json(options: &[LodgingOption]) -> serde_json::Value {
    serde_json::Value::Array(options.iter().map(LodgingOption::to_json).collect())
}

/// Lodging and shelter pois whose cell is dry. Pois outside the mask
/// extent are kept: no observation is not evidence of flooding.
pub fn filter_lodging(pois: &[Poi], mask: &FloodMask) -> Vec<Poi> {
    pois.iter()
        .filter(|p| matches!(p.kind, PoiKind::Lodging | PoiKind::Shelter))
        .filter(|p| !world_to_cell(mask.geometry(), p.lon, p.lat).is_some_and(|c| mask.is_flooded(c)))
        .cloned()
        .collect()
}

/// Snaps each poi to the graph and routes to it from `origin`. Reachable
/// options come first by ascending route length then poi id; unreachable
/// and unsnappable ones follow by poi id.
pub fn rank_lodging(
    dry: &[Poi],
    graph: &RoadGraph,
    overlay: &HazardOverlay,
    origin: &str,
    snap_radius_m: f64,
) -> Result<Vec<LodgingOption>, RoutingError> {
    if graph.node(origin).is_none() {
        return Err(RoutingError::UnknownNode(origin.to_string()));
    }
    let mut options = Vec::with_capacity(dry.len());
    for poi in dry {
        let snap = nearest_node(graph, poi.lon, poi.lat, snap_radius_m).map(str::to_string);
        let route = match &snap {
            Some(node) => shortest_route(graph, overlay, &RouteRequest::new(origin, node.as_str()))?,
            None => None,
        };
        options.push(LodgingOption {
            poi: poi.clone(),
            flooded: false,
            reachable: route.is_some(),
            route_length_m: route.map(|r| r.total_length_m),
            snap_node: snap,
        });
    }
    options.sort_by(|a, b| match (a.route_length_m, b.route_length_m) {
        (Some(x), Some(y)) => x.total_cmp(&y).then_with(|| a.poi.id.cmp(&b.poi.id)),
        (Some(_), None) => std::cmp::Ordering::Less,
        (None, Some(_)) => std::cmp::Ordering::Greater,
        (None, None) => a.poi.id.cmp(&b.poi.id),
    });
    Ok(options)
}
