//! Scenario state and request handlers behind the HTTP service.
//!
//! Every handler is a plain function from a [`Snapshot`] (or the
//! [`ServiceState`] for loads) and raw request bytes to a [`Reply`]. The
//! axum layer in [`http`] only moves bytes in and out, so the same logic
//! can be tested without a socket and reused by the command-line tool.

pub mod http;

use std::collections::BTreeSet;
use std::path::Path;
use std::sync::{Arc, Mutex, RwLock};

use floodroute_core::geo::feet_to_meters;
use floodroute_core::inundation::FloodMask;
use floodroute_core::lodging::{filter_lodging, lodging_json, rank_lodging, LodgingOption};
use floodroute_core::raster::GridGeometry;
use floodroute_core::roadnet::{nearest_node, HazardOverlay};
use floodroute_core::routing::{route_geojson, shortest_route, Route, RouteRequest, RoutingError};
use floodroute_core::scenario::{load_scenario, prepare_overlay, ScenarioError};
use floodroute_core::{to_canonical_json, Scenario};
use serde::Deserialize;
use serde_json::{json, Map, Value};

/// A loaded scenario together with the overlay derived from its fused mask.
#[derive(Debug)]
pub struct Active {
    pub scenario: Scenario,
    pub overlay: HazardOverlay,
}

impl Active {
    pub fn new(scenario: Scenario) -> Self {
        let overlay = prepare_overlay(&scenario);
        Self { scenario, overlay }
    }
}

/// Immutable view of the service state. Requests hold one for their whole
/// lifetime, so a concurrent reload never changes what they see.
#[derive(Debug, Default)]
pub struct Snapshot {
    pub version: u64,
    pub active: Option<Arc<Active>>,
}

#[derive(Debug, Default)]
pub struct ServiceState {
    current: RwLock<Arc<Snapshot>>,
    loading: Mutex<()>,
}

impl ServiceState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn snapshot(&self) -> Arc<Snapshot> {
        Arc::clone(&self.current.read().unwrap_or_else(|e| e.into_inner()))
    }

    /// Loads the manifest and swaps it in with the next version number.
    /// On failure the current snapshot stays in place.
    pub fn load(&self, manifest_path: impl AsRef<Path>) -> Result<Arc<Snapshot>, ScenarioError> {
        // serialize loads so versions are handed out in swap order
        let _guard = self.loading.lock().unwrap_or_else(|e| e.into_inner());
        let active = Arc::new(Active::new(load_scenario(manifest_path)?));
        let mut current = self.current.write().unwrap_or_else(|e| e.into_inner());
        let next = Arc::new(Snapshot {
            version: current.version + 1,
            active: Some(active),
        });
        *current = Arc::clone(&next);
        Ok(next)
    }
}

/// HTTP status plus a JSON body.
#[derive(Debug, Clone, PartialEq)]
pub struct Reply {
    pub status: u16,
    pub body: Value,
}

impl Reply {
    fn new(status: u16, version: u64, body: Value) -> Self {
        let mut body = body;
        body["version"] = json!(version);
        Self { status, body }
    }

    fn error(status: u16, version: u64, message: impl Into<String>) -> Self {
        Self::new(status, version, json!({"error": message.into()}))
    }

    /// Canonical body text, newline-terminated.
    pub fn text(&self) -> String {
        to_canonical_json(&self.body)
    }
}

fn no_scenario(version: u64) -> Reply {
    Reply::error(409, version, "no scenario loaded")
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LoadBody {
    manifest_path: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RouteBody {
    from: [f64; 2],
    to: [f64; 2],
    #[serde(default)]
    closed_edges: Vec<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LodgingBody {
    from: [f64; 2],
}

fn parse_body<'a, T: Deserialize<'a>>(body: &'a [u8]) -> Result<T, String> {
    serde_json::from_slice(body).map_err(|e| format!("malformed request: {e}"))
}

/// Rejects non-finite or out-of-range longitude/latitude pairs.
pub fn check_point(p: [f64; 2]) -> Result<[f64; 2], String> {
    let [lon, lat] = p;
    if !(lon.is_finite() && lat.is_finite()) || lon.abs() > 180.0 || lat.abs() > 90.0 {
        return Err(format!("invalid coordinate [{lon}, {lat}]"));
    }
    Ok(p)
}

#[derive(Debug, Clone, PartialEq)]
pub enum RouteOutcome {
    Found(Route),
    Unreachable,
    NoNearbyRoad,
}

/// Snaps both points to the road graph and routes between them.
pub fn plan_route(
    active: &Active,
    from: [f64; 2],
    to: [f64; 2],
    closed_edges: &BTreeSet<String>,
) -> Result<RouteOutcome, RoutingError> {
    let s = &active.scenario;
    let radius = s.params.snap_radius_m;
    let (Some(origin), Some(destination)) = (
        nearest_node(&s.graph, from[0], from[1], radius),
        nearest_node(&s.graph, to[0], to[1], radius),
    ) else {
        return Ok(RouteOutcome::NoNearbyRoad);
    };
    let request = RouteRequest::new(origin, destination).closing(closed_edges.iter().cloned());
    Ok(match shortest_route(&s.graph, &active.overlay, &request)? {
        Some(route) => RouteOutcome::Found(route),
        None => RouteOutcome::Unreachable,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum LodgingOutcome {
    Ranked(Vec<LodgingOption>),
    NoNearbyRoad,
}

/// Dry lodging and shelters ranked by route length from the snapped origin.
pub fn plan_lodging(active: &Active, from: [f64; 2]) -> LodgingOutcome {
    let s = &active.scenario;
    let Some(origin) = nearest_node(&s.graph, from[0], from[1], s.params.snap_radius_m) else {
        return LodgingOutcome::NoNearbyRoad;
    };
    let dry = filter_lodging(&s.pois, s.fused_mask());
    let ranked = rank_lodging(&dry, &s.graph, &active.overlay, origin, s.params.snap_radius_m)
        .expect("snapped origin is a graph node");
    LodgingOutcome::Ranked(ranked)
}

fn footprint_ring(g: &GridGeometry, c: floodroute_core::CellIndex) -> Value {
    let [x0, y0, x1, y1] = g.footprint(c);
    json!([[[x0, y0], [x1, y0], [x1, y1], [x0, y1], [x0, y0]]])
}

/// Flooded cells of the fused mask as footprint polygons. With `level_ft`
/// the DEM-model part is recomputed at that stage first; stored state is
/// left alone.
///
/// Each feature's `source` names what flagged the cell: `dem_model`,
/// `segmentation`, or `dem_model+segmentation`.
pub fn flood_layer(active: &Active, level_ft: Option<f64>) -> Value {
    let s = &active.scenario;
    let dem_mask = match level_ft {
        Some(ft) => s.dem_mask_at(feet_to_meters(ft)),
        None => s.masks[0].mask.clone(),
    };
    let seg: Vec<&FloodMask> = s.segmentation_masks().map(|m| &m.mask).collect();
    let g = s.dem.geometry();
    let features: Vec<Value> = g
        .cells()
        .filter_map(|c| {
            let by_dem = dem_mask.is_flooded(c);
            let by_seg = seg.iter().any(|m| m.is_flooded(c));
            let source = match (by_dem, by_seg) {
                (false, false) => return None,
                (true, false) => "dem_model",
                (false, true) => "segmentation",
                (true, true) => "dem_model+segmentation",
            };
            Some(json!({
                "type": "Feature",
                "geometry": {"type": "Polygon", "coordinates": footprint_ring(g, c)},
                "properties": {"source": source, "col": c.col, "row": c.row},
            }))
        })
        .collect();
    json!({"type": "FeatureCollection", "features": features, "level_ft": level_ft})
}

pub fn handle_load(state: &ServiceState, body: &[u8]) -> Reply {
    let before = state.snapshot().version;
    let req: LoadBody = match parse_body(body) {
        Ok(r) => r,
        Err(e) => return Reply::error(400, before, e),
    };
    match state.load(&req.manifest_path) {
        Ok(snap) => {
            let name = snap.active.as_ref().map(|a| a.scenario.name.clone());
            Reply::new(200, snap.version, json!({"status": "loaded", "scenario_name": name}))
        }
        Err(e) => Reply::error(422, state.snapshot().version, e.to_string()),
    }
}

/// `level_ft` is the raw query value, if any.
pub fn handle_flood(snap: &Snapshot, level_ft: Option<&str>) -> Reply {
    let Some(active) = &snap.active else {
        return no_scenario(snap.version);
    };
    let level = match level_ft.map(|t| t.trim().parse::<f64>()) {
        None => None,
        Some(Ok(v)) if v.is_finite() => Some(v),
        Some(_) => return Reply::error(400, snap.version, format!("invalid level_ft {:?}", level_ft.unwrap_or(""))),
    };
    Reply::new(200, snap.version, flood_layer(active, level))
}

pub fn handle_route(snap: &Snapshot, body: &[u8]) -> Reply {
    let Some(active) = &snap.active else {
        return no_scenario(snap.version);
    };
    let req: RouteBody = match parse_body(body) {
        Ok(r) => r,
        Err(e) => return Reply::error(400, snap.version, e),
    };
    let (from, to) = match (check_point(req.from), check_point(req.to)) {
        (Ok(f), Ok(t)) => (f, t),
        (Err(e), _) | (_, Err(e)) => return Reply::error(400, snap.version, e),
    };
    let closed: BTreeSet<String> = req.closed_edges.into_iter().collect();
    match plan_route(active, from, to, &closed) {
        Ok(RouteOutcome::Found(route)) => {
            let geojson = route_geojson(&route, &active.scenario.graph).expect("route edges exist");
            Reply::new(200, snap.version, geojson)
        }
        Ok(RouteOutcome::Unreachable) => Reply::new(200, snap.version, json!({"route": null, "reason": "unreachable"})),
        Ok(RouteOutcome::NoNearbyRoad) => {
            Reply::new(200, snap.version, json!({"route": null, "reason": "no_nearby_road"}))
        }
        Err(e) => Reply::error(400, snap.version, e.to_string()),
    }
}

pub fn handle_lodging(snap: &Snapshot, body: &[u8]) -> Reply {
    let Some(active) = &snap.active else {
        return no_scenario(snap.version);
    };
    let req: LodgingBody = match parse_body(body) {
        Ok(r) => r,
        Err(e) => return Reply::error(400, snap.version, e),
    };
    let from = match check_point(req.from) {
        Ok(p) => p,
        Err(e) => return Reply::error(400, snap.version, e),
    };
    match plan_lodging(active, from) {
        LodgingOutcome::Ranked(options) => Reply::new(200, snap.version, json!({"lodging": lodging_json(&options)})),
        LodgingOutcome::NoNearbyRoad => {
            Reply::new(200, snap.version, json!({"lodging": null, "reason": "no_nearby_road"}))
        }
    }
}

pub fn handle_health(snap: &Snapshot) -> Reply {
    let name = snap.active.as_ref().map(|a| a.scenario.name.clone());
    let mut body = Map::new();
    body.insert("status".into(), json!("ok"));
    body.insert("scenario_name".into(), json!(name));
    Reply::new(200, snap.version, Value::Object(body))
}
