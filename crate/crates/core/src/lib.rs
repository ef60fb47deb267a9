//! Flood-aware evacuation routing.
//!
//! The crate turns elevation rasters and segmentation products into flood
//! masks, overlays those masks on a road graph to find impassable edges,
//! and computes shortest evacuation routes and flood-safe lodging lists.

pub mod geo;
pub mod imagery;
pub mod inundation;
pub mod lodging;
pub mod raster;
pub mod roadnet;
pub mod routing;
pub mod scenario;

pub use imagery::{ClassGrid, ColorRule, RgbImage};
pub use inundation::{FloodMask, SeedSet};
pub use lodging::LodgingOption;
pub use raster::{CellIndex, GridGeometry, RasterGrid};
pub use roadnet::{Edge, HazardOverlay, Node, Poi, PoiKind, RoadGraph};
pub use routing::{Route, RouteRequest};
pub use scenario::{Scenario, ScenarioParams};

/// Compact JSON followed by a newline; the one writer used for every
/// machine-readable output so that surfaces compare byte for byte.
pub fn to_canonical_json<T: serde::Serialize + ?Sized>(value: &T) -> String {
    let mut out = serde_json::to_string(value).expect("value serializes to JSON");
    out.push('\n');
    out
}
