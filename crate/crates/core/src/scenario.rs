//! Scenario manifests: one JSON file naming the DEM, segmentation class
//! grids and road network of an event, plus flood parameters.
//!
//! ```json
//! {
//!   "name": "valley",
//!   "dem_path": "dem.asc",
//!   "class_grid_paths": [{"path": "seg.asc", "legend_path": "seg.legend.json", "water_class": "water"}],
//!   "roadnet_path": "roads.json",
//!   "params": {"water_level_ft": 13, "seed_fraction": 0.025, "snap_radius_m": 500}
//! }
//! ```
//!
//! Relative paths resolve against the manifest's directory. Exactly one
//! of `water_level_ft` and `water_level_m` must be given.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geo::feet_to_meters;
use crate::imagery::{classes_to_flood_mask, ingest_class_grid, parse_legend, align_mask};
use crate::inundation::{
    connected_inundation, default_seeds, fuse_masks, threshold_inundation, FloodMask, SeedSet,
    DEFAULT_SEED_FRACTION,
};
use crate::raster::{load_ascii_grid, RasterGrid};
use crate::roadnet::{apply_flood_overlay, load_roadnet_with_pois, HazardOverlay, Poi, RoadGraph, DEFAULT_SNAP_RADIUS_M};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("invalid manifest: {0}")]
    Manifest(String),
    #[error("{component}: cannot read {path}: {message}")]
    MissingFile {
        component: String,
        path: String,
        message: String,
    },
    #[error("{component}: {message}")]
    Component { component: String, message: String },
    #[error("invalid params: {0}")]
    Params(String),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InundationMode {
    Threshold,
    #[default]
    Connected,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassGridRef {
    pub path: String,
    pub legend_path: String,
    pub water_class: String,
    /// Further class names treated as impassable, e.g. damaged infrastructure.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub also_block: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub water_level_ft: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub water_level_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed_fraction: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snap_radius_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inundation_mode: Option<InundationMode>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub name: String,
    pub dem_path: String,
    #[serde(default)]
    pub class_grid_paths: Vec<ClassGridRef>,
    pub roadnet_path: String,
    pub params: ManifestParams,
}

pub fn parse_manifest(text: &str) -> Result<Manifest, ScenarioError> {
    serde_json::from_str(text).map_err(|e| ScenarioError::Manifest(e.to_string()))
}

pub fn write_manifest(manifest: &Manifest) -> String {
    let mut out = serde_json::to_string_pretty(manifest).expect("manifest serializes");
    out.push('\n');
    out
}

/// Resolved flood parameters, water level in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioParams {
    pub water_level_m: f64,
    pub seed_fraction: f64,
    pub snap_radius_m: f64,
    pub mode: InundationMode,
}

impl ScenarioParams {
    pub fn from_manifest(p: &ManifestParams) -> Result<Self, ScenarioError> {
        let water_level_m = match (p.water_level_ft, p.water_level_m) {
            (Some(ft), None) => feet_to_meters(ft),
            (None, Some(m)) => m,
            (Some(_), Some(_)) => {
                return Err(ScenarioError::Params(
                    "give either water_level_ft or water_level_m, not both".into(),
                ))
            }
            (None, None) => return Err(ScenarioError::Params("water_level_ft or water_level_m is required".into())),
        };
        if !water_level_m.is_finite() {
            return Err(ScenarioError::Params(format!("water level {water_level_m} is not finite")));
        }
        let seed_fraction = p.seed_fraction.unwrap_or(DEFAULT_SEED_FRACTION);
        if !(seed_fraction > 0.0 && seed_fraction <= 1.0) {
            return Err(ScenarioError::Params(format!("seed_fraction {seed_fraction} outside (0, 1]")));
        }
        let snap_radius_m = p.snap_radius_m.unwrap_or(DEFAULT_SNAP_RADIUS_M);
        if !(snap_radius_m.is_finite() && snap_radius_m > 0.0) {
            return Err(ScenarioError::Params(format!("snap_radius_m {snap_radius_m} must be positive")));
        }
        Ok(Self {
            water_level_m,
            seed_fraction,
            snap_radius_m,
            mode: p.inundation_mode.unwrap_or_default(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Provenance {
    DemModel,
    Segmentation,
    Fused,
}

impl Provenance {
    pub fn as_str(&self) -> &'static str {
        match self {
            Provenance::DemModel => "dem_model",
            Provenance::Segmentation => "segmentation",
            Provenance::Fused => "fused",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NamedMask {
    pub name: String,
    pub provenance: Provenance,
    pub mask: FloodMask,
}

/// A loaded event: DEM, aligned flood masks, road graph and pois.
///
/// `masks` holds the DEM-model mask first, then one mask per segmentation
/// grid, then their union tagged [`Provenance::Fused`].
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub dem: RasterGrid,
    pub masks: Vec<NamedMask>,
    pub graph: RoadGraph,
    pub pois: Vec<Poi>,
    pub params: ScenarioParams,
    pub seeds: SeedSet,
}

impl Scenario {
    pub fn fused_mask(&self) -> &FloodMask {
        &self.masks.last().expect("scenario always holds a fused mask").mask
    }

    pub fn segmentation_masks(&self) -> impl Iterator<Item = &NamedMask> {
        self.masks.iter().filter(|m| m.provenance == Provenance::Segmentation)
    }

    /// DEM-model mask at `water_level_m` with the scenario's seeds and mode.
    pub fn dem_mask_at(&self, water_level_m: f64) -> FloodMask {
        match self.params.mode {
            InundationMode::Threshold => threshold_inundation(&self.dem, water_level_m),
            InundationMode::Connected => {
                connected_inundation(&self.dem, water_level_m, &self.seeds).expect("seeds validated at load")
            }
        }
    }

    /// Union of the DEM-model mask at `water_level_m` and every segmentation mask.
    pub fn fused_at(&self, water_level_m: f64) -> FloodMask {
        self.segmentation_masks().fold(self.dem_mask_at(water_level_m), |acc, m| {
            fuse_masks(&acc, &m.mask).expect("masks aligned at load")
        })
    }
}

fn component_err(component: &str, e: impl std::fmt::Display) -> ScenarioError {
    ScenarioError::Component {
        component: component.to_string(),
        message: e.to_string(),
    }
}

fn open(base: &Path, rel: &str, component: &str) -> Result<(PathBuf, Vec<u8>), ScenarioError> {
    let path = base.join(rel);
    let bytes = fs::read(&path).map_err(|e| ScenarioError::MissingFile {
        component: component.to_string(),
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    Ok((path, bytes))
}

/// Loads the manifest at `path` and everything it references.
pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario, ScenarioError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| ScenarioError::MissingFile {
        component: "manifest".into(),
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    load_scenario_from_manifest(&text, base)
}

/// Loads a manifest given as text; relative paths resolve against `base_dir`.
pub fn load_scenario_from_manifest(text: &str, base_dir: &Path) -> Result<Scenario, ScenarioError> {
    let manifest = parse_manifest(text)?;
    let params = ScenarioParams::from_manifest(&manifest.params)?;

    let (_, dem_bytes) = open(base_dir, &manifest.dem_path, "dem")?;
    let dem = load_ascii_grid(dem_bytes.as_slice()).map_err(|e| component_err("dem", e))?;
    let geometry = *dem.geometry();
    let seeds = default_seeds(&dem, params.seed_fraction).map_err(|e| component_err("dem", e))?;

    let (_, road_bytes) = open(base_dir, &manifest.roadnet_path, "roadnet")?;
    let (graph, pois) = load_roadnet_with_pois(road_bytes.as_slice()).map_err(|e| component_err("roadnet", e))?;

    let mut scenario = Scenario {
        name: manifest.name.clone(),
        dem,
        masks: Vec::new(),
        graph,
        pois,
        params,
        seeds,
    };
    let dem_mask = scenario.dem_mask_at(params.water_level_m);
    scenario.masks.push(NamedMask {
        name: Provenance::DemModel.as_str().to_string(),
        provenance: Provenance::DemModel,
        mask: dem_mask,
    });

    for (i, grid_ref) in manifest.class_grid_paths.iter().enumerate() {
        let component = format!("class_grid[{i}]");
        let (_, legend_bytes) = open(base_dir, &grid_ref.legend_path, &component)?;
        let legend = std::str::from_utf8(&legend_bytes)
            .map_err(|e| component_err(&component, e))
            .and_then(|t| parse_legend(t).map_err(|e| component_err(&component, e)))?;
        let (_, grid_bytes) = open(base_dir, &grid_ref.path, &component)?;
        let classes = ingest_class_grid(grid_bytes.as_slice(), legend).map_err(|e| component_err(&component, e))?;
        let mut names = vec![grid_ref.water_class.as_str()];
        names.extend(grid_ref.also_block.iter().map(String::as_str));
        let mask = classes_to_flood_mask(&classes, &names).map_err(|e| component_err(&component, e))?;
        let aligned = align_mask(&mask, &geometry);
        if aligned.geometry() != &geometry {
            return Err(component_err(&component, "mask geometry differs from the DEM after alignment"));
        }
        scenario.masks.push(NamedMask {
            name: grid_ref.path.clone(),
            provenance: Provenance::Segmentation,
            mask: aligned,
        });
    }

    let fused = scenario.fused_at(params.water_level_m);
    scenario.masks.push(NamedMask {
        name: Provenance::Fused.as_str().to_string(),
        provenance: Provenance::Fused,
        mask: fused,
    });
    Ok(scenario)
}

/// Overlay of the scenario's fused mask on its road graph.
pub fn prepare_overlay(scenario: &Scenario) -> HazardOverlay {
    apply_flood_overlay(&scenario.graph, scenario.fused_mask())
}
