//! Class grids from segmentation products and color-rule tile extraction.
//!
//! Segmentation models run elsewhere; their output arrives as an ASCII grid
//! of integer class codes plus a JSON legend `{"code": "name"}`. Map tiles
//! are read as binary PPM images and classified with ordered color rules.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::inundation::{mask_to_raster, FloodMask};
use crate::raster::{
    cell_to_world, format_grid_header, parse_ascii_grid, parse_grid_header, resample_nearest,
    save_ascii_grid, world_to_cell, CellIndex, GridGeometry, RasterError, RasterGrid, DEFAULT_NODATA,
};

pub const OTHER: &str = "other";
pub const WATER: &str = "water";
pub const BUILDING: &str = "building";
pub const ROAD: &str = "road";
/// Class emitted for map-tile pixels where buildings and roads share one color.
pub const BUILDING_OR_ROAD: &str = "building_or_road";

/// Names every legend carries. Missing ones are appended with fresh codes.
pub const STANDARD_CLASSES: [&str; 4] = [OTHER, WATER, BUILDING, ROAD];

pub type Legend = BTreeMap<u32, String>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ImageryError {
    #[error(transparent)]
    Raster(#[from] RasterError),
    #[error("class code {code} at cell (col {col}, row {row}) is not in the legend")]
    UnknownCode { code: String, col: usize, row: usize },
    #[error("class {0:?} is not in the legend")]
    UnknownClass(String),
    #[error("legend names {0:?} twice")]
    DuplicateClassName(String),
    #[error("invalid legend: {0}")]
    Legend(String),
    #[error("{found} class codes do not fill the {expected}-cell grid")]
    CellCount { expected: usize, found: usize },
    #[error("invalid PPM image: {0}")]
    Ppm(String),
    #[error("image is {width}x{height} but its geometry is {cols}x{rows}")]
    ImageGeometry {
        width: usize,
        height: usize,
        cols: usize,
        rows: usize,
    },
}

/// Per-cell class codes with a code → name legend.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassGrid {
    geometry: GridGeometry,
    classes: Vec<u32>,
    legend: Legend,
}

impl ClassGrid {
    /// Validates codes against `legend` and appends any of
    /// [`STANDARD_CLASSES`] the legend lacks.
    pub fn new(geometry: GridGeometry, classes: Vec<u32>, legend: Legend) -> Result<Self, ImageryError> {
        if classes.len() != geometry.cell_count() {
            return Err(ImageryError::CellCount {
                expected: geometry.cell_count(),
                found: classes.len(),
            });
        }
        let legend = complete_legend(legend)?;
        if let Some((i, code)) = classes.iter().enumerate().find(|(_, c)| !legend.contains_key(c)) {
            let cell = geometry.cell_at(i);
            return Err(ImageryError::UnknownCode {
                code: code.to_string(),
                col: cell.col,
                row: cell.row,
            });
        }
        Ok(Self {
            geometry,
            classes,
            legend,
        })
    }

    pub fn geometry(&self) -> &GridGeometry {
        &self.geometry
    }

    pub fn classes(&self) -> &[u32] {
        &self.classes
    }

    pub fn legend(&self) -> &Legend {
        &self.legend
    }

    pub fn code_of(&self, name: &str) -> Option<u32> {
        self.legend.iter().find(|(_, n)| n.as_str() == name).map(|(c, _)| *c)
    }

    pub fn class_name(&self, cell: CellIndex) -> Option<&str> {
        self.geometry
            .contains(cell)
            .then(|| self.legend[&self.classes[self.geometry.offset(cell)]].as_str())
    }
}

fn complete_legend(mut legend: Legend) -> Result<Legend, ImageryError> {
    let mut seen = BTreeSet::new();
    for name in legend.values() {
        if name.is_empty() {
            return Err(ImageryError::Legend("class names must be non-empty".into()));
        }
        if !seen.insert(name.as_str()) {
            return Err(ImageryError::DuplicateClassName(name.clone()));
        }
    }
    let missing: Vec<&str> = STANDARD_CLASSES
        .iter()
        .copied()
        .filter(|n| !seen.contains(n))
        .collect();
    for name in missing {
        let next = legend.keys().next_back().map_or(Ok(0), |c| {
            c.checked_add(1)
                .ok_or_else(|| ImageryError::Legend("no free class code left".into()))
        })?;
        legend.insert(next, name.to_string());
    }
    Ok(legend)
}

pub fn parse_legend(text: &str) -> Result<Legend, ImageryError> {
    serde_json::from_str(text).map_err(|e| ImageryError::Legend(e.to_string()))
}

/// Legend JSON with keys in ascending code order, newline-terminated.
pub fn format_legend(legend: &Legend) -> String {
    let mut out = serde_json::to_string_pretty(legend).expect("string map serializes");
    out.push('\n');
    out
}

/// Reads an ASCII grid of integer class codes and maps it through `legend`.
pub fn ingest_class_grid(source: impl Read, legend: Legend) -> Result<ClassGrid, ImageryError> {
    let raster = crate::raster::load_ascii_grid(source)?;
    class_grid_from_raster(&raster, legend)
}

pub fn class_grid_from_raster(raster: &RasterGrid, legend: Legend) -> Result<ClassGrid, ImageryError> {
    let geometry = *raster.geometry();
    let legend = complete_legend(legend)?;
    let mut classes = Vec::with_capacity(raster.values().len());
    for (i, v) in raster.values().iter().enumerate() {
        let code = (v.fract() == 0.0 && *v >= 0.0 && *v <= u32::MAX as f64).then_some(*v as u32);
        match code.filter(|c| legend.contains_key(c)) {
            Some(c) => classes.push(c),
            None => {
                let cell = geometry.cell_at(i);
                return Err(ImageryError::UnknownCode {
                    code: v.to_string(),
                    col: cell.col,
                    row: cell.row,
                });
            }
        }
    }
    ClassGrid::new(geometry, classes, legend)
}

/// `(grid text, legend JSON)` for a class grid.
pub fn save_class_grid(grid: &ClassGrid) -> (String, String) {
    let values = grid.classes.iter().map(|c| f64::from(*c)).collect();
    let raster = RasterGrid::new(grid.geometry, values, DEFAULT_NODATA).expect("codes fill the geometry");
    (save_ascii_grid(&raster), format_legend(&grid.legend))
}

/// One color-matching rule. A pixel matches when every channel is within
/// `tolerance` of the target.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColorRule {
    pub class_name: String,
    pub r: u8,
    pub g: u8,
    pub b: u8,
    #[serde(default)]
    pub tolerance: u8,
}

impl ColorRule {
    /// Light gray shared by buildings and roads on standard web map tiles.
    pub fn map_tile_building_or_road() -> Self {
        Self {
            class_name: BUILDING_OR_ROAD.to_string(),
            r: 241,
            g: 241,
            b: 241,
            tolerance: 0,
        }
    }

    pub fn matches(&self, px: [u8; 3]) -> bool {
        let t = self.tolerance;
        px[0].abs_diff(self.r) <= t && px[1].abs_diff(self.g) <= t && px[2].abs_diff(self.b) <= t
    }
}

pub fn parse_rules(text: &str) -> Result<Vec<ColorRule>, serde_json::Error> {
    serde_json::from_str(text)
}

/// Georeferenced RGB raster. Pixels are stored top row first, as in the
/// image file; pixel `(x, y)` covers grid cell `(x, height - 1 - y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RgbImage {
    width: usize,
    height: usize,
    pixels: Vec<[u8; 3]>,
    geometry: GridGeometry,
}

impl RgbImage {
    pub fn new(width: usize, height: usize, pixels: Vec<[u8; 3]>, geometry: GridGeometry) -> Result<Self, ImageryError> {
        if geometry.cols() != width || geometry.rows() != height {
            return Err(ImageryError::ImageGeometry {
                width,
                height,
                cols: geometry.cols(),
                rows: geometry.rows(),
            });
        }
        if pixels.len() != width * height {
            return Err(ImageryError::Ppm(format!(
                "{} pixels for a {width}x{height} image",
                pixels.len()
            )));
        }
        Ok(Self {
            width,
            height,
            pixels,
            geometry,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[[u8; 3]] {
        &self.pixels
    }

    pub fn geometry(&self) -> &GridGeometry {
        &self.geometry
    }

    pub fn pixel(&self, x: usize, y: usize) -> [u8; 3] {
        self.pixels[y * self.width + x]
    }
}

/// Geometry used for images without a sidecar header: unit cells at the origin.
pub fn unit_geometry(width: usize, height: usize) -> Result<GridGeometry, ImageryError> {
    Ok(GridGeometry::new(width, height, 0.0, 0.0, 1.0)?)
}

/// Parses binary PPM (`P6`, maxval 255) and binds it to `geometry`.
pub fn read_ppm(bytes: &[u8], geometry: Option<GridGeometry>) -> Result<RgbImage, ImageryError> {
    let mut pos = 0;
    let mut fields = Vec::with_capacity(4);
    while fields.len() < 4 {
        // whitespace and comments between header fields
        while pos < bytes.len() {
            match bytes[pos] {
                b'#' => {
                    while pos < bytes.len() && bytes[pos] != b'\n' {
                        pos += 1;
                    }
                }
                b if b.is_ascii_whitespace() => pos += 1,
                _ => break,
            }
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() && bytes[pos] != b'#' {
            pos += 1;
        }
        if start == pos {
            return Err(ImageryError::Ppm("truncated header".into()));
        }
        fields.push(std::str::from_utf8(&bytes[start..pos]).map_err(|_| ImageryError::Ppm("non-ASCII header".into()))?);
    }
    if fields[0] != "P6" {
        return Err(ImageryError::Ppm(format!("magic {:?}, expected \"P6\"", fields[0])));
    }
    let dim = |s: &str, what: &str| -> Result<usize, ImageryError> {
        s.parse::<usize>()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| ImageryError::Ppm(format!("{what} {s:?} is not a positive integer")))
    };
    let width = dim(fields[1], "width")?;
    let height = dim(fields[2], "height")?;
    if fields[3] != "255" {
        return Err(ImageryError::Ppm(format!("maxval {}, only 255 is supported", fields[3])));
    }
    // exactly one whitespace byte separates the header from the raster
    if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
        return Err(ImageryError::Ppm("missing separator before pixel data".into()));
    }
    pos += 1;
    let data = &bytes[pos..];
    let expected = width * height * 3;
    if data.len() != expected {
        return Err(ImageryError::Ppm(format!(
            "{} pixel bytes, expected {expected}",
            data.len()
        )));
    }
    let pixels = data.chunks_exact(3).map(|p| [p[0], p[1], p[2]]).collect();
    let geometry = match geometry {
        Some(g) => g,
        None => unit_geometry(width, height)?,
    };
    RgbImage::new(width, height, pixels, geometry)
}

pub fn write_ppm(image: &RgbImage) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", image.width, image.height).into_bytes();
    out.extend(image.pixels.iter().flatten());
    out
}

/// Sidecar geometry file: the header lines of an ASCII grid.
pub fn parse_sidecar(text: &str) -> Result<GridGeometry, ImageryError> {
    Ok(parse_grid_header(text)?.0)
}

pub fn format_sidecar(geometry: &GridGeometry) -> String {
    format_grid_header(geometry, DEFAULT_NODATA)
}

/// Assigns each pixel the class of the first matching rule, or `other`.
///
/// The legend starts with the standard classes at codes 0..=3
/// (`other`, `water`, `building`, `road`); further rule classes follow in
/// first-appearance order.
pub fn classify_by_color(image: &RgbImage, rules: &[ColorRule]) -> ClassGrid {
    let mut legend: Legend = STANDARD_CLASSES
        .iter()
        .enumerate()
        .map(|(i, n)| (i as u32, n.to_string()))
        .collect();
    let mut rule_codes = Vec::with_capacity(rules.len());
    for rule in rules {
        let code = match legend.iter().find(|(_, n)| **n == rule.class_name) {
            Some((c, _)) => *c,
            None => {
                let c = legend.len() as u32;
                legend.insert(c, rule.class_name.clone());
                c
            }
        };
        rule_codes.push(code);
    }
    let (w, h) = (image.width, image.height);
    let mut classes = vec![0u32; w * h];
    for y in 0..h {
        let row = h - 1 - y;
        for x in 0..w {
            let px = image.pixel(x, y);
            if let Some(i) = rules.iter().position(|r| r.matches(px)) {
                classes[row * w + x] = rule_codes[i];
            }
        }
    }
    ClassGrid::new(image.geometry, classes, legend).expect("codes drawn from the legend")
}

/// Mask of cells whose class is one of `names`.
pub fn classes_to_flood_mask(grid: &ClassGrid, names: &[&str]) -> Result<FloodMask, ImageryError> {
    let mut codes = BTreeSet::new();
    for name in names {
        codes.insert(grid.code_of(name).ok_or_else(|| ImageryError::UnknownClass(name.to_string()))?);
    }
    let flooded = grid.classes.iter().map(|c| codes.contains(c)).collect();
    Ok(FloodMask::new(grid.geometry, flooded).expect("one flag per cell"))
}

pub fn class_to_flood_mask(grid: &ClassGrid, water_class: &str) -> Result<FloodMask, ImageryError> {
    classes_to_flood_mask(grid, &[water_class])
}

/// Nearest-neighbour alignment onto `target`; cells off the source extent are dry.
pub fn align_mask(mask: &FloodMask, target: &GridGeometry) -> FloodMask {
    if mask.geometry() == target {
        return mask.clone();
    }
    let resampled = resample_nearest(&mask_to_raster(mask), target);
    let flooded = resampled.values().iter().map(|v| *v == 1.0).collect();
    FloodMask::new(*target, flooded).expect("resample keeps the target cell count")
}

/// Cell of `image` containing a world point, as `(x, y)` pixel coordinates.
pub fn pixel_at(image: &RgbImage, lon: f64, lat: f64) -> Option<(usize, usize)> {
    world_to_cell(&image.geometry, lon, lat).map(|c| (c.col, image.height - 1 - c.row))
}

/// World center of pixel `(x, y)`.
pub fn pixel_center(image: &RgbImage, x: usize, y: usize) -> Result<(f64, f64), ImageryError> {
    Ok(cell_to_world(&image.geometry, CellIndex::new(x, image.height - 1 - y))?)
}

pub fn parse_class_grid(grid_text: &str, legend_text: &str) -> Result<ClassGrid, ImageryError> {
    class_grid_from_raster(&parse_ascii_grid(grid_text)?, parse_legend(legend_text)?)
}
