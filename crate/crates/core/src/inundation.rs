//! Flood masks from elevation and water level.
//!
//! Two models are provided. [`threshold_inundation`] floods every cell
//! below the water level. [`connected_inundation`] additionally requires a
//! 4-connected path of below-level cells back to a seed cell, so basins
//! behind higher ground stay dry.

use std::collections::{BTreeSet, VecDeque};

use thiserror::Error;

use crate::raster::{CellIndex, GridGeometry, RasterGrid};

/// Seed fraction used when a scenario does not set one.
pub const DEFAULT_SEED_FRACTION: f64 = 0.02;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InundationError {
    #[error("connected inundation needs at least one seed cell")]
    EmptySeeds,
    #[error("seed cell (col {col}, row {row}) is outside the grid")]
    SeedOutOfBounds { col: usize, row: usize },
    #[error("seed fraction must be in (0, 1], got {0}")]
    InvalidFraction(f64),
    #[error("elevation grid has no data cells")]
    NoData,
    #[error("mask geometries differ; align one mask to the other with align_mask first")]
    GeometryMismatch,
    #[error("mask has {found} cells, geometry needs {expected}")]
    CellCount { expected: usize, found: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FloodMask {
    geometry: GridGeometry,
    flooded: Vec<bool>,
}

impl FloodMask {
    pub fn new(geometry: GridGeometry, flooded: Vec<bool>) -> Result<Self, InundationError> {
        if flooded.len() != geometry.cell_count() {
            return Err(InundationError::CellCount {
                expected: geometry.cell_count(),
                found: flooded.len(),
            });
        }
        Ok(Self { geometry, flooded })
    }

    pub fn dry(geometry: GridGeometry) -> Self {
        Self {
            geometry,
            flooded: vec![false; geometry.cell_count()],
        }
    }

    pub fn geometry(&self) -> &GridGeometry {
        &self.geometry
    }

    pub fn cells(&self) -> &[bool] {
        &self.flooded
    }

    /// `false` for out-of-bounds cells.
    pub fn is_flooded(&self, cell: CellIndex) -> bool {
        self.geometry.contains(cell) && self.flooded[self.geometry.offset(cell)]
    }

    pub fn flooded_count(&self) -> usize {
        self.flooded.iter().filter(|f| **f).count()
    }

    pub fn flooded_cells(&self) -> impl Iterator<Item = CellIndex> + '_ {
        self.flooded
            .iter()
            .enumerate()
            .filter(|(_, f)| **f)
            .map(|(i, _)| self.geometry.cell_at(i))
    }

    /// Cellwise `self ⊆ other`. Masks with different geometry are never subsets.
    pub fn is_subset_of(&self, other: &FloodMask) -> bool {
        self.geometry == other.geometry && self.flooded.iter().zip(&other.flooded).all(|(a, b)| !*a || *b)
    }
}

/// Hydrologic source cells for [`connected_inundation`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SeedSet {
    pub cells: BTreeSet<CellIndex>,
}

impl SeedSet {
    pub fn new(cells: impl IntoIterator<Item = CellIndex>) -> Self {
        Self {
            cells: cells.into_iter().collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }
}

fn below(dem: &RasterGrid, index: usize, water_level: f64) -> bool {
    let v = dem.values()[index];
    !dem.is_nodata(v) && v < water_level
}

/// Bathtub model: a cell floods iff it has data and lies strictly below `water_level`.
pub fn threshold_inundation(dem: &RasterGrid, water_level: f64) -> FloodMask {
    let flooded = (0..dem.values().len()).map(|i| below(dem, i, water_level)).collect();
    FloodMask {
        geometry: *dem.geometry(),
        flooded,
    }
}

/// Flood fill from `seeds` through 4-connected cells below `water_level`.
pub fn connected_inundation(
    dem: &RasterGrid,
    water_level: f64,
    seeds: &SeedSet,
) -> Result<FloodMask, InundationError> {
    if seeds.is_empty() {
        return Err(InundationError::EmptySeeds);
    }
    let g = *dem.geometry();
    if let Some(bad) = seeds.cells.iter().find(|c| !g.contains(**c)) {
        return Err(InundationError::SeedOutOfBounds {
            col: bad.col,
            row: bad.row,
        });
    }
    let mut flooded = vec![false; g.cell_count()];
    let mut queue = VecDeque::new();
    for seed in &seeds.cells {
        let i = g.offset(*seed);
        if !flooded[i] && below(dem, i, water_level) {
            flooded[i] = true;
            queue.push_back(*seed);
        }
    }
    while let Some(cell) = queue.pop_front() {
        for next in neighbors4(&g, cell) {
            let i = g.offset(next);
            if !flooded[i] && below(dem, i, water_level) {
                flooded[i] = true;
                queue.push_back(next);
            }
        }
    }
    Ok(FloodMask { geometry: g, flooded })
}

fn neighbors4(g: &GridGeometry, c: CellIndex) -> impl Iterator<Item = CellIndex> {
    let (cols, rows) = (g.cols(), g.rows());
    [
        (c.col > 0).then(|| CellIndex::new(c.col - 1, c.row)),
        (c.col + 1 < cols).then(|| CellIndex::new(c.col + 1, c.row)),
        (c.row > 0).then(|| CellIndex::new(c.col, c.row - 1)),
        (c.row + 1 < rows).then(|| CellIndex::new(c.col, c.row + 1)),
    ]
    .into_iter()
    .flatten()
}

/// The lowest `ceil(fraction * n)` data cells, a stand-in for a river
/// channel. Equal elevations are ordered by `(row, col)`.
pub fn default_seeds(dem: &RasterGrid, fraction: f64) -> Result<SeedSet, InundationError> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(InundationError::InvalidFraction(fraction));
    }
    let g = dem.geometry();
    let mut data: Vec<(f64, CellIndex)> = g
        .cells()
        .filter_map(|c| dem.data(c).map(|v| (v, c)))
        .collect();
    if data.is_empty() {
        return Err(InundationError::NoData);
    }
    let take = ((fraction * data.len() as f64).ceil() as usize).clamp(1, data.len());
    data.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    Ok(SeedSet::new(data.into_iter().take(take).map(|(_, c)| c)))
}

/// Cellwise union.
pub fn fuse_masks(a: &FloodMask, b: &FloodMask) -> Result<FloodMask, InundationError> {
    if a.geometry != b.geometry {
        return Err(InundationError::GeometryMismatch);
    }
    Ok(FloodMask {
        geometry: a.geometry,
        flooded: a.flooded.iter().zip(&b.flooded).map(|(x, y)| *x || *y).collect(),
    })
}

pub fn flooded_fraction(mask: &FloodMask) -> f64 {
    mask.flooded_count() as f64 / mask.flooded.len() as f64
}

/// Mask as a 0/1 raster with nodata `-1`.
pub fn mask_to_raster(mask: &FloodMask) -> RasterGrid {
    let values = mask.flooded.iter().map(|f| if *f { 1.0 } else { 0.0 }).collect();
    RasterGrid::new(mask.geometry, values, -1.0).expect("0/1 values fill the geometry")
}
