//! Georeferenced cell grids and the ESRI ASCII grid format.
//!
//! Rows are stored south to north: row 0 is the southernmost row and `y`
//! grows with the row index. The ASCII format lists the northern row first,
//! so the reader and writer flip row order.
//!
//! A cell `(col, row)` covers the half-open square
//! `[x_origin + col*cell_size, x_origin + (col+1)*cell_size)` by the same
//! interval in `y`. A point on an interior shared edge therefore lands in
//! the cell with the larger index, and points on the eastern or northern
//! outer edge fall outside the grid.

use std::fmt::Write as _;
use std::io::Read;

use thiserror::Error;

pub const DEFAULT_NODATA: f64 = -9999.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RasterError {
    #[error("line {line}: malformed header: {message}")]
    MalformedHeader { line: usize, message: String },
    #[error("line {line}: data row {row} has {found} values, expected {expected}")]
    RowLength {
        line: usize,
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: expected {expected} data rows, found {found}")]
    RowCount {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: invalid number {token:?}")]
    InvalidNumber { line: usize, token: String },
    #[error("line {line}: non-finite value {token:?}")]
    NonFinite { line: usize, token: String },
    #[error("invalid grid geometry: {0}")]
    InvalidGeometry(String),
    #[error("{found} values do not fill a {cols}x{rows} grid")]
    ValueCount {
        cols: usize,
        rows: usize,
        found: usize,
    },
    #[error("value at index {index} is not finite")]
    NonFiniteValue { index: usize },
    #[error("cell (col {col}, row {row}) is outside the {cols}x{rows} grid")]
    OutOfBounds {
        col: usize,
        row: usize,
        cols: usize,
        rows: usize,
    },
    #[error("read failed: {0}")]
    Io(String),
}

/// Spatial frame of a grid: dimensions, lower-left corner and square cell size in degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridGeometry {
    cols: usize,
    rows: usize,
    x_origin: f64,
    y_origin: f64,
    cell_size: f64,
}

impl GridGeometry {
    pub fn new(
        cols: usize,
        rows: usize,
        x_origin: f64,
        y_origin: f64,
        cell_size: f64,
    ) -> Result<Self, RasterError> {
        if cols == 0 || rows == 0 {
            return Err(RasterError::InvalidGeometry(format!(
                "grid must have at least one row and column, got {cols}x{rows}"
            )));
        }
        if !x_origin.is_finite() || !y_origin.is_finite() {
            return Err(RasterError::InvalidGeometry("origin must be finite".into()));
        }
        if !(cell_size.is_finite() && cell_size > 0.0) {
            return Err(RasterError::InvalidGeometry(format!(
                "cell size must be positive, got {cell_size}"
            )));
        }
        Ok(Self {
            cols,
            rows,
            x_origin,
            y_origin,
            cell_size,
        })
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn x_origin(&self) -> f64 {
        self.x_origin
    }

    pub fn y_origin(&self) -> f64 {
        self.y_origin
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    pub fn cell_count(&self) -> usize {
        self.cols * self.rows
    }

    pub fn contains(&self, cell: CellIndex) -> bool {
        cell.col < self.cols && cell.row < self.rows
    }

    /// Row-major offset of `cell`. The cell must be in bounds.
    pub fn offset(&self, cell: CellIndex) -> usize {
        debug_assert!(self.contains(cell));
        cell.row * self.cols + cell.col
    }

    pub fn cell_at(&self, offset: usize) -> CellIndex {
        CellIndex {
            col: offset % self.cols,
            row: offset / self.cols,
        }
    }

    /// Western edge of column `col` (also the eastern edge of `col - 1`).
    pub fn col_edge(&self, col: usize) -> f64 {
        self.x_origin + col as f64 * self.cell_size
    }

    /// Southern edge of row `row`.
    pub fn row_edge(&self, row: usize) -> f64 {
        self.y_origin + row as f64 * self.cell_size
    }

    /// `[min_x, min_y, max_x, max_y]` of the whole grid.
    pub fn extent(&self) -> [f64; 4] {
        [
            self.x_origin,
            self.y_origin,
            self.col_edge(self.cols),
            self.row_edge(self.rows),
        ]
    }

    /// `[min_x, min_y, max_x, max_y]` of one cell.
    pub fn footprint(&self, cell: CellIndex) -> [f64; 4] {
        [
            self.col_edge(cell.col),
            self.row_edge(cell.row),
            self.col_edge(cell.col + 1),
            self.row_edge(cell.row + 1),
        ]
    }

    pub fn cells(&self) -> impl Iterator<Item = CellIndex> + '_ {
        (0..self.cell_count()).map(|i| self.cell_at(i))
    }
}

/// Column/row address of a cell; row 0 is the southern row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellIndex {
    // field order gives (row, col) ordering
    pub row: usize,
    pub col: usize,
}

impl CellIndex {
    pub fn new(col: usize, row: usize) -> Self {
        Self { row, col }
    }
}

/// A grid of `f64` cell values (elevations or class codes) with a nodata sentinel.
#[derive(Debug, Clone, PartialEq)]
pub struct RasterGrid {
    geometry: GridGeometry,
    values: Vec<f64>,
    nodata: f64,
}

impl RasterGrid {
    pub fn new(geometry: GridGeometry, values: Vec<f64>, nodata: f64) -> Result<Self, RasterError> {
        if values.len() != geometry.cell_count() {
            return Err(RasterError::ValueCount {
                cols: geometry.cols,
                rows: geometry.rows,
                found: values.len(),
            });
        }
        if !nodata.is_finite() {
            return Err(RasterError::InvalidGeometry("nodata sentinel must be finite".into()));
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(RasterError::NonFiniteValue { index });
        }
        Ok(Self {
            geometry,
            values,
            nodata,
        })
    }

    /// Grid with every cell set to `value`.
    pub fn filled(geometry: GridGeometry, value: f64, nodata: f64) -> Result<Self, RasterError> {
        Self::new(geometry, vec![value; geometry.cell_count()], nodata)
    }

    pub fn geometry(&self) -> &GridGeometry {
        &self.geometry
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn nodata(&self) -> f64 {
        self.nodata
    }

    pub fn get(&self, cell: CellIndex) -> Option<f64> {
        self.geometry
            .contains(cell)
            .then(|| self.values[self.geometry.offset(cell)])
    }

    pub fn is_nodata(&self, value: f64) -> bool {
        value == self.nodata
    }

    /// Value of `cell` unless it is nodata.
    pub fn data(&self, cell: CellIndex) -> Option<f64> {
        self.get(cell).filter(|v| !self.is_nodata(*v))
    }
}

const HEADER_KEYS: [&str; 6] = ["ncols", "nrows", "xllcorner", "yllcorner", "cellsize", "nodata_value"];

#[derive(Default)]
struct Header {
    ncols: Option<usize>,
    nrows: Option<usize>,
    x: Option<(f64, bool)>,
    y: Option<(f64, bool)>,
    cellsize: Option<f64>,
    nodata: Option<f64>,
}

fn header_error(line: usize, message: impl Into<String>) -> RasterError {
    RasterError::MalformedHeader {
        line,
        message: message.into(),
    }
}

fn looks_numeric(token: &str) -> bool {
    token
        .chars()
        .next()
        .is_some_and(|c| c.is_ascii_digit() || matches!(c, '-' | '+' | '.'))
}

/// Parses an ESRI ASCII grid. Header keywords are case-insensitive,
/// `NODATA_value` is optional and `xllcenter`/`yllcenter` are accepted in
/// place of the corner keys. Each data line must hold exactly one row.
pub fn load_ascii_grid(mut source: impl Read) -> Result<RasterGrid, RasterError> {
    let mut bytes = Vec::new();
    source
        .read_to_end(&mut bytes)
        .map_err(|e| RasterError::Io(e.to_string()))?;
    let text = String::from_utf8(bytes).map_err(|_| RasterError::Io("input is not valid UTF-8".into()))?;
    parse_ascii_grid(&text)
}

pub fn parse_ascii_grid(text: &str) -> Result<RasterGrid, RasterError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l)).peekable();
    let (geometry, nodata) = read_header(&mut lines, text)?;
    let (cols, rows) = (geometry.cols, geometry.rows);
    let data_line = lines.peek().map(|(n, _)| *n).unwrap_or(text.lines().count() + 1);

    let mut values = vec![0.0; cols * rows];
    let mut row_seen = 0usize;
    let mut last_line = data_line;
    for (line_no, line) in lines {
        last_line = line_no;
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        if row_seen == rows {
            return Err(RasterError::RowCount {
                line: line_no,
                expected: rows,
                found: row_seen + 1,
            });
        }
        if tokens.len() != cols {
            return Err(RasterError::RowLength {
                line: line_no,
                row: row_seen,
                expected: cols,
                found: tokens.len(),
            });
        }
        let internal_row = rows - 1 - row_seen;
        for (col, token) in tokens.into_iter().enumerate() {
            let value: f64 = token.parse().map_err(|_| RasterError::InvalidNumber {
                line: line_no,
                token: token.to_string(),
            })?;
            if !value.is_finite() {
                return Err(RasterError::NonFinite {
                    line: line_no,
                    token: token.to_string(),
                });
            }
            values[internal_row * cols + col] = value;
        }
        row_seen += 1;
    }
    if row_seen != rows {
        return Err(RasterError::RowCount {
            line: last_line,
            expected: rows,
            found: row_seen,
        });
    }
    RasterGrid::new(geometry, values, nodata)
}

/// Parses only the header lines of an ASCII grid; data rows are rejected.
/// Used for sidecar geometry files.
pub fn parse_grid_header(text: &str) -> Result<(GridGeometry, f64), RasterError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l)).peekable();
    let header = read_header(&mut lines, text)?;
    if let Some((line, _)) = lines.find(|(_, l)| !l.trim().is_empty()) {
        return Err(header_error(line, "unexpected data after header"));
    }
    Ok(header)
}

fn read_header<'a, I>(
    lines: &mut std::iter::Peekable<I>,
    text: &str,
) -> Result<(GridGeometry, f64), RasterError>
where
    I: Iterator<Item = (usize, &'a str)>,
{
    let mut header = Header::default();
    while let Some(&(line_no, line)) = lines.peek() {
        let mut tokens = line.split_whitespace();
        let Some(key) = tokens.next() else {
            lines.next();
            continue;
        };
        if looks_numeric(key) {
            break;
        }
        lines.next();
        let value = tokens
            .next()
            .ok_or_else(|| header_error(line_no, format!("keyword {key:?} has no value")))?;
        if tokens.next().is_some() {
            return Err(header_error(line_no, format!("trailing tokens after {key:?}")));
        }
        let lower = key.to_ascii_lowercase();
        let number = |v: &str| -> Result<f64, RasterError> {
            v.parse::<f64>()
                .ok()
                .filter(|f| f.is_finite())
                .ok_or_else(|| header_error(line_no, format!("{key} value {v:?} is not a finite number")))
        };
        let count = |v: &str| -> Result<usize, RasterError> {
            v.parse::<usize>()
                .ok()
                .filter(|n| *n > 0)
                .ok_or_else(|| header_error(line_no, format!("{key} value {v:?} is not a positive integer")))
        };
        let duplicate = || header_error(line_no, format!("duplicate keyword {key:?}"));
        match lower.as_str() {
            "ncols" => {
                if header.ncols.replace(count(value)?).is_some() {
                    return Err(duplicate());
                }
            }
            "nrows" => {
                if header.nrows.replace(count(value)?).is_some() {
                    return Err(duplicate());
                }
            }
            "xllcorner" | "xllcenter" => {
                if header.x.replace((number(value)?, lower == "xllcenter")).is_some() {
                    return Err(duplicate());
                }
            }
            "yllcorner" | "yllcenter" => {
                if header.y.replace((number(value)?, lower == "yllcenter")).is_some() {
                    return Err(duplicate());
                }
            }
            "cellsize" => {
                if header.cellsize.replace(number(value)?).is_some() {
                    return Err(duplicate());
                }
            }
            "nodata_value" => {
                if header.nodata.replace(number(value)?).is_some() {
                    return Err(duplicate());
                }
            }
            _ => {
                return Err(header_error(
                    line_no,
                    format!("unknown keyword {key:?}, expected one of {HEADER_KEYS:?}"),
                ))
            }
        }
    }

    let data_line = lines.peek().map(|(n, _)| *n).unwrap_or(text.lines().count() + 1);
    let missing = |name: &str| header_error(data_line, format!("missing {name}"));
    let cols = header.ncols.ok_or_else(|| missing("ncols"))?;
    let rows = header.nrows.ok_or_else(|| missing("nrows"))?;
    let cell_size = header.cellsize.ok_or_else(|| missing("cellsize"))?;
    let (x, x_center) = header.x.ok_or_else(|| missing("xllcorner"))?;
    let (y, y_center) = header.y.ok_or_else(|| missing("yllcorner"))?;
    let x_origin = if x_center { x - cell_size / 2.0 } else { x };
    let y_origin = if y_center { y - cell_size / 2.0 } else { y };
    let nodata = header.nodata.unwrap_or(DEFAULT_NODATA);
    let geometry = GridGeometry::new(cols, rows, x_origin, y_origin, cell_size)
        .map_err(|e| header_error(data_line, e.to_string()))?;
    Ok((geometry, nodata))
}

/// Canonical ASCII grid text. Numbers use the shortest decimal that
/// parses back to the same `f64`, so `parse(save(g)) == g`.
pub fn save_ascii_grid(grid: &RasterGrid) -> String {
    let g = &grid.geometry;
    let mut out = format_grid_header(g, grid.nodata);
    out.reserve(g.cell_count() * 4);
    for row in (0..g.rows).rev() {
        let start = row * g.cols;
        for (i, v) in grid.values[start..start + g.cols].iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{v}");
        }
        out.push('\n');
    }
    out
}

/// Header lines as written by [`save_ascii_grid`].
pub fn format_grid_header(geometry: &GridGeometry, nodata: f64) -> String {
    let g = geometry;
    let mut out = String::new();
    // writing into a String cannot fail
    let _ = writeln!(out, "ncols {}", g.cols);
    let _ = writeln!(out, "nrows {}", g.rows);
    let _ = writeln!(out, "xllcorner {}", g.x_origin);
    let _ = writeln!(out, "yllcorner {}", g.y_origin);
    let _ = writeln!(out, "cellsize {}", g.cell_size);
    let _ = writeln!(out, "NODATA_value {nodata}");
    out
}

/// Cell whose footprint contains `(lon, lat)`, if any.
pub fn world_to_cell(geometry: &GridGeometry, lon: f64, lat: f64) -> Option<CellIndex> {
    let col = axis_index(lon, geometry.cols, |i| geometry.col_edge(i), geometry.x_origin, geometry.cell_size)?;
    let row = axis_index(lat, geometry.rows, |i| geometry.row_edge(i), geometry.y_origin, geometry.cell_size)?;
    Some(CellIndex { col, row })
}

/// Index `i` with `edge(i) <= v < edge(i + 1)`, using the same edge
/// arithmetic as [`GridGeometry::footprint`] so the two never disagree.
fn axis_index(v: f64, n: usize, edge: impl Fn(usize) -> f64, origin: f64, size: f64) -> Option<usize> {
    if !v.is_finite() || v < edge(0) || v >= edge(n) {
        return None;
    }
    let guess = ((v - origin) / size).floor();
    let mut i = if guess < 0.0 { 0 } else { (guess as usize).min(n - 1) };
    while i > 0 && v < edge(i) {
        i -= 1;
    }
    while i + 1 < n && v >= edge(i + 1) {
        i += 1;
    }
    Some(i)
}

/// Center of `cell` as `(lon, lat)`.
pub fn cell_to_world(geometry: &GridGeometry, cell: CellIndex) -> Result<(f64, f64), RasterError> {
    if !geometry.contains(cell) {
        return Err(RasterError::OutOfBounds {
            col: cell.col,
            row: cell.row,
            cols: geometry.cols,
            rows: geometry.rows,
        });
    }
    Ok((
        geometry.x_origin + (cell.col as f64 + 0.5) * geometry.cell_size,
        geometry.y_origin + (cell.row as f64 + 0.5) * geometry.cell_size,
    ))
}

/// Nearest-neighbour resample of `src` onto `target`: each target cell takes
/// the source value under its center, or nodata when the center is off-grid.
pub fn resample_nearest(src: &RasterGrid, target: &GridGeometry) -> RasterGrid {
    let values = target
        .cells()
        .map(|cell| {
            let (lon, lat) = cell_to_world(target, cell).expect("cell from target iterator");
            world_to_cell(&src.geometry, lon, lat)
                .map(|c| src.values[src.geometry.offset(c)])
                .unwrap_or(src.nodata)
        })
        .collect();
    RasterGrid {
        geometry: *target,
        values,
        nodata: src.nodata,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(cols: usize, rows: usize) -> GridGeometry {
        GridGeometry::new(cols, rows, 0.0, 0.0, 1.0).unwrap()
    }

    #[test]
    fn loads_single_cell() {
        let text = "ncols 1\nnrows 1\nxllcorner 0\nyllcorner 0\ncellsize 1\nNODATA_value -9999\n5.0\n";
        let grid = parse_ascii_grid(text).unwrap();
        assert_eq!(grid.geometry().cols(), 1);
        assert_eq!(grid.geometry().rows(), 1);
        assert_eq!(grid.values(), &[5.0]);
    }

    #[test]
    fn nodata_line_is_optional_and_keywords_ignore_case() {
        let text = "NCOLS 2\nNRows 1\nXLLCORNER 1.5\nyllcorner -2\nCELLSIZE 0.5\n1 2\n";
        let grid = parse_ascii_grid(text).unwrap();
        assert_eq!(grid.nodata(), DEFAULT_NODATA);
        assert_eq!(grid.geometry().x_origin(), 1.5);
        assert_eq!(grid.geometry().y_origin(), -2.0);
        assert_eq!(grid.values(), &[1.0, 2.0]);
    }

    #[test]
    fn center_keys_shift_to_corner() {
        let text = "ncols 1\nnrows 1\nxllcenter 0.5\nyllcenter 0.5\ncellsize 1\n3\n";
        let grid = parse_ascii_grid(text).unwrap();
        assert_eq!(grid.geometry().x_origin(), 0.0);
        assert_eq!(grid.geometry().y_origin(), 0.0);
    }

    #[test]
    fn north_row_first_is_flipped() {
        let text = "ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 1\n1 2\n3 4\n";
        let grid = parse_ascii_grid(text).unwrap();
        // row 0 is the south row, which is the last line of the file
        assert_eq!(grid.get(CellIndex::new(0, 0)), Some(3.0));
        assert_eq!(grid.get(CellIndex::new(1, 1)), Some(2.0));
    }

    #[test]
    fn long_row_reports_line_and_row() {
        let text = "ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 1\n1 2\n3 4 5\n";
        assert_eq!(
            parse_ascii_grid(text).unwrap_err(),
            RasterError::RowLength {
                line: 7,
                row: 1,
                expected: 2,
                found: 3
            }
        );
    }

    #[test]
    fn missing_rows_and_extra_rows() {
        let short = "ncols 1\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 1\n1\n";
        assert!(matches!(
            parse_ascii_grid(short),
            Err(RasterError::RowCount { expected: 2, found: 1, .. })
        ));
        let long = "ncols 1\nnrows 1\nxllcorner 0\nyllcorner 0\ncellsize 1\n1\n2\n";
        assert!(matches!(
            parse_ascii_grid(long),
            Err(RasterError::RowCount { line: 7, .. })
        ));
    }

    #[test]
    fn bad_token_is_named() {
        let text = "ncols 2\nnrows 1\nxllcorner 0\nyllcorner 0\ncellsize 1\n1 x\n";
        assert!(matches!(parse_ascii_grid(text), Err(RasterError::InvalidNumber { line: 6, .. })));
        let text = "ncols 2\nnrows 1\nxllcorner 0\nyllcorner 0\ncellsize 1\n1 1e999\n";
        assert!(matches!(parse_ascii_grid(text), Err(RasterError::NonFinite { line: 6, .. })));
    }

    #[test]
    fn header_errors() {
        let missing = "ncols 1\nnrows 1\nxllcorner 0\ncellsize 1\n1\n";
        assert!(matches!(parse_ascii_grid(missing), Err(RasterError::MalformedHeader { line: 5, .. })));
        let zero = "ncols 0\nnrows 1\nxllcorner 0\nyllcorner 0\ncellsize 1\n";
        assert!(matches!(parse_ascii_grid(zero), Err(RasterError::MalformedHeader { line: 1, .. })));
        let unknown = "ncols 1\nbands 3\n";
        assert!(matches!(parse_ascii_grid(unknown), Err(RasterError::MalformedHeader { line: 2, .. })));
        let dup = "ncols 1\nncols 1\n";
        assert!(matches!(parse_ascii_grid(dup), Err(RasterError::MalformedHeader { line: 2, .. })));
        let neg_size = "ncols 1\nnrows 1\nxllcorner 0\nyllcorner 0\ncellsize -1\n1\n";
        assert!(matches!(parse_ascii_grid(neg_size), Err(RasterError::MalformedHeader { .. })));
    }

    #[test]
    fn save_single_zero_cell() {
        let grid = RasterGrid::filled(unit(1, 1), 0.0, DEFAULT_NODATA).unwrap();
        let text = save_ascii_grid(&grid);
        assert!(text.contains("ncols 1\n"));
        assert_eq!(text.lines().last(), Some("0"));
    }

    #[test]
    fn nodata_serializes_as_sentinel() {
        let grid = RasterGrid::new(unit(2, 1), vec![-9999.0, 1.5], -9999.0).unwrap();
        assert!(save_ascii_grid(&grid).ends_with("-9999 1.5\n"));
    }

    #[test]
    fn cell_lookup_basics() {
        let g = unit(4, 3);
        assert_eq!(world_to_cell(&g, 0.5, 0.5), Some(CellIndex::new(0, 0)));
        assert_eq!(world_to_cell(&g, -0.1, 0.5), None);
        // shared edge goes to the higher index
        assert_eq!(world_to_cell(&g, 1.0, 2.0), Some(CellIndex::new(1, 2)));
        // outer east/north edges are outside
        assert_eq!(world_to_cell(&g, 4.0, 0.5), None);
        assert_eq!(world_to_cell(&g, 0.5, 3.0), None);
        assert_eq!(world_to_cell(&g, f64::NAN, 0.5), None);
    }

    #[test]
    fn cell_center() {
        let g = unit(2, 2);
        assert_eq!(cell_to_world(&g, CellIndex::new(0, 0)).unwrap(), (0.5, 0.5));
        assert!(matches!(
            cell_to_world(&g, CellIndex::new(2, 0)),
            Err(RasterError::OutOfBounds { .. })
        ));
    }

    #[test]
    fn center_round_trip_on_8x8() {
        let g = GridGeometry::new(8, 8, -79.05, 34.6, 0.001).unwrap();
        for cell in g.cells() {
            let (lon, lat) = cell_to_world(&g, cell).unwrap();
            assert_eq!(world_to_cell(&g, lon, lat), Some(cell));
        }
    }

    #[test]
    fn resample_identity_and_disjoint() {
        let g = unit(3, 2);
        let src = RasterGrid::new(g, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0], -1.0).unwrap();
        assert_eq!(resample_nearest(&src, &g), src);
        let far = GridGeometry::new(3, 2, 100.0, 100.0, 1.0).unwrap();
        let out = resample_nearest(&src, &far);
        assert!(out.values().iter().all(|v| *v == -1.0));
    }

    #[test]
    fn rejects_inconsistent_construction() {
        assert!(GridGeometry::new(0, 1, 0.0, 0.0, 1.0).is_err());
        assert!(GridGeometry::new(1, 1, 0.0, 0.0, 0.0).is_err());
        assert!(RasterGrid::new(unit(2, 2), vec![0.0; 3], -1.0).is_err());
        assert!(RasterGrid::new(unit(1, 1), vec![f64::NAN], -1.0).is_err());
    }
}
