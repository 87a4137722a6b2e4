//! Plane trees from sampled scalar fields.

mod contour;
mod estimate;
mod raster;

pub use contour::{contour_tree, prune, CtKind, CtNode, ContourTree, ContourTreeEdge};
pub use estimate::{edge_samples, estimate_profiles, ingest, IngestOptions, IngestResult, DEFAULT_MAX_DEN};
pub use raster::{rasterize, RasterOptions};

use thiserror::Error;

use crate::morse_tree::{TreeDiagnostic, TreeError};

pub const BINARY_MAGIC: &[u8; 4] = b"UNLK";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IngestError {
    #[error("malformed grid: {0}")]
    Malformed(String),
    #[error("boundary ring must be zero (cell {0})")]
    NonzeroBoundary(usize),
    #[error("non-Morse configuration at cell {cell}: degree {degree}")]
    NonMorseGrid { cell: usize, degree: usize },
    #[error("ingested tree fails validation: {0:?}")]
    ValidationFailed(Vec<TreeDiagnostic>),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error("cannot rasterize: {0}")]
    Unsupported(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarGrid {
    pub width: usize,
    pub height: usize,
    /// Cell side; a cell has area `spacing^2`.
    pub spacing: f64,
    /// Row-major.
    pub values: Vec<f64>,
}

impl ScalarGrid {
    pub fn new(width: usize, height: usize, spacing: f64, values: Vec<f64>) -> Result<Self, IngestError> {
        let bad = |s: String| Err(IngestError::Malformed(s));
        if width < 3 || height < 3 {
            return bad(format!("grid {width}x{height} is smaller than 3x3"));
        }
        if width.checked_mul(height) != Some(values.len()) {
            return bad(format!("expected {} values, found {}", width.saturating_mul(height), values.len()));
        }
        if !(spacing.is_finite() && spacing > 0.0) {
            return bad(format!("spacing {spacing}"));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return bad(format!("non-finite value at {i}"));
        }
        let g = ScalarGrid { width, height, spacing, values };
        if let Some(i) = g.ring().find(|&i| g.values[i] != 0.0) {
            return Err(IngestError::NonzeroBoundary(i));
        }
        Ok(g)
    }

    pub fn zeros(width: usize, height: usize, spacing: f64) -> Result<Self, IngestError> {
        Self::new(width, height, spacing, vec![0.0; width.saturating_mul(height)])
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn ring(&self) -> impl Iterator<Item = usize> + '_ {
        let (w, h) = (self.width, self.height);
        (0..w * h).filter(move |&i| {
            let (x, y) = (i % w, i / w);
            x == 0 || y == 0 || x == w - 1 || y == h - 1
        })
    }

    /// Neighbors in the triangulation with diagonals along `(1, 1)`.
    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        let (w, h) = (self.width as i64, self.height as i64);
        let (x, y) = ((i as i64) % w, (i as i64) / w);
        [(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (-1, -1)].into_iter().filter_map(move |(dx, dy)| {
            let (nx, ny) = (x + dx, y + dy);
            (nx >= 0 && ny >= 0 && nx < w && ny < h).then_some((ny * w + nx) as usize)
        })
    }

    /// `width,height,spacing` header line, then one line per row.
    pub fn to_csv(&self) -> String {
        let mut s = format!("width,height,spacing\n{},{},{:e}\n", self.width, self.height, self.spacing);
        for row in self.values.chunks(self.width) {
            let r: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
            s.push_str(&r.join(","));
            s.push('\n');
        }
        s
    }

    pub fn to_binary(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(16 + 4 * self.values.len());
        out.extend_from_slice(BINARY_MAGIC);
        out.extend_from_slice(&(self.width as u32).to_le_bytes());
        out.extend_from_slice(&(self.height as u32).to_le_bytes());
        out.extend_from_slice(&(self.spacing as f32).to_le_bytes());
        for v in &self.values {
            out.extend_from_slice(&(*v as f32).to_le_bytes());
        }
        out
    }
}

fn malformed<T>(s: impl Into<String>) -> Result<T, IngestError> {
    Err(IngestError::Malformed(s.into()))
}

pub fn parse_grid_csv(data: &[u8]) -> Result<ScalarGrid, IngestError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).flexible(true).trim(csv::Trim::All).from_reader(data);
    let mut records = rdr.records();
    let mut next = || -> Result<Option<csv::StringRecord>, IngestError> {
        match records.next() {
            None => Ok(None),
            Some(r) => r.map(Some).map_err(|e| IngestError::Malformed(e.to_string())),
        }
    };
    let Some(mut head) = next()? else { return malformed("empty input") };
    if head.iter().collect::<Vec<_>>() == ["width", "height", "spacing"] {
        let Some(h) = next()? else { return malformed("missing dimensions") };
        head = h;
    }
    if head.len() != 3 {
        return malformed("header must be width,height,spacing");
    }
    let width: usize = head[0].parse().or_else(|_| malformed("width"))?;
    let height: usize = head[1].parse().or_else(|_| malformed("height"))?;
    let spacing: f64 = head[2].parse().or_else(|_| malformed("spacing"))?;
    if width.checked_mul(height).is_none_or(|n| n > 1 << 28) {
        return malformed("grid too large");
    }
    let mut values = Vec::with_capacity(width * height);
    while let Some(rec) = next()? {
        if rec.iter().all(str::is_empty) {
            continue;
        }
        if rec.len() != width {
            return malformed(format!("row of {} values, expected {width}", rec.len()));
        }
        for f in rec.iter() {
            values.push(f.parse::<f64>().or_else(|_| malformed(format!("value {f:?}")))?);
        }
    }
    ScalarGrid::new(width, height, spacing, values)
}

pub fn parse_grid_binary(data: &[u8]) -> Result<ScalarGrid, IngestError> {
    if data.len() < 16 || &data[..4] != BINARY_MAGIC {
        return malformed("missing UNLK header");
    }
    let u32_at = |o: usize| u32::from_le_bytes(data[o..o + 4].try_into().expect("4 bytes"));
    let (width, height) = (u32_at(4) as usize, u32_at(8) as usize);
    let spacing = f32::from_le_bytes(data[12..16].try_into().expect("4 bytes")) as f64;
    let body = &data[16..];
    if width.checked_mul(height).and_then(|n| n.checked_mul(4)) != Some(body.len()) {
        return malformed("payload length does not match dimensions");
    }
    let values = body.chunks_exact(4).map(|c| f32::from_le_bytes(c.try_into().expect("4 bytes")) as f64).collect();
    ScalarGrid::new(width, height, spacing, values)
}

/// Binary when the magic is present, CSV otherwise.
pub fn parse_grid(data: &[u8]) -> Result<ScalarGrid, IngestError> {
    if data.starts_with(BINARY_MAGIC) {
        parse_grid_binary(data)
    } else {
        parse_grid_csv(data)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bump() -> ScalarGrid {
        let mut v = vec![0.0; 25];
        v[12] = 1.0;
        v[7] = 0.5;
        ScalarGrid::new(5, 5, 0.5, v).unwrap()
    }

    #[test]
    fn csv_roundtrip() {
        let g = bump();
        assert_eq!(parse_grid(g.to_csv().as_bytes()).unwrap(), g);
        let bare = "3,3,1\n0,0,0\n0,0,0\n0,0,0\n";
        assert_eq!(parse_grid_csv(bare.as_bytes()).unwrap().len(), 9);
    }

    #[test]
    fn binary_roundtrip() {
        let g = bump();
        assert_eq!(parse_grid(&g.to_binary()).unwrap(), g);
        let mut b = g.to_binary();
        b.pop();
        assert!(matches!(parse_grid(&b), Err(IngestError::Malformed(_))));
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(matches!(parse_grid(b"3,3,1\n0,0,0\n0,1,0\n"), Err(IngestError::Malformed(_))));
        assert!(matches!(parse_grid(b"3,3,1\n0,0,0\n0,0,1\n0,0,0\n"), Err(IngestError::NonzeroBoundary(5))));
        assert!(matches!(parse_grid(b"3,3,-1\n0,0,0\n0,0,0\n0,0,0\n"), Err(IngestError::Malformed(_))));
        assert!(matches!(parse_grid(b""), Err(IngestError::Malformed(_))));
        assert!(matches!(parse_grid(b"UNLK"), Err(IngestError::Malformed(_))));
    }

    #[test]
    fn six_neighbors() {
        let g = bump();
        let mut n: Vec<usize> = g.neighbors(12).collect();
        n.sort();
        assert_eq!(n, vec![6, 7, 11, 13, 17, 18]);
        assert_eq!(g.neighbors(0).count(), 3);
    }
}
