//! Scalar fields whose superlevel areas follow a given plane tree.

use std::f64::consts::PI;

use super::{IngestError, ScalarGrid};
use crate::morse_tree::{NodeKind, Outer, PlaneTree};
use crate::profile::Annulus;
use crate::rational::to_f64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RasterOptions {
    pub size: usize,
    /// Empty cells kept around the support on each side.
    pub margin: usize,
}

impl Default for RasterOptions {
    fn default() -> Self {
        RasterOptions { size: 512, margin: 3 }
    }
}

/// Level as a function of enclosed area along one edge, in floats.
struct LevelFn {
    xs: Vec<f64>,
    ys: Vec<f64>,
    acc: Vec<f64>,
    base: f64,
}

impl LevelFn {
    fn new(a: &Annulus) -> Self {
        let pts = a.profile.breakpoints();
        let xs: Vec<f64> = pts.iter().map(|p| to_f64(&p.0)).collect();
        let ys: Vec<f64> = pts.iter().map(|p| to_f64(&p.1)).collect();
        let mut acc = vec![0.0];
        for i in 1..xs.len() {
            acc.push(acc[i - 1] + (ys[i] + ys[i - 1]) / 2.0 * (xs[i] - xs[i - 1]));
        }
        LevelFn { xs, ys, acc, base: to_f64(&a.geom.level_at_lo) }
    }

    fn lo(&self) -> f64 {
        self.xs[0]
    }

    fn hi(&self) -> f64 {
        *self.xs.last().expect("two points")
    }

    fn at(&self, a: f64) -> f64 {
        let a = a.clamp(self.lo(), self.hi());
        let i = self.xs.partition_point(|&x| x <= a).clamp(1, self.xs.len() - 1);
        let (x0, y0) = (self.xs[i - 1], self.ys[i - 1]);
        let slope = (self.ys[i] - y0) / (self.xs[i] - x0);
        let d = a - x0;
        self.base + self.acc[i - 1] + y0 * d + slope * d * d / 2.0
    }
}

fn lens(r0: f64, r1: f64, d: f64) -> f64 {
    if d >= r0 + r1 {
        return 0.0;
    }
    if d <= (r0 - r1).abs() {
        return PI * r0.min(r1).powi(2);
    }
    let a0 = ((d * d + r0 * r0 - r1 * r1) / (2.0 * d * r0)).clamp(-1.0, 1.0).acos();
    let a1 = ((d * d + r1 * r1 - r0 * r0) / (2.0 * d * r1)).clamp(-1.0, 1.0).acos();
    let k = ((-d + r0 + r1) * (d + r0 - r1) * (d - r0 + r1) * (d + r0 + r1)).max(0.0).sqrt();
    r0 * r0 * a0 + r1 * r1 * a1 - k / 2.0
}

enum Shape {
    /// One extremum: concentric disks.
    Radial { f: LevelFn },
    /// A saddle with two extremum children: two tangent disks, then their
    /// common offsets.
    Twin { outer: LevelFn, f0: LevelFn, f1: LevelFn, r0: f64, r1: f64 },
}

impl Shape {
    fn of(t: &PlaneTree) -> Result<Self, IngestError> {
        let unsupported = || IngestError::Unsupported("only one extremum, or one saddle over two extrema".into());
        let root = t.root_edge().ok_or_else(unsupported)?;
        let top = &t.edges[root];
        match t.nodes[top.inner].kind {
            NodeKind::Extremum if t.edges.len() == 1 => Ok(Shape::Radial { f: LevelFn::new(&top.annulus) }),
            NodeKind::Saddle if t.edges.len() == 3 => {
                let kids: Vec<&Annulus> = t.edges.iter().filter(|e| e.outer == Outer::Node(top.inner)).map(|e| &e.annulus).collect();
                if kids.len() != 2 {
                    return Err(unsupported());
                }
                let (f0, f1) = (LevelFn::new(kids[0]), LevelFn::new(kids[1]));
                let (r0, r1) = ((f0.hi() / PI).sqrt(), (f1.hi() / PI).sqrt());
                Ok(Shape::Twin { outer: LevelFn::new(&top.annulus), f0, f1, r0, r1 })
            }
            _ => Err(unsupported()),
        }
    }

    /// Half-width and half-height of the support, and its center offset.
    fn extent(&self) -> (f64, f64, f64) {
        match self {
            Shape::Radial { f } => {
                let r = (f.hi() / PI).sqrt();
                (r, r, 0.0)
            }
            Shape::Twin { outer, r0, r1, .. } => {
                let t = self.offset_for(outer.hi());
                let (x0, x1) = (-2.0 * r0 - t, 2.0 * r1 + t);
                ((x1 - x0) / 2.0, r0.max(*r1) + t, (x0 + x1) / 2.0)
            }
        }
    }

    fn offset_area(&self, t: f64) -> f64 {
        match self {
            Shape::Twin { r0, r1, .. } => {
                let (a, b) = (r0 + t, r1 + t);
                PI * (a * a + b * b) - lens(a, b, r0 + r1)
            }
            Shape::Radial { .. } => unreachable!(),
        }
    }

    fn offset_for(&self, area: f64) -> f64 {
        let (mut lo, mut hi) = (0.0, 1.0);
        while self.offset_area(hi) < area {
            hi *= 2.0;
        }
        for _ in 0..100 {
            let mid = (lo + hi) / 2.0;
            if self.offset_area(mid) < area {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    }

    fn value(&self, x: f64, y: f64) -> f64 {
        match self {
            Shape::Radial { f } => {
                let a = PI * (x * x + y * y);
                if a >= f.hi() {
                    0.0
                } else {
                    f.at(a)
                }
            }
            Shape::Twin { outer, f0, f1, r0, r1 } => {
                let d0 = ((x + r0).powi(2) + y * y).sqrt();
                let d1 = ((x - r1).powi(2) + y * y).sqrt();
                if d0 < *r0 {
                    return f0.at(PI * d0 * d0);
                }
                if d1 < *r1 {
                    return f1.at(PI * d1 * d1);
                }
                let a = self.offset_area((d0 - r0).min(d1 - r1));
                if a >= outer.hi() {
                    0.0
                } else {
                    outer.at(a)
                }
            }
        }
    }
}

/// Samples a square grid covering the support of a field realising `t`.
/// The disks are tangent at the origin; the grid is shifted off-lattice to
/// avoid symmetric ties.
pub fn rasterize(t: &PlaneTree, opts: RasterOptions) -> Result<ScalarGrid, IngestError> {
    let shape = Shape::of(t)?;
    let n = opts.size;
    if n < 2 * opts.margin + 3 {
        return Err(IngestError::Unsupported(format!("grid size {n}")));
    }
    let (hw, hh, cx) = shape.extent();
    let half = hw.max(hh);
    let spacing = 2.0 * half / (n - 2 * opts.margin - 1) as f64;
    let (jx, jy) = (std::f64::consts::FRAC_1_PI * spacing, 0.141_421_356 * spacing);
    let mid = (n - 1) as f64 / 2.0;
    let mut values = vec![0.0; n * n];
    for j in 0..n {
        for i in 0..n {
            if i == 0 || j == 0 || i == n - 1 || j == n - 1 {
                continue;
            }
            let x = cx + (i as f64 - mid) * spacing + jx;
            let y = (j as f64 - mid) * spacing + jy;
            values[j * n + i] = shape.value(x, y);
        }
    }
    ScalarGrid::new(n, n, spacing, values)
}
