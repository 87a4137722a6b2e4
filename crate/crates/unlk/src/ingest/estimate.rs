use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rayon::prelude::*;

use super::contour::{contour_tree, prune, CtKind, ContourTree};
use super::{IngestError, ScalarGrid};
use crate::morse_tree::{validate_tree, Node, NodeKind, Outer, PlaneTree, TreeEdge};
use crate::pl::Pl;
use crate::profile::{Annulus, RhoProfile};
use crate::rational::{qi, rationalize, Q};

pub const DEFAULT_MAX_DEN: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IngestOptions {
    pub n_levels: usize,
    pub prune: Option<f64>,
    pub max_den: u64,
}

impl Default for IngestOptions {
    fn default() -> Self {
        IngestOptions { n_levels: 256, prune: None, max_den: DEFAULT_MAX_DEN }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IngestResult {
    /// One tree per component of the support.
    pub trees: Vec<PlaneTree>,
    pub extrema: usize,
    pub saddles: usize,
    pub warnings: Vec<String>,
}

/// Nearest multiple of `1/den`; a shared denominator keeps sums small.
fn rat(x: f64, den: u64) -> Q {
    Q::new(BigInt::from((x * den as f64).round() as i64), BigInt::from(den))
}

/// `(level, enclosed area)` at `n_levels` evenly spaced levels from the
/// outer end to the inner end of `edge`.
pub fn edge_samples(t: &ContourTree, edge: usize, n_levels: usize) -> Vec<(f64, f64)> {
    let e = &t.edges[edge];
    let cell = t.spacing * t.spacing;
    let (inner, outer) = (t.nodes[e.inner].level, t.nodes[e.outer].level);
    let dir = if inner > outer { 1.0 } else { -1.0 };
    let base: usize = t.child_edges(e.inner).iter().map(|&c| t.total_cells(c)).sum();
    // distances beyond the outer level, ascending
    let mut keys: Vec<f64> = e.cells.iter().map(|v| (v - outer) * dir).collect();
    keys.sort_by(f64::total_cmp);
    let n = n_levels.max(2);
    (0..n)
        .map(|j| {
            let level = outer + (inner - outer) * j as f64 / (n - 1) as f64;
            let k = (level - outer) * dir;
            let beyond = keys.len() - keys.partition_point(|&x| x <= k);
            let beyond = match j {
                0 => keys.len(),
                _ if j == n - 1 => 0,
                _ => beyond,
            };
            (level, (base + beyond) as f64 * cell)
        })
        .collect()
}

/// Area-ordered `(area, level)` points with exact ends and averaged ties.
fn area_level_points(t: &ContourTree, edge: usize, n_levels: usize) -> Vec<(f64, f64)> {
    let mut s: Vec<(f64, f64)> = edge_samples(t, edge, n_levels).into_iter().map(|(l, a)| (a, l)).collect();
    s.reverse();
    let mut out: Vec<(f64, f64, usize)> = Vec::new();
    for (a, l) in s {
        match out.last_mut() {
            Some(last) if last.0 == a => {
                last.1 += l;
                last.2 += 1;
            }
            _ => out.push((a, l, 1)),
        }
    }
    let n = out.len();
    let e = &t.edges[edge];
    out.into_iter()
        .enumerate()
        .map(|(i, (a, l, c))| {
            let l = if i == 0 {
                t.nodes[e.inner].level
            } else if i == n - 1 {
                t.nodes[e.outer].level
            } else {
                l / c as f64
            };
            (a, l)
        })
        .collect()
}

fn estimate_edge(t: &ContourTree, edge: usize, n_levels: usize, levels: &[Q], area_unit: &Q, max_den: u64) -> Annulus {
    let e = &t.edges[edge];
    let pts = area_level_points(t, edge, n_levels);
    let n = pts.len();
    let saddle_inner = t.nodes[e.inner].kind == CtKind::Saddle;
    let (lo_level, hi_level) = (&levels[e.inner], &levels[e.outer]);
    let delta = hi_level - lo_level;
    let sign = if delta.is_negative() { -1.0 } else { 1.0 };
    let cells = |a: f64| (a / (t.spacing * t.spacing)).round() as i64;
    let area = |i: usize| qi(cells(pts[i].0)) * area_unit;
    let keep_sign = |r: f64| if r == 0.0 || (r > 0.0) != (sign > 0.0) { sign / max_den as f64 } else { r };
    // secant slopes sit at interval midpoints
    let secant: Vec<f64> = (1..n).map(|i| keep_sign((pts[i].1 - pts[i - 1].1) / (pts[i].0 - pts[i - 1].0))).collect();
    let mut rho: Vec<(Q, Q)> = Vec::with_capacity(n + 1);
    let first = if saddle_inner || secant.is_empty() {
        0.0
    } else if secant.len() == 1 {
        secant[0]
    } else {
        let (m0, m1) = ((pts[0].0 + pts[1].0) / 2.0, (pts[1].0 + pts[2].0) / 2.0);
        let r = secant[0] + (secant[0] - secant[1]) * (m0 - pts[0].0) / (m1 - m0);
        if r == 0.0 || (r > 0.0) != (sign > 0.0) { secant[0] } else { r }
    };
    rho.push((area(0), rat(first, max_den)));
    for (i, s) in secant.iter().enumerate() {
        let mid = (area(i) + area(i + 1)) / qi(2);
        let mut r = rat(*s, max_den);
        if r.is_zero() {
            r = rat(sign / max_den as f64, max_den);
        }
        rho.push((mid, r));
    }
    rho.push((area(n - 1), Q::zero()));
    let pl = Pl::new(rho).expect("areas strictly increase");
    let total = pl.total();
    let pl = pl.scale(&(&delta / total));
    Annulus::new(RhoProfile::from_pl(pl.simplified()), lo_level.clone())
}

/// One plane tree per edge at the root.
pub fn estimate_profiles(t: &ContourTree, n_levels: usize, max_den: u64) -> Result<Vec<PlaneTree>, IngestError> {
    let mut levels: Vec<Q> = t.nodes.iter().map(|n| rat(n.level, max_den)).collect();
    levels[t.root()] = Q::zero();
    let sp = rationalize(t.spacing, max_den).expect("finite spacing");
    let area_unit = &sp * &sp;
    let annuli: Vec<Annulus> = (0..t.edges.len())
        .into_par_iter()
        .map(|e| estimate_edge(t, e, n_levels, &levels, &area_unit, max_den))
        .collect();
    let root = t.root();
    let mut trees = Vec::new();
    for top in t.child_edges(root) {
        let mut nodes = Vec::new();
        let mut edges = Vec::new();
        let mut stack = vec![(top, Outer::Boundary)];
        while let Some((e, outer)) = stack.pop() {
            let ce = &t.edges[e];
            let v = nodes.len();
            nodes.push(Node {
                name: format!("n{}", ce.inner),
                kind: if t.nodes[ce.inner].kind == CtKind::Saddle { NodeKind::Saddle } else { NodeKind::Extremum },
                level: levels[ce.inner].clone(),
            });
            edges.push(TreeEdge { name: format!("e{e}"), inner: v, outer, annulus: annuli[e].clone() });
            for c in t.child_edges(ce.inner).into_iter().rev() {
                stack.push((c, Outer::Node(v)));
            }
        }
        let tree = PlaneTree { nodes, edges };
        let diag = validate_tree(&tree);
        if !diag.is_empty() {
            return Err(IngestError::ValidationFailed(diag));
        }
        trees.push(tree);
    }
    Ok(trees)
}

pub fn ingest(g: &ScalarGrid, opts: IngestOptions) -> Result<IngestResult, IngestError> {
    let mut ct = contour_tree(g)?;
    if let Some(eps) = opts.prune {
        ct = prune(&ct, eps);
    }
    let mut warnings = Vec::new();
    if opts.n_levels < 3 {
        warnings.push(format!("coarse: {} levels per edge", opts.n_levels));
    }
    if ct.child_edges(ct.root()).len() > 1 {
        warnings.push(format!("support has {} components", ct.child_edges(ct.root()).len()));
    }
    let trees = estimate_profiles(&ct, opts.n_levels, opts.max_den)?;
    Ok(IngestResult { trees, extrema: ct.count(CtKind::Extremum), saddles: ct.count(CtKind::Saddle), warnings })
}
