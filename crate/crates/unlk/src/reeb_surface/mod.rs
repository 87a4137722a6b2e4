//! Reeb graphs of Morse-like functions on closed surfaces of genus at least one.

pub mod models;

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use thiserror::Error;

use crate::morse_tree::{nu_recursive, validate_tree, Node, NodeKind, Outer, PlaneTree, TreeDiagnostic, TreeEdge, TreeError};
use crate::profile::Annulus;
use crate::rational::Q;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SVertex {
    pub id: String,
    pub kind: NodeKind,
    pub level: Q,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SEdge {
    pub id: String,
    pub ends: [usize; 2],
    pub annulus: Option<Annulus>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurfaceReebGraph {
    pub genus: u32,
    pub vertices: Vec<SVertex>,
    pub edges: Vec<SEdge>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SurfaceDiagnostic {
    GenusZero,
    DuplicateId(String),
    UnknownVertex { edge: usize },
    SelfLoop { edge: usize },
    ExtremumDegree { vertex: usize, degree: usize },
    SaddleDegree { vertex: usize, degree: usize },
    PoincareHopf { extrema: usize, saddles: usize, genus: u32 },
    DuplicateLevel { a: usize, b: usize },
    Disconnected,
    EmptyCore,
    MissingProfile { edge: usize },
    Disk { attachment: usize, diagnostics: Vec<TreeDiagnostic> },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SurfaceError {
    #[error("invalid surface graph: {0:?}")]
    Invalid(Vec<SurfaceDiagnostic>),
    #[error("stripping free ends consumed the whole graph")]
    EmptyCore,
    #[error("no disk components")]
    NoDisks,
    #[error("edge {0} needs profile data")]
    MissingProfile(String),
    #[error("unknown cell {0}")]
    UnknownCell(String),
    #[error("no threshold clears the core")]
    ScanInconclusive,
    #[error(transparent)]
    Tree(#[from] TreeError),
}

/// A disk component hanging off one essential saddle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Disk {
    pub attachment: usize,
    pub boundary_level: Q,
    /// Edge joining the attachment saddle to the disk.
    pub root_edge: usize,
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiskDecomposition {
    pub core_vertices: Vec<usize>,
    pub core_edges: Vec<usize>,
    pub disks: Vec<Disk>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StripOrder {
    LowestFirst,
    HighestFirst,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Cell {
    Vertex(String),
    Edge(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZetaScan {
    pub value: Q,
    /// No threshold below the answer was available for refinement.
    pub coarse: bool,
}

impl SurfaceReebGraph {
    fn degree(&self, v: usize) -> usize {
        self.edges.iter().map(|e| e.ends.iter().filter(|&&x| x == v).count()).sum()
    }

    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v.id == id)
    }

    pub fn negated(&self) -> SurfaceReebGraph {
        let mut g = self.clone();
        for v in &mut g.vertices {
            v.level = -&v.level;
        }
        for e in &mut g.edges {
            e.annulus = e.annulus.as_ref().map(Annulus::negated);
        }
        g
    }

    pub fn shifted(&self, r: &Q) -> SurfaceReebGraph {
        let mut g = self.clone();
        for v in &mut g.vertices {
            v.level += r;
        }
        for e in &mut g.edges {
            e.annulus = e.annulus.as_ref().map(|a| a.shifted(r));
        }
        g
    }
}

fn structural(g: &SurfaceReebGraph) -> Vec<SurfaceDiagnostic> {
    use SurfaceDiagnostic::*;
    let mut d = Vec::new();
    if g.genus == 0 {
        d.push(GenusZero);
    }
    let mut ids = BTreeSet::new();
    for id in g.vertices.iter().map(|v| &v.id).chain(g.edges.iter().map(|e| &e.id)) {
        if !ids.insert(id) {
            d.push(DuplicateId(id.clone()));
        }
    }
    let n = g.vertices.len();
    for (i, e) in g.edges.iter().enumerate() {
        if e.ends.iter().any(|&v| v >= n) {
            d.push(UnknownVertex { edge: i });
        } else if e.ends[0] == e.ends[1] {
            d.push(SelfLoop { edge: i });
        }
    }
    if !d.is_empty() {
        return d;
    }
    let (mut ext, mut sad) = (0usize, 0usize);
    for (i, v) in g.vertices.iter().enumerate() {
        let deg = g.degree(i);
        match v.kind {
            NodeKind::Extremum => {
                ext += 1;
                if deg != 1 {
                    d.push(ExtremumDegree { vertex: i, degree: deg });
                }
            }
            NodeKind::Saddle => {
                sad += 1;
                if deg != 3 {
                    d.push(SaddleDegree { vertex: i, degree: deg });
                }
            }
        }
    }
    if ext as i64 - sad as i64 != 2 - 2 * g.genus as i64 {
        d.push(PoincareHopf { extrema: ext, saddles: sad, genus: g.genus });
    }
    let mut seen: BTreeMap<&Q, usize> = BTreeMap::new();
    for (i, v) in g.vertices.iter().enumerate() {
        if let Some(&j) = seen.get(&v.level) {
            d.push(DuplicateLevel { a: j, b: i });
        } else {
            seen.insert(&v.level, i);
        }
    }
    if n > 0 {
        let mut reach = vec![false; n];
        let mut stack = vec![0];
        reach[0] = true;
        while let Some(v) = stack.pop() {
            for e in &g.edges {
                if e.ends.contains(&v) {
                    let w = if e.ends[0] == v { e.ends[1] } else { e.ends[0] };
                    if !reach[w] {
                        reach[w] = true;
                        stack.push(w);
                    }
                }
            }
        }
        if reach.iter().any(|r| !r) {
            d.push(Disconnected);
        }
    }
    d
}

pub fn validate_surface(g: &SurfaceReebGraph) -> Vec<SurfaceDiagnostic> {
    let mut d = structural(g);
    if !d.is_empty() {
        return d;
    }
    let dec = match strip(g, StripOrder::LowestFirst) {
        Ok(dec) => dec,
        Err(_) => return vec![SurfaceDiagnostic::EmptyCore],
    };
    for disk in &dec.disks {
        for &e in &disk.edges {
            if g.edges[e].annulus.is_none() {
                d.push(SurfaceDiagnostic::MissingProfile { edge: e });
            }
        }
    }
    if !d.is_empty() {
        return d;
    }
    for disk in &dec.disks {
        let t = disk_tree(g, disk).expect("profiles checked");
        let diagnostics = validate_tree(&t);
        if !diagnostics.is_empty() {
            d.push(SurfaceDiagnostic::Disk { attachment: disk.attachment, diagnostics });
        }
    }
    d
}

fn ensure_structure(g: &SurfaceReebGraph) -> Result<(), SurfaceError> {
    let d = structural(g);
    if d.is_empty() {
        Ok(())
    } else {
        Err(SurfaceError::Invalid(d))
    }
}

fn strip(g: &SurfaceReebGraph, order: StripOrder) -> Result<DiskDecomposition, SurfaceError> {
    let n = g.vertices.len();
    let mut deg: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut alive_v = vec![true; n];
    let mut alive_e = vec![true; g.edges.len()];
    let mut leaves: BTreeSet<usize> = (0..n).filter(|&v| deg[v] == 1).collect();
    loop {
        let next = match order {
            StripOrder::LowestFirst => leaves.iter().next().copied(),
            StripOrder::HighestFirst => leaves.iter().next_back().copied(),
        };
        let Some(v) = next else { break };
        leaves.remove(&v);
        alive_v[v] = false;
        for (i, e) in g.edges.iter().enumerate() {
            if alive_e[i] && e.ends.contains(&v) {
                alive_e[i] = false;
                let w = if e.ends[0] == v { e.ends[1] } else { e.ends[0] };
                deg[w] -= 1;
                deg[v] -= 1;
                if alive_v[w] && deg[w] == 1 {
                    leaves.insert(w);
                }
            }
        }
    }
    let core_vertices: Vec<usize> = (0..n).filter(|&v| alive_v[v]).collect();
    if core_vertices.is_empty() {
        return Err(SurfaceError::EmptyCore);
    }
    let core_edges: Vec<usize> = (0..g.edges.len()).filter(|&e| alive_e[e]).collect();
    let mut disks = Vec::new();
    for &c in &core_vertices {
        for (i, e) in g.edges.iter().enumerate() {
            if alive_e[i] || !e.ends.contains(&c) {
                continue;
            }
            let mut vertices = Vec::new();
            let mut edges = vec![i];
            let first = if e.ends[0] == c { e.ends[1] } else { e.ends[0] };
            let mut stack = vec![(first, i)];
            while let Some((v, via)) = stack.pop() {
                vertices.push(v);
                for (j, f) in g.edges.iter().enumerate() {
                    if j != via && f.ends.contains(&v) {
                        let w = if f.ends[0] == v { f.ends[1] } else { f.ends[0] };
                        edges.push(j);
                        stack.push((w, j));
                    }
                }
            }
            vertices.sort_unstable();
            edges.sort_unstable();
            disks.push(Disk {
                attachment: c,
                boundary_level: g.vertices[c].level.clone(),
                root_edge: i,
                vertices,
                edges,
            });
        }
    }
    Ok(DiskDecomposition { core_vertices, core_edges, disks })
}

pub fn core_graph(g: &SurfaceReebGraph) -> Result<DiskDecomposition, SurfaceError> {
    core_graph_with_order(g, StripOrder::LowestFirst)
}

pub fn core_graph_with_order(g: &SurfaceReebGraph, order: StripOrder) -> Result<DiskDecomposition, SurfaceError> {
    ensure_structure(g)?;
    strip(g, order)
}

/// The disk as a plane tree: the attachment edge becomes the root and all
/// levels are measured from the attachment saddle.
pub fn disk_tree(g: &SurfaceReebGraph, disk: &Disk) -> Result<PlaneTree, SurfaceError> {
    let base = &disk.boundary_level;
    let mut index: BTreeMap<usize, usize> = BTreeMap::new();
    let mut nodes = Vec::new();
    let mut edges = Vec::new();
    // parent first, walking away from the attachment
    let mut stack = vec![(disk.root_edge, disk.attachment)];
    while let Some((e, parent)) = stack.pop() {
        let se = &g.edges[e];
        let child = if se.ends[0] == parent { se.ends[1] } else { se.ends[0] };
        let v = &g.vertices[child];
        index.insert(child, nodes.len());
        nodes.push(Node { name: v.id.clone(), kind: v.kind, level: &v.level - base });
        let outer = if parent == disk.attachment { Outer::Boundary } else { Outer::Node(index[&parent]) };
        let annulus = se.annulus.as_ref().ok_or_else(|| SurfaceError::MissingProfile(se.id.clone()))?;
        let shift = -base.clone();
        edges.push(TreeEdge { name: se.id.clone(), inner: index[&child], outer, annulus: annulus.shifted(&shift) });
        for (j, f) in g.edges.iter().enumerate().rev() {
            if j != e && f.ends.contains(&child) {
                stack.push((j, child));
            }
        }
    }
    Ok(PlaneTree { nodes, edges })
}

pub fn nu_surface(g: &SurfaceReebGraph) -> Result<Q, SurfaceError> {
    let dec = core_graph(g)?;
    if dec.disks.is_empty() {
        return Err(SurfaceError::NoDisks);
    }
    let vals: Vec<Result<Q, SurfaceError>> = dec
        .disks
        .par_iter()
        .map(|d| Ok(&d.boundary_level + nu_recursive(&disk_tree(g, d)?)?))
        .collect();
    let mut best: Option<Q> = None;
    for v in vals {
        let v = v?;
        best = Some(best.map_or(v.clone(), |b| b.max(v)));
    }
    Ok(best.expect("nonempty"))
}

pub fn zeta(g: &SurfaceReebGraph) -> Result<Q, SurfaceError> {
    let dec = core_graph(g)?;
    Ok(dec.core_vertices.iter().map(|&v| g.vertices[v].level.clone()).max().expect("nonempty core"))
}

/// Does `{H > t}` avoid every core cell?
fn clears(g: &SurfaceReebGraph, dec: &DiskDecomposition, t: &Q) -> bool {
    dec.core_vertices.iter().all(|&v| &g.vertices[v].level <= t)
}

pub fn zeta_scan(g: &SurfaceReebGraph, thresholds: &[Q]) -> Result<ZetaScan, SurfaceError> {
    let dec = core_graph(g)?;
    let mut ts = thresholds.to_vec();
    ts.sort();
    ts.dedup();
    let j = ts.iter().position(|t| clears(g, &dec, t)).ok_or(SurfaceError::ScanInconclusive)?;
    if j == 0 {
        return Ok(ZetaScan { value: ts[0].clone(), coarse: true });
    }
    let mut crit: Vec<&Q> = g.vertices.iter().map(|v| &v.level).filter(|l| *l > &ts[j - 1] && *l <= &ts[j]).collect();
    crit.sort();
    let value = crit.into_iter().find(|c| clears(g, &dec, c)).cloned().unwrap_or_else(|| ts[j].clone());
    Ok(ZetaScan { value, coarse: false })
}

fn core_cells(g: &SurfaceReebGraph, dec: &DiskDecomposition) -> BTreeSet<Cell> {
    dec.core_vertices
        .iter()
        .map(|&v| Cell::Vertex(g.vertices[v].id.clone()))
        .chain(dec.core_edges.iter().map(|&e| Cell::Edge(g.edges[e].id.clone())))
        .collect()
}

fn check_cells(g: &SurfaceReebGraph, cells: &[Cell]) -> Result<(), SurfaceError> {
    for c in cells {
        let ok = match c {
            Cell::Vertex(id) => g.vertices.iter().any(|v| &v.id == id),
            Cell::Edge(id) => g.edges.iter().any(|e| &e.id == id),
        };
        if !ok {
            return Err(SurfaceError::UnknownCell(format!("{c:?}")));
        }
    }
    Ok(())
}

pub fn heavy(g: &SurfaceReebGraph, cells: &[Cell]) -> Result<bool, SurfaceError> {
    check_cells(g, cells)?;
    let core = core_cells(g, &core_graph(g)?);
    Ok(cells.iter().any(|c| core.contains(c)))
}

pub fn superheavy(g: &SurfaceReebGraph, cells: &[Cell]) -> Result<bool, SurfaceError> {
    check_cells(g, cells)?;
    let core = core_cells(g, &core_graph(g)?);
    let have: BTreeSet<&Cell> = cells.iter().collect();
    Ok(core.iter().all(|c| have.contains(c)))
}

/// `(max over core levels of level², max(ζ(H)², ζ(-H)²))`.
pub fn dispersion_check(g: &SurfaceReebGraph) -> Result<(Q, Q), SurfaceError> {
    let dec = core_graph(g)?;
    let lhs = dec
        .core_vertices
        .iter()
        .map(|&v| &g.vertices[v].level * &g.vertices[v].level)
        .max()
        .expect("nonempty core");
    let zp = zeta(g)?;
    let zn = zeta(&g.negated())?;
    Ok((lhs, (&zp * &zp).max(&zn * &zn)))
}

#[cfg(test)]
mod tests {
    use super::models::{genus2_figure, torus_minimal, torus_two_disks};
    use super::*;
    use crate::rational::{q, qi};

    #[test]
    fn figure_counts() {
        let g = genus2_figure();
        assert_eq!(validate_surface(&g), vec![]);
        let d = core_graph(&g).unwrap();
        assert_eq!((d.core_vertices.len(), d.core_edges.len(), d.disks.len()), (6, 7, 4));
        assert_eq!(d, core_graph_with_order(&g, StripOrder::HighestFirst).unwrap());
    }

    #[test]
    fn torus_counts() {
        let g = torus_minimal();
        assert_eq!(validate_surface(&g), vec![]);
        let d = core_graph(&g).unwrap();
        assert_eq!((d.core_vertices.len(), d.core_edges.len(), d.disks.len()), (2, 2, 2));
    }

    #[test]
    fn cycle_without_extrema_rejected() {
        let g = SurfaceReebGraph {
            genus: 1,
            vertices: (0..3).map(|i| SVertex { id: format!("s{i}"), kind: NodeKind::Saddle, level: qi(i + 1) }).collect(),
            edges: (0..3)
                .map(|i| SEdge { id: format!("e{i}"), ends: [i, (i + 1) % 3], annulus: None })
                .collect(),
        };
        let d = validate_surface(&g);
        assert!(d.iter().any(|x| matches!(x, SurfaceDiagnostic::PoincareHopf { .. })), "{d:?}");
    }

    #[test]
    fn surface_formula() {
        assert_eq!(nu_surface(&torus_two_disks()).unwrap(), qi(1));
    }

    #[test]
    fn negative_disks_give_boundary_max() {
        let g = torus_two_disks();
        let mut h = g.clone();
        // flip each disk about its attachment level
        let dec = core_graph(&g).unwrap();
        for d in &dec.disks {
            let l = d.boundary_level.clone();
            for &v in &d.vertices {
                h.vertices[v].level = &l * qi(2) - &g.vertices[v].level;
            }
            for &e in &d.edges {
                let a = g.edges[e].annulus.as_ref().unwrap();
                h.edges[e].annulus = Some(a.negated().shifted(&(&l * qi(2))));
            }
        }
        assert_eq!(validate_surface(&h), vec![]);
        assert_eq!(nu_surface(&h).unwrap(), q(1, 2));
    }

    #[test]
    fn quasi_state() {
        let g = genus2_figure();
        assert_eq!(zeta(&g).unwrap(), qi(6));
        let ts: Vec<Q> = (0..16).map(|i| q(2 * i + 1, 2)).collect();
        assert_eq!(zeta_scan(&g, &ts).unwrap(), ZetaScan { value: qi(6), coarse: false });
        let high = [qi(10), qi(11)];
        assert_eq!(zeta_scan(&g, &high).unwrap(), ZetaScan { value: qi(10), coarse: true });
        assert_eq!(zeta(&g.shifted(&q(1, 3))).unwrap(), q(19, 3));
        assert_eq!(zeta_scan(&g, &[qi(0)]), Err(SurfaceError::ScanInconclusive));
    }

    #[test]
    fn dispersion() {
        let mut g = torus_minimal();
        let (a, b) = dispersion_check(&g).unwrap();
        assert_eq!(a, b);
        let s: Vec<usize> = (0..g.vertices.len()).filter(|&v| g.vertices[v].kind == NodeKind::Saddle).collect();
        g.vertices[s[0]].level = qi(-3);
        let (a, b) = dispersion_check(&g).unwrap();
        assert_eq!((a, b), (qi(9), qi(9)));
    }

    #[test]
    fn heaviness() {
        let g = torus_minimal();
        let dec = core_graph(&g).unwrap();
        let e0 = Cell::Edge(g.edges[dec.core_edges[0]].id.clone());
        assert!(heavy(&g, std::slice::from_ref(&e0)).unwrap());
        assert!(!superheavy(&g, &[e0]).unwrap());
        let all: Vec<Cell> = core_cells(&g, &dec).into_iter().collect();
        assert!(superheavy(&g, &all).unwrap());
        let disk = &dec.disks[0];
        let cells: Vec<Cell> = disk
            .vertices
            .iter()
            .map(|&v| Cell::Vertex(g.vertices[v].id.clone()))
            .chain(disk.edges.iter().map(|&e| Cell::Edge(g.edges[e].id.clone())))
            .collect();
        assert!(!heavy(&g, &cells).unwrap());
        assert!(!superheavy(&g, &cells).unwrap());
        assert!(matches!(heavy(&g, &[Cell::Vertex("nope".into())]), Err(SurfaceError::UnknownCell(_))));
    }

    #[test]
    fn disk_spectrum_is_shifted() {
        let g = torus_two_disks();
        let dec = core_graph(&g).unwrap();
        for d in &dec.disks {
            let t = disk_tree(&g, d).unwrap();
            for (i, e) in d.edges.iter().enumerate() {
                let orig = g.edges[*e].annulus.as_ref().unwrap();
                let te = t.edges.iter().find(|x| x.name == g.edges[*e].id).unwrap();
                assert_eq!(te.annulus.geom.level_at_lo, &orig.geom.level_at_lo - &d.boundary_level, "{i}");
            }
        }
    }
}
