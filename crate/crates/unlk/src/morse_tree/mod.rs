//! Nested-disk trees for compactly supported Hamiltonians on the plane.

mod oracle;
mod recursion;
pub mod models;

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::profile::{fixed_points, validate_profile, Annulus, OrbitPoint, ProfileDiagnostic, ProfileError};
use crate::rational::{qi, Q};

pub use oracle::{enumerate_mnus, nu_oracle, nu_oracle_capped, Mnus, DEFAULT_CAP};
pub use recursion::{c_recursive, nu_forest, nu_recursive};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeKind {
    Extremum,
    Saddle,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Node {
    pub name: String,
    pub kind: NodeKind,
    pub level: Q,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outer {
    Boundary,
    Node(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TreeEdge {
    pub name: String,
    pub inner: usize,
    pub outer: Outer,
    pub annulus: Annulus,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct PlaneTree {
    pub nodes: Vec<Node>,
    pub edges: Vec<TreeEdge>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum End {
    Inner,
    Outer,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TreeDiagnostic {
    NoBoundaryEdge,
    MultipleBoundaryEdges(usize),
    UnknownNode { edge: usize },
    ParentCount { node: usize, count: usize },
    ExtremumDegree { node: usize, degree: usize },
    SaddleDegree { node: usize, degree: usize },
    NotConnected { node: usize },
    DuplicateLevel { a: usize, b: usize },
    SaddleAtZeroLevel { node: usize },
    ExtremumAtZeroLevel { node: usize },
    GeometryMismatch { edge: usize },
    LevelMismatch { edge: usize, end: End },
    LeafAreaNonzero { edge: usize },
    AreaMismatch { edge: usize },
    NonzeroEndRho { edge: usize, end: End },
    SaddleSectors { node: usize },
    Profile { edge: usize, diag: ProfileDiagnostic },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("invalid tree: {0:?}")]
    InvalidTree(Vec<TreeDiagnostic>),
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error("{count} negative fixed points exceed the cap {cap}")]
    TooLarge { count: usize, cap: usize },
    #[error("not a fixed point of this model")]
    InvalidPoint,
}

/// Where a fixed point of the time-one map comes from.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Source {
    Trivial,
    Critical(usize),
    Orbit(OrbitPoint),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectrumEntry {
    pub source: Source,
    pub action: Q,
    pub rho: Q,
    pub negative: bool,
}

impl PlaneTree {
    pub fn empty() -> Self {
        PlaneTree::default()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty() && self.edges.is_empty()
    }

    pub fn root_edge(&self) -> Option<usize> {
        self.edges.iter().position(|e| e.outer == Outer::Boundary)
    }

    /// The edge whose inner end is `node`.
    pub fn up_edge(&self, node: usize) -> Option<usize> {
        self.edges.iter().position(|e| e.inner == node)
    }

    /// Edges whose outer end is `node`, in edge order.
    pub fn child_edges(&self, node: usize) -> Vec<usize> {
        (0..self.edges.len()).filter(|&i| self.edges[i].outer == Outer::Node(node)).collect()
    }

    pub fn outer_level(&self, edge: usize) -> Q {
        match self.edges[edge].outer {
            Outer::Boundary => Q::zero(),
            Outer::Node(n) => self.nodes[n].level.clone(),
        }
    }

    /// Rotation number of a critical node.
    pub fn node_rho(&self, node: usize) -> Q {
        match self.nodes[node].kind {
            NodeKind::Saddle => Q::zero(),
            NodeKind::Extremum => self
                .up_edge(node)
                .map(|e| self.edges[e].annulus.profile.breakpoints()[0].1.clone())
                .unwrap_or_else(Q::zero),
        }
    }

    pub fn negated(&self) -> PlaneTree {
        PlaneTree {
            nodes: self
                .nodes
                .iter()
                .map(|n| Node { name: n.name.clone(), kind: n.kind, level: -&n.level })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| TreeEdge { annulus: e.annulus.negated(), ..e.clone() })
                .collect(),
        }
    }

    /// Edge chain from `edge` out to the boundary, `edge` first.
    pub fn chain_from(&self, edge: usize) -> Vec<usize> {
        let mut out = vec![edge];
        let mut cur = edge;
        while let Outer::Node(n) = self.edges[cur].outer {
            match self.up_edge(n) {
                Some(up) if out.len() <= self.edges.len() => {
                    out.push(up);
                    cur = up;
                }
                _ => break,
            }
        }
        out
    }

    /// True when `y` lies strictly inside the disk bounded by orbit `x`.
    pub fn encloses(&self, x: &Source, y: &Source) -> bool {
        let Source::Orbit(xo) = x else { return false };
        let (start, same_edge_area) = match y {
            Source::Trivial => return false,
            Source::Critical(v) => match self.up_edge(*v) {
                Some(e) => (e, None),
                None => return false,
            },
            Source::Orbit(yo) => (yo.edge_id, Some(&yo.area)),
        };
        if start == xo.edge_id {
            return match same_edge_area {
                None => true,
                Some(a) => a < &xo.area,
            };
        }
        self.chain_from(start).contains(&xo.edge_id)
    }
}

pub fn validate_tree(t: &PlaneTree) -> Vec<TreeDiagnostic> {
    use TreeDiagnostic::*;
    let mut d = Vec::new();
    if t.is_empty() {
        return d;
    }
    let n = t.nodes.len();
    for (i, e) in t.edges.iter().enumerate() {
        if e.inner >= n || matches!(e.outer, Outer::Node(o) if o >= n) {
            d.push(UnknownNode { edge: i });
        }
    }
    if !d.is_empty() {
        return d;
    }
    match t.edges.iter().filter(|e| e.outer == Outer::Boundary).count() {
        0 => d.push(NoBoundaryEdge),
        1 => {}
        c => d.push(MultipleBoundaryEdges(c)),
    }
    for v in 0..n {
        let parents = t.edges.iter().filter(|e| e.inner == v).count();
        if parents != 1 {
            d.push(ParentCount { node: v, count: parents });
        }
        let kids = t.child_edges(v).len();
        match t.nodes[v].kind {
            NodeKind::Extremum if kids != 0 => d.push(ExtremumDegree { node: v, degree: kids + parents }),
            NodeKind::Saddle if kids != 2 => d.push(SaddleDegree { node: v, degree: kids + parents }),
            _ => {}
        }
    }
    if !d.is_empty() {
        return d;
    }
    for v in 0..n {
        let up = t.up_edge(v).expect("parent count checked");
        let chain = t.chain_from(up);
        if t.edges[*chain.last().expect("nonempty")].outer != Outer::Boundary || chain.len() > t.edges.len() {
            d.push(NotConnected { node: v });
        }
    }
    if !d.is_empty() {
        return d;
    }

    let mut seen: BTreeMap<&Q, usize> = BTreeMap::new();
    for (i, node) in t.nodes.iter().enumerate() {
        if let Some(&j) = seen.get(&node.level) {
            d.push(DuplicateLevel { a: j, b: i });
        } else {
            seen.insert(&node.level, i);
        }
        if node.level.is_zero() {
            d.push(match node.kind {
                NodeKind::Saddle => SaddleAtZeroLevel { node: i },
                NodeKind::Extremum => ExtremumAtZeroLevel { node: i },
            });
        }
    }

    for (i, e) in t.edges.iter().enumerate() {
        let a = &e.annulus;
        if &a.geom.area_lo != a.profile.area_lo() || &a.geom.area_hi != a.profile.area_hi() {
            d.push(GeometryMismatch { edge: i });
            continue;
        }
        for diag in validate_profile(&a.profile) {
            d.push(Profile { edge: i, diag });
        }
        let inner = &t.nodes[e.inner];
        if a.geom.level_at_lo != inner.level {
            d.push(LevelMismatch { edge: i, end: End::Inner });
        }
        if a.level_at_hi() != t.outer_level(i) {
            d.push(LevelMismatch { edge: i, end: End::Outer });
        }
        let bps = a.profile.breakpoints();
        if !bps[bps.len() - 1].1.is_zero() {
            d.push(NonzeroEndRho { edge: i, end: End::Outer });
        }
        match inner.kind {
            NodeKind::Extremum => {
                if !a.geom.area_lo.is_zero() {
                    d.push(LeafAreaNonzero { edge: i });
                }
            }
            NodeKind::Saddle => {
                if !bps[0].1.is_zero() {
                    d.push(NonzeroEndRho { edge: i, end: End::Inner });
                }
                let inside: Q = t
                    .child_edges(e.inner)
                    .iter()
                    .map(|&c| t.edges[c].annulus.geom.area_hi.clone())
                    .sum();
                if inside != a.geom.area_lo {
                    d.push(AreaMismatch { edge: i });
                }
            }
        }
    }

    for (v, node) in t.nodes.iter().enumerate() {
        if node.kind != NodeKind::Saddle {
            continue;
        }
        let up = t.up_edge(v).expect("checked");
        let side = |x: &Q| (x - &node.level).is_positive();
        let parent = side(&t.outer_level(up));
        let kids: Vec<bool> = t.child_edges(v).iter().map(|&c| side(&t.nodes[t.edges[c].inner].level)).collect();
        if kids.iter().all(|&k| k == parent) {
            d.push(SaddleSectors { node: v });
        }
    }
    d
}

pub(crate) fn ensure_valid(t: &PlaneTree) -> Result<(), TreeError> {
    let d = validate_tree(t);
    if d.is_empty() {
        Ok(())
    } else {
        Err(TreeError::InvalidTree(d))
    }
}

/// Full action spectrum, sorted by action (ties keep source order).
pub fn spectrum(t: &PlaneTree) -> Result<Vec<SpectrumEntry>, TreeError> {
    ensure_valid(t)?;
    let mut out = vec![SpectrumEntry { source: Source::Trivial, action: Q::zero(), rho: Q::zero(), negative: true }];
    for (i, node) in t.nodes.iter().enumerate() {
        let rho = t.node_rho(i);
        out.push(SpectrumEntry {
            source: Source::Critical(i),
            action: node.level.clone(),
            negative: !rho.is_positive(),
            rho,
        });
    }
    for (i, e) in t.edges.iter().enumerate() {
        for p in fixed_points(&e.annulus.geom, &e.annulus.profile, i)? {
            out.push(SpectrumEntry {
                action: p.action.clone(),
                rho: qi(p.k),
                negative: p.k < 0,
                source: Source::Orbit(p),
            });
        }
    }
    out.sort_by(|a, b| a.action.cmp(&b.action));
    Ok(out)
}

/// Linking number of two distinct fixed points: the rotation of the
/// enclosing orbit, or 0 when neither encloses the other.
pub fn linking_number(t: &PlaneTree, p: &Source, q: &Source) -> Result<i64, TreeError> {
    if p == q {
        return Err(TreeError::InvalidPoint);
    }
    let spec = spectrum(t)?;
    for s in [p, q] {
        if !spec.iter().any(|e| &e.source == s) {
            return Err(TreeError::InvalidPoint);
        }
    }
    Ok(match (p, q) {
        (Source::Orbit(x), _) if t.encloses(p, q) => x.k,
        (_, Source::Orbit(y)) if t.encloses(q, p) => y.k,
        _ => 0,
    })
}
