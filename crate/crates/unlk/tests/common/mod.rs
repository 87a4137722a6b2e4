#![allow(dead_code)]

use num_traits::Zero;
use rand::Rng;
use unlk::morse_tree::{spectrum, validate_tree, Node, NodeKind, Outer, PlaneTree, TreeEdge};
use unlk::profile::{Annulus, RhoProfile};
use unlk::rational::{q, qi, Q};
use unlk::reeb_surface::{validate_surface, SEdge, SVertex, SurfaceReebGraph};

pub fn rand_q<R: Rng>(rng: &mut R, lo: i64, hi: i64, den: i64) -> Q {
    let d = rng.gen_range(1..=den);
    q(rng.gen_range(lo * d..=hi * d), d)
}

fn positive_q<R: Rng>(rng: &mut R, max: i64) -> Q {
    let d = rng.gen_range(1..=7);
    q(rng.gen_range(1..=max * d), d)
}

struct Shape {
    saddle: bool,
    /// +1 when levels increase going inward along the edge above this node.
    dir: i64,
    kids: Vec<Shape>,
}

fn shape<R: Rng>(rng: &mut R, depth: u32, dir: i64) -> Shape {
    if depth > 1 && rng.gen_bool(0.7) {
        let dirs = if rng.gen_bool(0.6) { [dir, dir] } else if rng.gen_bool(0.5) { [dir, -dir] } else { [-dir, dir] };
        Shape { saddle: true, dir, kids: dirs.iter().map(|&d| shape(rng, depth - 1, d)).collect() }
    } else {
        Shape { saddle: false, dir, kids: vec![] }
    }
}

struct Builder {
    nodes: Vec<Node>,
    edges: Vec<TreeEdge>,
}

/// Returns the area enclosed by the subtree's outer contour; levels are
/// filled in later.
fn place<R: Rng>(rng: &mut R, s: &Shape, b: &mut Builder, outer: Outer, rho_max: i64) -> (usize, Q) {
    let v = b.nodes.len();
    b.nodes.push(Node {
        name: format!("v{v}"),
        kind: if s.saddle { NodeKind::Saddle } else { NodeKind::Extremum },
        level: Q::zero(),
    });
    let e = b.edges.len();
    b.edges.push(TreeEdge {
        name: format!("e{e}"),
        inner: v,
        outer,
        annulus: Annulus::new(RhoProfile::new(vec![(Q::zero(), Q::zero()), (q(1, 1), Q::zero())]).unwrap(), Q::zero()),
    });
    let mut lo = Q::zero();
    for k in &s.kids {
        let (_, a) = place(rng, k, b, Outer::Node(v), rho_max);
        lo += a;
    }
    let hi = &lo + positive_q(rng, 1) / q(2, 1);
    // rho = sign * shape, sign opposite to the inward direction
    let sign = Q::from_integer((-s.dir).into());
    let mut pts = vec![(lo.clone(), if s.saddle || rng.gen_bool(0.1) { Q::zero() } else { positive_q(rng, rho_max) })];
    let m = if s.saddle || rng.gen_bool(0.5) { rng.gen_range(1..=3) } else { 0 };
    let mut xs: Vec<Q> = (0..m).map(|_| &lo + (&hi - &lo) * q(rng.gen_range(1..100), 100)).collect();
    xs.sort();
    xs.dedup();
    for x in xs {
        pts.push((x, positive_q(rng, rho_max)));
    }
    pts.push((hi.clone(), Q::zero()));
    let pts = pts.into_iter().map(|(x, y)| (x, y * &sign)).collect();
    b.edges[e].annulus = Annulus::new(RhoProfile::new(pts).unwrap(), Q::zero());
    (e, hi)
}

fn assign_levels(b: &mut Builder, edge: usize, outer_level: Q) {
    let a = &b.edges[edge].annulus;
    let inner_level = &outer_level - a.profile.pl().total();
    b.edges[edge].annulus.geom.level_at_lo = inner_level.clone();
    let v = b.edges[edge].inner;
    b.nodes[v].level = inner_level.clone();
    let kids: Vec<usize> = (0..b.edges.len()).filter(|&i| b.edges[i].outer == Outer::Node(v)).collect();
    for k in kids {
        assign_levels(b, k, inner_level.clone());
    }
}

/// A random valid tree with saddle depth < `depth` and at most
/// `max_negative` negative fixed points.
pub fn random_tree<R: Rng>(rng: &mut R, depth: u32, max_negative: usize) -> PlaneTree {
    loop {
        let dir = if rng.gen_bool(0.7) { 1 } else { -1 };
        let s = shape(rng, depth, dir);
        let mut b = Builder { nodes: vec![], edges: vec![] };
        let rho_max = rng.gen_range(1..=3);
        let (root, _) = place(rng, &s, &mut b, Outer::Boundary, rho_max);
        assign_levels(&mut b, root, Q::zero());
        let t = PlaneTree { nodes: b.nodes, edges: b.edges };
        if !validate_tree(&t).is_empty() {
            continue;
        }
        let Ok(spec) = spectrum(&t) else { continue };
        let negs = spec.iter().filter(|e| e.negative).count() - 1;
        if negs <= max_negative {
            return t;
        }
    }
}

/// Single extremum with `rho(0) = 0` falling to one minimum at an interior
/// breakpoint, then rising to 0 at the boundary area `A`. The minimum lies
/// below -2, so the top level `|min| A / 2` exceeds `A`. Returns the tree and
/// the larger-area solution of `rho = -1`.
pub fn random_simple_bump<R: Rng>(rng: &mut R) -> (PlaneTree, Q) {
    let area = positive_q(rng, 2);
    let at = &area * q(rng.gen_range(1..10), 10);
    let low = -(qi(2) + positive_q(rng, 2));
    let pts = vec![(Q::zero(), Q::zero()), (at.clone(), low.clone()), (area.clone(), Q::zero())];
    // rho = low (area - a) / (area - at) = -1
    let a1 = &area - (&area - &at) / (-&low);
    (unlk::morse_tree::models::radial(pts).unwrap(), a1)
}

/// Nonnegative slope profile on `[alpha, beta]`, zero at both ends.
pub fn random_truncation_profile<R: Rng>(rng: &mut R) -> RhoProfile {
    loop {
        let alpha = q(rng.gen_range(1..=4), 2);
        let n = rng.gen_range(1..=4);
        let mut xs: Vec<Q> = (0..n).map(|_| &alpha + q(rng.gen_range(1..200), 100)).collect();
        xs.sort();
        xs.dedup();
        let beta = &alpha + qi(2);
        let mut pts = vec![(alpha.clone(), Q::zero())];
        for x in xs {
            pts.push((x, q(rng.gen_range(1..=40), rng.gen_range(1..=10))));
        }
        pts.push((beta, Q::zero()));
        let p = RhoProfile::new(pts).unwrap();
        if unlk::deformations::TruncationData::new(&p).is_ok() {
            return p;
        }
    }
}

/// Random surface graph of the given genus: a cycle of saddles with
/// `genus - 1` chords, and a random plane tree hanging off every saddle of
/// core degree two.
pub fn random_surface<R: Rng>(rng: &mut R, genus: u32) -> SurfaceReebGraph {
    loop {
        let chords = 2 * (genus as usize - 1);
        let n = rng.gen_range(chords.max(1) + 1..=chords + 4).max(2);
        let mut g = SurfaceReebGraph { genus, vertices: vec![], edges: vec![] };
        for i in 0..n {
            let level = q(rng.gen_range(-40..=40), rng.gen_range(1..=4));
            g.vertices.push(SVertex { id: format!("s{i}"), kind: NodeKind::Saddle, level });
        }
        for i in 0..n {
            g.edges.push(SEdge { id: format!("c{i}"), ends: [i, (i + 1) % n], annulus: None });
        }
        let mut free: Vec<usize> = (0..n).collect();
        for j in 0..genus as usize - 1 {
            let a = free.remove(rng.gen_range(0..free.len()));
            let b = free.remove(rng.gen_range(0..free.len()));
            g.edges.push(SEdge { id: format!("x{j}"), ends: [a, b], annulus: None });
        }
        for s in free {
            let base = g.vertices[s].level.clone();
            let t = random_tree(rng, 3, 8);
            let offset = g.vertices.len();
            for node in &t.nodes {
                g.vertices.push(SVertex { id: format!("d{s}-{}", node.name), kind: node.kind, level: &node.level + &base });
            }
            for e in &t.edges {
                let outer = match e.outer {
                    Outer::Boundary => s,
                    Outer::Node(o) => offset + o,
                };
                g.edges.push(SEdge {
                    id: format!("d{s}-{}", e.name),
                    ends: [offset + e.inner, outer],
                    annulus: Some(e.annulus.shifted(&base)),
                });
            }
        }
        if validate_surface(&g).is_empty() {
            return g;
        }
    }
}
