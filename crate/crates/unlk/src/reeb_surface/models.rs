//! Reference surface graphs.

use super::{SEdge, SVertex, SurfaceReebGraph};
use crate::morse_tree::NodeKind;
use crate::profile::{Annulus, RhoProfile};
use crate::rational::{q, qi, Q};

struct Build {
    g: SurfaceReebGraph,
}

impl Build {
    fn new(genus: u32) -> Self {
        Build { g: SurfaceReebGraph { genus, vertices: vec![], edges: vec![] } }
    }

    fn vertex(&mut self, id: &str, kind: NodeKind, level: Q) -> usize {
        self.g.vertices.push(SVertex { id: id.into(), kind, level });
        self.g.vertices.len() - 1
    }

    fn edge(&mut self, id: &str, a: usize, b: usize, annulus: Option<Annulus>) {
        self.g.edges.push(SEdge { id: id.into(), ends: [a, b], annulus });
    }

    /// Hangs a single extremum a quarter above (max) or below (min) saddle `s`.
    fn bump(&mut self, s: usize, name: &str, max: bool) {
        let l = self.g.vertices[s].level.clone();
        let (rho, top) = if max { (q(-1, 2), &l + q(1, 4)) } else { (q(1, 2), &l - q(1, 4)) };
        let v = self.vertex(name, NodeKind::Extremum, top.clone());
        let prof = RhoProfile::new(vec![(qi(0), rho), (qi(1), qi(0))]).expect("static");
        self.edge(&format!("{name}-edge"), v, s, Some(Annulus::new(prof, top)));
    }
}

/// Genus-two graph with six essential saddles, seven essential annuli and
/// four disks; essential saddle levels are 1..6.
pub fn genus2_figure() -> SurfaceReebGraph {
    let mut b = Build::new(2);
    let a = b.vertex("a", NodeKind::Saddle, qi(1));
    let bb = b.vertex("b", NodeKind::Saddle, qi(2));
    let c = b.vertex("c", NodeKind::Saddle, qi(3));
    let d = b.vertex("d", NodeKind::Saddle, qi(4));
    let s1 = b.vertex("s1", NodeKind::Saddle, qi(5));
    let s2 = b.vertex("s2", NodeKind::Saddle, qi(6));
    b.edge("s1-a", s1, a, None);
    b.edge("a-s2", a, s2, None);
    b.edge("s1-b", s1, bb, None);
    b.edge("b-c", bb, c, None);
    b.edge("c-s2", c, s2, None);
    b.edge("s1-d", s1, d, None);
    b.edge("d-s2", d, s2, None);
    b.bump(a, "ma", true);
    b.bump(bb, "mb", false);
    b.bump(c, "mc", true);
    b.bump(d, "md", false);
    b.g
}

/// Torus: two saddles on a double edge, a maximum over one and a minimum
/// under the other.
pub fn torus_minimal() -> SurfaceReebGraph {
    let mut b = Build::new(1);
    let s1 = b.vertex("s1", NodeKind::Saddle, q(1, 2));
    let s2 = b.vertex("s2", NodeKind::Saddle, q(1, 4));
    b.edge("c0", s1, s2, None);
    b.edge("c1", s1, s2, None);
    b.bump(s1, "max", true);
    b.bump(s2, "min", false);
    b.g
}

/// Torus whose disks have subtree values 1/5 (at level 1/2) and 3/4 (at 1/4).
pub fn torus_two_disks() -> SurfaceReebGraph {
    let mut b = Build::new(1);
    let s1 = b.vertex("s1", NodeKind::Saddle, q(1, 2));
    let s2 = b.vertex("s2", NodeKind::Saddle, q(1, 4));
    b.edge("c0", s1, s2, None);
    b.edge("c1", s1, s2, None);
    let m1 = b.vertex("m1", NodeKind::Extremum, q(29, 40));
    let p1 = RhoProfile::new(vec![(qi(0), q(-3, 2)), (q(3, 10), qi(0))]).expect("static");
    b.edge("d1", m1, s1, Some(Annulus::new(p1, q(29, 40))));
    let m2 = b.vertex("m2", NodeKind::Extremum, q(5, 4));
    let p2 = RhoProfile::new(vec![(qi(0), qi(-2)), (qi(1), qi(0))]).expect("static");
    b.edge("d2", m2, s2, Some(Annulus::new(p2, q(5, 4))));
    b.g
}
