//! Small reference models.

use super::{Node, NodeKind, Outer, PlaneTree, TreeEdge};
use crate::profile::{Annulus, RhoProfile};
use crate::rational::{q, qi, Q};

fn annulus(bps: Vec<(Q, Q)>, level_at_lo: Q) -> Annulus {
    Annulus::new(RhoProfile::new(bps).expect("static profile"), level_at_lo)
}

/// `f(a) = (1 - a)^2` on the unit-area disk.
pub fn single_mountain() -> PlaneTree {
    PlaneTree {
        nodes: vec![Node { name: "max".into(), kind: NodeKind::Extremum, level: qi(1) }],
        edges: vec![TreeEdge {
            name: "e".into(),
            inner: 0,
            outer: Outer::Boundary,
            annulus: annulus(vec![(qi(0), qi(-2)), (qi(1), qi(0))], qi(1)),
        }],
    }
}

/// Two tangent mountains of areas 3/10 and 1/5 over a base annulus, saddle at 1/2.
pub fn double_mountain() -> PlaneTree {
    PlaneTree {
        nodes: vec![
            Node { name: "s0".into(), kind: NodeKind::Saddle, level: q(1, 2) },
            Node { name: "m0".into(), kind: NodeKind::Extremum, level: q(29, 40) },
            Node { name: "m1".into(), kind: NodeKind::Extremum, level: q(31, 50) },
        ],
        edges: vec![
            TreeEdge {
                name: "b".into(),
                inner: 0,
                outer: Outer::Boundary,
                annulus: annulus(vec![(q(1, 2), qi(0)), (q(3, 4), qi(-2)), (qi(1), qi(0))], q(1, 2)),
            },
            TreeEdge {
                name: "t0".into(),
                inner: 1,
                outer: Outer::Node(0),
                annulus: annulus(vec![(qi(0), q(-3, 2)), (q(3, 10), qi(0))], q(29, 40)),
            },
            TreeEdge {
                name: "t1".into(),
                inner: 2,
                outer: Outer::Node(0),
                annulus: annulus(vec![(qi(0), q(-6, 5)), (q(1, 5), qi(0))], q(31, 50)),
            },
        ],
    }
}

/// A one-extremum tree from a rho profile starting at area 0, with the
/// boundary at level 0.
pub fn radial(rho: Vec<(Q, Q)>) -> Result<PlaneTree, crate::profile::ProfileError> {
    let profile = RhoProfile::new(rho)?;
    let top = -profile.pl().total();
    Ok(PlaneTree {
        nodes: vec![Node { name: "x".into(), kind: NodeKind::Extremum, level: top.clone() }],
        edges: vec![TreeEdge { name: "e".into(), inner: 0, outer: Outer::Boundary, annulus: Annulus::new(profile, top) }],
    })
}
