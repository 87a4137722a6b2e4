use num_traits::{Signed, Zero};

use super::{ensure_valid, NodeKind, PlaneTree, TreeError};
use crate::profile::fixed_points;
use crate::rational::Q;

/// Value of the subtree hanging below `edge`, with levels measured from `base`.
fn nu_below(t: &PlaneTree, edge: usize, base: &Q) -> Result<Q, TreeError> {
    let e = &t.edges[edge];
    let node = &t.nodes[e.inner];
    let h = &node.level - base;
    let n_b = fixed_points(&e.annulus.geom, &e.annulus.profile, edge)?
        .into_iter()
        .map(|p| p.action - base)
        .min();
    match node.kind {
        NodeKind::Extremum => {
            if h.is_negative() {
                Ok(Q::zero())
            } else {
                Ok(n_b.map_or(h.clone(), |m| m.min(h)))
            }
        }
        NodeKind::Saddle => {
            let mut inner = Q::zero();
            for (i, c) in t.child_edges(e.inner).into_iter().enumerate() {
                let v = nu_below(t, c, &node.level)?;
                inner = if i == 0 { v } else { inner.max(v) };
            }
            let inner = &h + inner;
            if h.is_negative() {
                Ok(inner.max(Q::zero()))
            } else {
                Ok(n_b.map_or(inner.clone(), |m| m.min(inner)))
            }
        }
    }
}

pub fn nu_recursive(t: &PlaneTree) -> Result<Q, TreeError> {
    ensure_valid(t)?;
    match t.root_edge() {
        None => Ok(Q::zero()),
        Some(root) => nu_below(t, root, &Q::zero()),
    }
}

/// Same recursion; kept as a separate name for statements about `c`.
pub fn c_recursive(t: &PlaneTree) -> Result<Q, TreeError> {
    nu_recursive(t)
}

pub fn nu_forest(ts: &[PlaneTree]) -> Result<Q, TreeError> {
    let mut best = Q::zero();
    for t in ts {
        best = best.max(nu_recursive(t)?);
    }
    Ok(best)
}
