//! Exhaustive search over maximal negative unlinked sets.
//!
//! Deliberately independent of the recursion: it only knows which fixed
//! points exist and which disks contain which points.

use num_traits::Zero;
use rayon::prelude::*;

use super::{spectrum, PlaneTree, Source, TreeError};
use crate::rational::Q;

pub const DEFAULT_CAP: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mnus {
    /// Always starts with `Source::Trivial`.
    pub members: Vec<Source>,
    pub sup_action: Q,
}

struct Candidates {
    points: Vec<(Source, Q)>,
    conflict: Vec<u32>,
}

fn candidates(t: &PlaneTree, cap: usize) -> Result<Candidates, TreeError> {
    let points: Vec<(Source, Q)> = spectrum(t)?
        .into_iter()
        .filter(|e| e.negative && e.source != Source::Trivial)
        .map(|e| (e.source, e.action))
        .collect();
    if points.len() > cap.min(31) {
        return Err(TreeError::TooLarge { count: points.len(), cap });
    }
    let n = points.len();
    let mut conflict = vec![0u32; n];
    for i in 0..n {
        for j in 0..n {
            if i != j && t.encloses(&points[i].0, &points[j].0) {
                conflict[i] |= 1 << j;
                conflict[j] |= 1 << i;
            }
        }
    }
    Ok(Candidates { points, conflict })
}

fn maximal_masks(c: &Candidates) -> Vec<u32> {
    let n = c.points.len();
    let full: u64 = 1u64 << n;
    let mut masks: Vec<u32> = (0..full)
        .into_par_iter()
        .map(|m| m as u32)
        .filter(|&m| {
            (0..n).all(|i| m & (1 << i) == 0 || c.conflict[i] & m == 0)
                && (0..n).all(|j| m & (1 << j) != 0 || c.conflict[j] & m != 0)
        })
        .collect();
    masks.sort_unstable();
    masks
}

fn sup(c: &Candidates, m: u32) -> Q {
    (0..c.points.len())
        .filter(|i| m & (1 << i) != 0)
        .map(|i| c.points[i].1.clone())
        .fold(Q::zero(), |a, b| a.max(b))
}

pub fn enumerate_mnus(t: &PlaneTree, cap: usize) -> Result<Vec<Mnus>, TreeError> {
    let c = candidates(t, cap)?;
    Ok(maximal_masks(&c)
        .into_iter()
        .map(|m| {
            let mut members = vec![Source::Trivial];
            members.extend(
                (0..c.points.len()).filter(|i| m & (1 << i) != 0).map(|i| c.points[i].0.clone()),
            );
            Mnus { members, sup_action: sup(&c, m) }
        })
        .collect())
}

pub fn nu_oracle_capped(t: &PlaneTree, cap: usize) -> Result<Q, TreeError> {
    let c = candidates(t, cap)?;
    Ok(maximal_masks(&c)
        .into_iter()
        .map(|m| sup(&c, m))
        .min()
        .expect("the greedy completion of the empty set is a mnus"))
}

pub fn nu_oracle(t: &PlaneTree) -> Result<Q, TreeError> {
    nu_oracle_capped(t, DEFAULT_CAP)
}
