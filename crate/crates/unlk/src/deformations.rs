//! One-parameter families of models and their tracked action spectra.

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::morse_tree::{nu_forest, spectrum, validate_tree, PlaneTree, Source, TreeError};
use crate::pl::{Hit, Pl, PlError};
use crate::profile::{Annulus, RhoProfile};
use crate::rational::{ceil_i64, floor_i64, fmt_q, q, qi, to_f64, Q};

pub const DEFAULT_SAMPLES: usize = 512;
pub const DEFAULT_TRACK_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DeformationError {
    #[error(transparent)]
    Shape(#[from] PlError),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error("flattening neighborhoods overlap near {0}")]
    Overlap(String),
    #[error("{0} out of range")]
    OutOfRange(String),
    #[error("invalid truncation input: {0}")]
    InvalidTruncation(String),
    #[error("linear family endpoints differ in {0}")]
    Incompatible(String),
    #[error("tracking ambiguous at sigma = {0}")]
    TrackingAmbiguous(f64),
    #[error("{0} is not in the spectrum at the first sample")]
    NotInSpectrum(f64),
    #[error("another branch comes within tolerance at sigma = {0}")]
    Collision(f64),
    #[error("followed branch ends at sigma = {0}")]
    BranchDied(f64),
}

/// Integer-valued interior points of `g`, sorted.
fn integer_crossings(g: &Pl) -> Vec<(Q, i64)> {
    let mut out = Vec::new();
    for k in ceil_i64(&g.min_value())..=floor_i64(&g.max_value()) {
        for hit in g.solve(&qi(k)) {
            if let Hit::Point(x) = hit {
                if &x > g.x0() && &x < g.x1() {
                    out.push((x, k));
                }
            }
        }
    }
    out.sort();
    out
}

/// 1/100 of the shortest gap between consecutive crossings or domain ends.
pub fn default_flatten_width(g: &RhoProfile) -> Q {
    let pl = g.pl();
    let mut xs = vec![pl.x0().clone()];
    xs.extend(integer_crossings(pl).into_iter().map(|c| c.0));
    xs.push(pl.x1().clone());
    let gap = xs.windows(2).map(|w| &w[1] - &w[0]).filter(|d| d.is_positive()).min().unwrap_or_else(Q::one);
    gap / qi(100)
}

/// Replaces `g` by the constant `k` on `[s - w, s + w]` around every interior
/// point with `g(s) = k`, ramping linearly back to `g` over the next `w`.
pub fn flatten_at_integers(g: &RhoProfile, width: &Q) -> Result<RhoProfile, DeformationError> {
    if !width.is_positive() {
        return Err(DeformationError::OutOfRange("flatten width".into()));
    }
    let pl = g.pl();
    let crossings = integer_crossings(pl);
    if crossings.is_empty() {
        return Ok(g.clone());
    }
    let reach = width * qi(2);
    let mut windows: Vec<(Q, Q, Q, Q, Q)> = Vec::new();
    for (s, k) in &crossings {
        let (a, b) = (s - &reach, s + &reach);
        if &a < pl.x0() || &b > pl.x1() || windows.last().is_some_and(|w| w.1 >= a) {
            return Err(DeformationError::Overlap(fmt_q(s)));
        }
        windows.push((a, b, s - width, s + width, qi(*k)));
    }
    let mut pts: Vec<(Q, Q)> = Vec::new();
    let mut wi = windows.iter().peekable();
    for (x, y) in pl.points() {
        while let Some(w) = wi.peek() {
            if &w.0 <= x {
                let (a, b, p0, p1, k) = (*w).clone();
                pts.push((a.clone(), pl.eval(&a).expect("inside")));
                pts.push((p0, k.clone()));
                pts.push((p1, k));
                pts.push((b.clone(), pl.eval(&b).expect("inside")));
                wi.next();
            } else {
                break;
            }
        }
        let covered = windows.iter().any(|w| &w.0 <= x && x <= &w.1);
        if !covered {
            pts.push((x.clone(), y.clone()));
        }
    }
    let out = Pl::new(pts)?.simplified();
    if !integer_crossings(&out).is_empty() {
        return Err(DeformationError::Overlap("ramp introduces a new crossing".into()));
    }
    Ok(RhoProfile::from_pl(out))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncationData {
    pub g: Pl,
    pub n: i64,
    pub gamma: Vec<Pl>,
    pub delta: Vec<Pl>,
    pub h_k: Vec<Q>,
    pub h: Q,
    pub tau: Vec<Q>,
}

impl TruncationData {
    /// `g` is the nonnegative slope profile on `[alpha, beta]`.
    pub fn new(g: &RhoProfile) -> Result<Self, DeformationError> {
        let g = g.pl().clone();
        if g.min_value().is_negative() {
            return Err(DeformationError::InvalidTruncation("g must be nonnegative".into()));
        }
        let h = g.total();
        if !h.is_positive() {
            return Err(DeformationError::InvalidTruncation("total integral must be positive".into()));
        }
        let max = g.max_value();
        // an integer maximum would give a zero top layer
        let n = if max.is_integer() { max.to_integer().try_into().unwrap_or(i64::MAX) - 1 } else { floor_i64(&max) };
        let gamma: Vec<Pl> = (0..=n + 1).map(|k| g.min_const(&qi(k))).collect();
        let delta: Vec<Pl> = gamma.windows(2).map(|w| w[1].lin_comb(&Q::one(), &w[0], &qi(-1))).collect::<Result<_, _>>()?;
        let h_k: Vec<Q> = delta.iter().map(Pl::total).collect();
        if let Some(k) = h_k.iter().position(|x| x.is_zero()) {
            return Err(DeformationError::InvalidTruncation(format!("h_{k} = 0")));
        }
        let mut tau = vec![Q::zero(); h_k.len() + 1];
        for k in (0..h_k.len()).rev() {
            tau[k] = &tau[k + 1] + &h_k[k] / &h;
        }
        Ok(TruncationData { g, n, gamma, delta, h_k, h, tau })
    }

    /// The `k` with `sigma` in `[tau_{k+1}, tau_k)`; `sigma = 1` maps to 0.
    pub fn layer(&self, sigma: &Q) -> usize {
        (0..=self.n as usize).find(|&k| &self.tau[k + 1] <= sigma && (sigma < &self.tau[k] || k == 0)).expect("sigma in [0, 1]")
    }
}

pub fn special_deformation(td: &TruncationData, sigma: &Q) -> Result<RhoProfile, DeformationError> {
    if sigma.is_negative() || sigma > &Q::one() {
        return Err(DeformationError::OutOfRange(format!("sigma = {}", fmt_q(sigma))));
    }
    let k = td.layer(sigma);
    let c = &td.h / &td.h_k[k] * (&td.tau[k] - sigma);
    Ok(RhoProfile::from_pl(td.gamma[k].lin_comb(&Q::one(), &td.delta[k], &c)?.simplified()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Provenance {
    Inside,
    Outside,
    Whole,
}

impl Provenance {
    pub fn as_str(&self) -> &'static str {
        match self {
            Provenance::Inside => "inside",
            Provenance::Outside => "outside",
            Provenance::Whole => "whole",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "inside" => Some(Provenance::Inside),
            "outside" => Some(Provenance::Outside),
            "whole" => Some(Provenance::Whole),
            _ => None,
        }
    }
}

/// Actions of the radial function whose slope magnitude is `g` on
/// `[alpha, beta]` and which vanishes beyond `beta`: zero, and `l*s + int_s g`
/// wherever `g(s) = l >= 1`. The maximum is left to the caller.
pub fn radial_spectrum(g: &Pl) -> Vec<Q> {
    let mut out = vec![Q::zero()];
    for l in 1..=floor_i64(&g.max_value()) {
        for hit in g.solve(&qi(l)) {
            let s = match hit {
                Hit::Point(s) | Hit::Segment(s, _) => s,
            };
            out.push(qi(l) * &s + g.integral(&s, g.x1()));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// Pointwise interpolation between two trees of identical shape.
    Linear { from: PlaneTree, to: PlaneTree },
    /// The truncation deformation of `g` with the inside trees riding on top.
    Special { td: TruncationData, inside: Vec<PlaneTree> },
    /// `spec(base) + sigma * rate`.
    Shift { base: PlaneTree, rate: Q },
}

fn lerp(a: &Q, b: &Q, t: &Q) -> Q {
    a + (b - a) * t
}

/// The tree at parameter `t` on the segment between `a` and `b`.
pub fn interpolate(a: &PlaneTree, b: &PlaneTree, t: &Q) -> Result<PlaneTree, DeformationError> {
    let bad = |s: &str| DeformationError::Incompatible(s.to_string());
    if a.nodes.len() != b.nodes.len() || a.edges.len() != b.edges.len() {
        return Err(bad("size"));
    }
    let mut out = a.clone();
    for (n, m) in out.nodes.iter_mut().zip(&b.nodes) {
        if n.kind != m.kind {
            return Err(bad("node kinds"));
        }
        n.level = lerp(&n.level, &m.level, t);
    }
    for (e, f) in out.edges.iter_mut().zip(&b.edges) {
        if e.inner != f.inner || e.outer != f.outer {
            return Err(bad("edges"));
        }
        let rho = e.annulus.profile.pl().lin_comb(&(Q::one() - t), f.annulus.profile.pl(), t)?.simplified();
        let lo = lerp(&e.annulus.geom.level_at_lo, &f.annulus.geom.level_at_lo, t);
        e.annulus = Annulus::new(RhoProfile::from_pl(rho), lo);
    }
    Ok(out)
}

impl Family {
    pub fn special(g: &RhoProfile, flatten_width: Option<&Q>, inside: Vec<PlaneTree>) -> Result<Family, DeformationError> {
        let g = match flatten_width {
            Some(w) => flatten_at_integers(g, w)?,
            None => g.clone(),
        };
        for t in &inside {
            if !validate_tree(t).is_empty() {
                return Err(TreeError::InvalidTree(validate_tree(t)).into());
            }
        }
        Ok(Family::Special { td: TruncationData::new(&g)?, inside })
    }

    pub fn spectrum_at(&self, sigma: &Q) -> Result<Vec<(Q, Provenance)>, DeformationError> {
        match self {
            Family::Linear { from, to } => {
                let t = interpolate(from, to, sigma)?;
                Ok(spectrum(&t)?.into_iter().map(|e| (e.action, Provenance::Whole)).collect())
            }
            Family::Shift { base, rate } => {
                let d = rate * sigma;
                Ok(spectrum(base)?.into_iter().map(|e| (e.action + &d, Provenance::Whole)).collect())
            }
            Family::Special { td, inside } => {
                let g = special_deformation(td, sigma)?;
                let top = &td.h * (Q::one() - sigma);
                let mut out: Vec<(Q, Provenance)> =
                    radial_spectrum(g.pl()).into_iter().map(|a| (a, Provenance::Outside)).collect();
                out.push((top.clone(), Provenance::Inside));
                for t in inside {
                    for e in spectrum(t)? {
                        if e.source != Source::Trivial {
                            out.push((e.action + &top, Provenance::Inside));
                        }
                    }
                }
                Ok(out)
            }
        }
    }

    /// `c` at the last sample under the line-following argument.
    pub fn inside_value(&self) -> Result<Option<Q>, DeformationError> {
        match self {
            Family::Special { inside, .. } => Ok(Some(nu_forest(inside)?)),
            _ => Ok(None),
        }
    }
}

pub fn default_grid(n: usize) -> Vec<Q> {
    let n = n.max(2);
    (0..n).map(|i| q(i as i64, (n - 1) as i64)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub id: usize,
    pub provenance: Provenance,
    /// `(sigma, action)` at consecutive samples.
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    Birth,
    Death,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Event {
    pub kind: EventKind,
    pub branch: usize,
    pub sigma: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BifurcationDiagram {
    pub sigmas: Vec<f64>,
    pub branches: Vec<Branch>,
    pub events: Vec<Event>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackOptions {
    /// Values closer than this are indistinguishable.
    pub tol: f64,
    /// Largest admissible jump between predicted and observed value.
    pub max_jump: f64,
}

impl Default for TrackOptions {
    fn default() -> Self {
        TrackOptions { tol: DEFAULT_TRACK_TOL, max_jump: f64::INFINITY }
    }
}

pub fn bifurcation(family: &Family, grid: &[Q], opts: TrackOptions) -> Result<BifurcationDiagram, DeformationError> {
    // a probe just after the first sample gives every branch a velocity
    let probe = match grid {
        [a, b, ..] => Some(a + (b - a) / Q::from_integer(PROBE.into())),
        _ => None,
    };
    let mut samples = grid.to_vec();
    if let Some(p) = &probe {
        samples.insert(1, p.clone());
    }
    let spectra: Vec<Vec<(f64, Provenance)>> = samples
        .par_iter()
        .map(|s| {
            family.spectrum_at(s).map(|v| {
                let mut v: Vec<(f64, Provenance)> = v.into_iter().map(|(a, p)| (to_f64(&a), p)).collect();
                v.sort_by(|a, b| a.1.cmp(&b.1).then(a.0.total_cmp(&b.0)));
                v
            })
        })
        .collect::<Result<_, _>>()?;
    let sigmas: Vec<f64> = samples.iter().map(to_f64).collect();
    let d = track(&sigmas, &spectra, opts)?;
    Ok(if probe.is_some() { drop_sample(d, 1) } else { d })
}

const PROBE: i32 = 1024;

/// Removes sample `i` (not the first or last) from a tracked diagram.
fn drop_sample(mut d: BifurcationDiagram, i: usize) -> BifurcationDiagram {
    let gone = d.sigmas.remove(i);
    let (before, after) = (d.sigmas[i - 1], d.sigmas[i]);
    let mut ids = vec![None; d.branches.len()];
    let mut branches = Vec::with_capacity(d.branches.len());
    for mut b in d.branches {
        b.points.retain(|p| p.0 != gone);
        if !b.points.is_empty() {
            ids[b.id] = Some(branches.len());
            b.id = branches.len();
            branches.push(b);
        }
    }
    d.events = d
        .events
        .into_iter()
        .filter_map(|mut e| {
            e.branch = ids[e.branch]?;
            if e.sigma == gone {
                e.sigma = if e.kind == EventKind::Birth { after } else { before };
            }
            Some(e)
        })
        .collect();
    d.branches = branches;
    d
}

/// Nearest-continuation tracking within each provenance group.
pub fn track(
    sigmas: &[f64],
    spectra: &[Vec<(f64, Provenance)>],
    opts: TrackOptions,
) -> Result<BifurcationDiagram, DeformationError> {
    let mut d = BifurcationDiagram { sigmas: sigmas.to_vec(), ..Default::default() };
    let mut alive: Vec<usize> = Vec::new();
    for (i, (&sigma, values)) in sigmas.iter().zip(spectra).enumerate() {
        let mut taken = vec![false; values.len()];
        let mut next_alive = Vec::new();
        if i > 0 {
            let mut matched = vec![false; d.branches.len()];
            // without a velocity yet, keep the order within a group
            for p in [Provenance::Inside, Provenance::Outside, Provenance::Whole] {
                let mut group: Vec<usize> = alive.iter().copied().filter(|&b| d.branches[b].provenance == p).collect();
                let slots: Vec<usize> = (0..values.len()).filter(|&j| values[j].1 == p).collect();
                if group.is_empty() || group.len() != slots.len() || group.iter().any(|&b| d.branches[b].points.len() > 1) {
                    continue;
                }
                group.sort_by(|&a, &b| d.branches[a].points[0].1.total_cmp(&d.branches[b].points[0].1));
                for (b, j) in group.into_iter().zip(slots) {
                    matched[b] = true;
                    taken[j] = true;
                    d.branches[b].points.push((sigma, values[j].0));
                    next_alive.push(b);
                }
            }
            let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
            for &b in alive.iter().filter(|&&b| !matched[b]) {
                let br = &d.branches[b];
                let pred = extrapolate(br, sigma);
                let mut cands: Vec<(f64, usize)> = values
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| v.1 == br.provenance)
                    .map(|(j, v)| ((v.0 - pred).abs(), j))
                    .filter(|c| c.0 <= opts.max_jump)
                    .collect();
                cands.sort_by(|a, b| a.0.total_cmp(&b.0));
                if let [c1, c2, ..] = cands.as_slice() {
                    let distinct = (values[c1.1].0 - values[c2.1].0).abs() > opts.tol;
                    if distinct && c2.0 - c1.0 <= opts.tol && c1.0 > opts.tol {
                        return Err(DeformationError::TrackingAmbiguous(sigma));
                    }
                }
                pairs.extend(cands.into_iter().map(|(dist, j)| (dist, b, j)));
            }
            pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
            for (_, b, j) in pairs {
                if matched[b] || taken[j] {
                    continue;
                }
                matched[b] = true;
                taken[j] = true;
                d.branches[b].points.push((sigma, values[j].0));
                next_alive.push(b);
            }
            for &b in &alive {
                if !matched[b] {
                    d.events.push(Event { kind: EventKind::Death, branch: b, sigma: sigmas[i - 1] });
                }
            }
        }
        for (j, v) in values.iter().enumerate() {
            if !taken[j] {
                let id = d.branches.len();
                d.branches.push(Branch { id, provenance: v.1, points: vec![(sigma, v.0)] });
                if i > 0 {
                    d.events.push(Event { kind: EventKind::Birth, branch: id, sigma });
                }
                next_alive.push(id);
            }
        }
        next_alive.sort_unstable();
        alive = next_alive;
    }
    Ok(d)
}

/// Linear extrapolation from the last two samples.
fn extrapolate(b: &Branch, sigma: f64) -> f64 {
    match b.points.as_slice() {
        [.., (s0, a0), (s1, a1)] if s1 > s0 => a1 + (a1 - a0) / (s1 - s0) * (sigma - s1),
        [.., (_, a)] => *a,
        [] => unreachable!("branches start with one point"),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlopeReport {
    pub min_slope: f64,
    pub branch: Option<usize>,
    pub sigma: Option<f64>,
    pub bound: f64,
    pub pass: bool,
}

pub fn slope_check(d: &BifurcationDiagram, h: f64, tol: f64) -> SlopeReport {
    let mut min = (0.0, None, None);
    for b in &d.branches {
        for w in b.points.windows(2) {
            let slope = (w[1].1 - w[0].1) / (w[1].0 - w[0].0);
            if slope < min.0 {
                min = (slope, Some(b.id), Some(w[0].0));
            }
        }
    }
    let bound = -h * (1.0 + tol);
    SlopeReport { min_slope: min.0, branch: min.1, sigma: min.2, bound, pass: min.0 >= bound }
}

fn value_at(b: &Branch, sigma: f64) -> Option<f64> {
    b.points.iter().find(|p| p.0 == sigma).map(|p| p.1)
}

/// Follows the branch through `(sigma_0, c0)`, clamping at zero once reached.
pub fn continue_c(d: &BifurcationDiagram, c0: f64, tol: f64) -> Result<Vec<(f64, f64)>, DeformationError> {
    let Some(&s0) = d.sigmas.first() else { return Ok(vec![]) };
    let start: Vec<usize> = d
        .branches
        .iter()
        .filter(|b| value_at(b, s0).is_some_and(|v| (v - c0).abs() <= tol))
        .map(|b| b.id)
        .collect();
    let Some(&first) = start.first() else { return Err(DeformationError::NotInSpectrum(c0)) };
    let mut current = first;
    let mut out = Vec::with_capacity(d.sigmas.len());
    let mut clamped = false;
    for &s in &d.sigmas {
        if clamped {
            out.push((s, 0.0));
            continue;
        }
        let v = match value_at(&d.branches[current], s) {
            Some(v) => v,
            None => match start.iter().find(|&&b| value_at(&d.branches[b], s).is_some()) {
                Some(&b) => {
                    current = b;
                    value_at(&d.branches[b], s).expect("checked")
                }
                None => return Err(DeformationError::BranchDied(s)),
            },
        };
        if v <= tol {
            clamped = true;
            out.push((s, 0.0));
            continue;
        }
        let hit = d.branches.iter().any(|b| {
            !start.contains(&b.id) && value_at(b, s).is_some_and(|w| (w - v).abs() <= tol)
        });
        if hit {
            return Err(DeformationError::Collision(s));
        }
        out.push((s, v));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::morse_tree::models::{double_mountain, single_mountain};

    fn prof(pts: &[(i64, i64, i64, i64)]) -> RhoProfile {
        RhoProfile::new(pts.iter().map(|&(a, b, c, d)| (q(a, b), q(c, d))).collect()).unwrap()
    }

    /// Slope magnitude rising to 5/2 between areas 1 and 3.
    fn tent() -> RhoProfile {
        prof(&[(1, 1, 0, 1), (2, 1, 5, 2), (3, 1, 0, 1)])
    }

    #[test]
    fn flatten_single_crossing() {
        let g = prof(&[(0, 1, 0, 1), (1, 1, 3, 2), (2, 1, 3, 2)]);
        let w = q(1, 100);
        let f = flatten_at_integers(&g, &w).unwrap();
        let hits = f.pl().solve(&qi(1));
        assert_eq!(hits, vec![Hit::Segment(q(2, 3) - &w, q(2, 3) + &w)]);
        assert_eq!(f.rho_at(&q(1, 2)), g.rho_at(&q(1, 2)));
        let none = prof(&[(0, 1, 1, 5), (1, 1, 4, 5)]);
        assert_eq!(flatten_at_integers(&none, &w).unwrap(), none);
        assert!(matches!(flatten_at_integers(&g, &q(1, 2)), Err(DeformationError::Overlap(_))));
    }

    #[test]
    fn flatten_tangential_touch() {
        let g = prof(&[(0, 1, 0, 1), (1, 1, 1, 1), (2, 1, 0, 1)]);
        let f = flatten_at_integers(&g, &default_flatten_width(&g)).unwrap();
        assert!(matches!(f.pl().solve(&qi(1)).as_slice(), [Hit::Segment(_, _)]));
        assert_eq!(f.pl().max_value(), qi(1));
    }

    #[test]
    fn truncation_identities() {
        let td = TruncationData::new(&tent()).unwrap();
        assert_eq!(td.n, 2);
        assert_eq!(td.h, q(5, 2));
        assert_eq!(td.tau[0], qi(1));
        assert_eq!(td.tau[3], qi(0));
        assert!(td.tau.windows(2).all(|w| w[0] > w[1]));
        assert_eq!(special_deformation(&td, &qi(0)).unwrap().pl(), &td.g.clone().simplified());
        assert!(special_deformation(&td, &qi(1)).unwrap().pl().max_value().is_zero());
        for k in 0..=2 {
            let g = special_deformation(&td, &td.tau[k + 1]).unwrap();
            assert_eq!(g.pl(), &td.gamma[k + 1].clone().simplified());
        }
        for i in 0..=20 {
            let s = q(i, 20);
            let g = special_deformation(&td, &s).unwrap();
            assert_eq!(g.pl().total(), &td.h * (Q::one() - &s));
        }
        assert!(special_deformation(&td, &q(3, 2)).is_err());
    }

    #[test]
    fn integer_maximum_uses_lower_top_layer() {
        let g = prof(&[(0, 1, 0, 1), (1, 2, 3, 1), (3, 2, 3, 1), (2, 1, 0, 1)]);
        let td = TruncationData::new(&g).unwrap();
        assert_eq!(td.n, 2);
        assert_eq!(td.h_k, vec![q(11, 6), q(3, 2), q(7, 6)]);
        assert_eq!(td.tau[2], q(7, 27));
        assert_eq!(special_deformation(&td, &td.tau[2]).unwrap().pl(), &td.gamma[2].clone().simplified());
        assert_eq!(td.gamma[3].clone().simplified(), td.g.clone().simplified());
    }

    #[test]
    fn constant_and_shift_families() {
        let t = double_mountain();
        let grid = default_grid(9);
        let d = bifurcation(&Family::Linear { from: t.clone(), to: t.clone() }, &grid, TrackOptions::default()).unwrap();
        assert_eq!(d.branches.len(), spectrum(&t).unwrap().len());
        assert!(d.events.is_empty());
        let r = slope_check(&d, 1.0, 1e-6);
        assert_eq!(r.min_slope, 0.0);
        assert!(r.pass);
        let c = continue_c(&d, 0.7, 1e-9).unwrap();
        assert!(c.iter().all(|p| (p.1 - 0.7).abs() < 1e-12));
        assert!(matches!(continue_c(&d, 0.123, 1e-9), Err(DeformationError::NotInSpectrum(_))));
        let s = bifurcation(&Family::Shift { base: t, rate: q(1, 3) }, &default_grid(129), TrackOptions::default()).unwrap();
        for b in &s.branches {
            for w in b.points.windows(2) {
                assert!(((w[1].1 - w[0].1) / (w[1].0 - w[0].0) - 1.0 / 3.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn linear_family_matches_direct_spectra() {
        let a = single_mountain();
        let mut b = a.clone();
        b.edges[0].annulus = Annulus::new(RhoProfile::new(vec![(qi(0), q(-5, 2)), (qi(1), qi(0))]).unwrap(), q(5, 4));
        b.nodes[0].level = q(5, 4);
        let fam = Family::Linear { from: a, to: b };
        let grid = default_grid(17);
        let d = bifurcation(&fam, &grid, TrackOptions::default()).unwrap();
        for (i, s) in grid.iter().enumerate() {
            let mut direct: Vec<f64> = fam.spectrum_at(s).unwrap().iter().map(|x| to_f64(&x.0)).collect();
            let mut tracked: Vec<f64> = d.branches.iter().filter_map(|b| value_at(b, d.sigmas[i])).collect();
            direct.sort_by(f64::total_cmp);
            tracked.sort_by(f64::total_cmp);
            assert_eq!(direct.len(), tracked.len());
            assert!(direct.iter().zip(&tracked).all(|(x, y)| (x - y).abs() < 1e-9));
        }
        assert!(d.events.iter().any(|e| e.kind == EventKind::Birth));
        assert_eq!(d.sigmas.len(), grid.len());
        assert!(d.branches.iter().flat_map(|b| &b.points).all(|p| d.sigmas.contains(&p.0)));
        assert!(d.events.iter().all(|e| d.sigmas.contains(&e.sigma) && e.branch < d.branches.len()));
    }

    #[test]
    fn special_family_slopes_and_continuation() {
        // outside annulus far from the inside tree
        let g = prof(&[(2, 1, 0, 1), (3, 1, 5, 2), (4, 1, 0, 1)]);
        let fam = Family::special(&g, None, vec![single_mountain()]).unwrap();
        let h = 5.0 / 2.0;
        let d = bifurcation(&fam, &default_grid(257), TrackOptions::default()).unwrap();
        let r = slope_check(&d, h, 1e-6);
        assert!(r.pass, "{r:?}");
        for b in d.branches.iter().filter(|b| b.provenance == Provenance::Inside) {
            for w in b.points.windows(2) {
                assert!(((w[1].1 - w[0].1) / (w[1].0 - w[0].0) + h).abs() < 1e-9);
            }
        }
        let c_in = to_f64(&fam.inside_value().unwrap().unwrap());
        let path = continue_c(&d, h + c_in, 1e-9).unwrap();
        let last = path.last().unwrap().1;
        assert!((path[0].1 - last - h).abs() < 1e-9);
        let mut bad = d.clone();
        bad.branches.push(Branch { id: bad.branches.len(), provenance: Provenance::Outside, points: vec![(0.0, 10.0), (0.5, 10.0 - h)] });
        assert!(!slope_check(&bad, h, 1e-6).pass);
    }

    #[test]
    fn continuation_clamps_and_collides() {
        let g = prof(&[(2, 1, 0, 1), (3, 1, 5, 2), (4, 1, 0, 1)]);
        let fam = Family::special(&g, None, vec![]).unwrap();
        let d = bifurcation(&fam, &default_grid(65), TrackOptions::default()).unwrap();
        let path = continue_c(&d, 2.5, 1e-9).unwrap();
        assert_eq!(path.last().unwrap().1, 0.0);
        let sig = vec![0.0, 0.5, 1.0];
        let sp = vec![
            vec![(0.0, Provenance::Whole), (1.0, Provenance::Whole)],
            vec![(0.5, Provenance::Whole), (0.75, Provenance::Whole)],
            vec![(1.0, Provenance::Whole), (1.0, Provenance::Whole)],
        ];
        let d = track(&sig, &sp, TrackOptions::default()).unwrap();
        assert!(matches!(continue_c(&d, 1.0, 1e-9), Err(DeformationError::Collision(_))));
    }
}
