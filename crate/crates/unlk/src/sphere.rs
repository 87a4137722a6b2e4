//! Height functions on the round sphere of total area one.

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::pl::{Hit, Pl, PlError};
use crate::rational::{ceil_i64, floor_i64, fmt_q, q, qi, to_f64, Q};

/// Index shift per copy of the generator glued to a capping.
pub const RECAP_CZ_SHIFT: i64 = -2;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SphereError {
    #[error(transparent)]
    Shape(#[from] PlError),
    #[error("derivative must be given on exactly [0, 1]")]
    Domain,
    #[error("h' equals the integer {k} on [{from}, {to}]")]
    DegenerateProfile { k: i64, from: String, to: String },
    #[error("({z}, {k}) is not a fixed point")]
    InvalidOrbit { z: String, k: i64 },
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("construction failed: {0}")]
    ConstructionFailed(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeightProfile {
    pub dh: Pl,
    pub h0: Q,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SphereOrbitKind {
    South,
    North,
    Circle,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SphereOrbit {
    pub z: Q,
    pub k: i64,
    pub kind: SphereOrbitKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CappedOrbit {
    pub z: Q,
    pub k: i64,
    pub m: i64,
    pub action: Q,
    pub cz_index: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleBump {
    pub c: Q,
    pub delta: Q,
    pub z_beta: Q,
    pub z_alpha: Q,
    /// Actions of `[S,-A]`, `[beta,u]`, `[alpha,u#A]`, `N`.
    pub candidates: [Q; 4],
    pub warnings: Vec<String>,
}

impl HeightProfile {
    pub fn new(dh: Pl, h0: Q) -> Result<Self, SphereError> {
        if !dh.x0().is_zero() || !dh.x1().is_one() {
            return Err(SphereError::Domain);
        }
        Ok(HeightProfile { dh, h0 })
    }

    pub fn h(&self, z: &Q) -> Q {
        &self.h0 + self.dh.integral_to(z)
    }

    fn dh_at(&self, z: &Q) -> Q {
        self.dh.eval(z).expect("z in [0, 1]")
    }
}

pub fn sphere_fixed_points(hp: &HeightProfile) -> Result<Vec<SphereOrbit>, SphereError> {
    let mut out = vec![SphereOrbit { z: Q::zero(), k: 0, kind: SphereOrbitKind::South }];
    let mut circles = Vec::new();
    for k in ceil_i64(&hp.dh.min_value())..=floor_i64(&hp.dh.max_value()) {
        if k == 0 {
            continue;
        }
        for hit in hp.dh.solve(&qi(k)) {
            match hit {
                Hit::Segment(a, b) => {
                    return Err(SphereError::DegenerateProfile { k, from: fmt_q(&a), to: fmt_q(&b) })
                }
                Hit::Point(z) if z.is_positive() && z < Q::one() => {
                    circles.push(SphereOrbit { z, k, kind: SphereOrbitKind::Circle })
                }
                Hit::Point(_) => {}
            }
        }
    }
    circles.sort_by(|a, b| a.z.cmp(&b.z));
    out.extend(circles);
    out.push(SphereOrbit { z: Q::one(), k: 0, kind: SphereOrbitKind::North });
    Ok(out)
}

fn check_orbit(hp: &HeightProfile, z: &Q, k: i64) -> Result<SphereOrbitKind, SphereError> {
    let bad = || SphereError::InvalidOrbit { z: fmt_q(z), k };
    if z.is_zero() && k == 0 {
        return Ok(SphereOrbitKind::South);
    }
    if z.is_one() && k == 0 {
        return Ok(SphereOrbitKind::North);
    }
    if k != 0 && z.is_positive() && z < &Q::one() && hp.dh.eval(z) == Some(qi(k)) {
        return Ok(SphereOrbitKind::Circle);
    }
    Err(bad())
}

pub fn capped_action(hp: &HeightProfile, z: &Q, k: i64, m: i64) -> Result<Q, SphereError> {
    check_orbit(hp, z, k)?;
    Ok(hp.h(z) + qi(k) * (Q::one() - z) - qi(m))
}

/// Index of the capping through the north pole, read as the even member of
/// the pair obtained by perturbing a degenerate circle.
fn base_index(hp: &HeightProfile, z: &Q, k: i64, kind: SphereOrbitKind) -> i64 {
    match kind {
        SphereOrbitKind::South => {
            if hp.dh.first_value().is_negative() {
                2
            } else {
                0
            }
        }
        SphereOrbitKind::North => {
            if hp.dh.last_value().is_positive() {
                2
            } else {
                0
            }
        }
        SphereOrbitKind::Circle => {
            let (l, r) = hp.dh.slopes_at(z);
            let increasing = if r.is_zero() { l.is_positive() } else { r.is_positive() };
            if increasing {
                2 * k
            } else {
                2 * k + 2
            }
        }
    }
}

pub fn capped_orbit(hp: &HeightProfile, z: &Q, k: i64, m: i64) -> Result<CappedOrbit, SphereError> {
    let kind = check_orbit(hp, z, k)?;
    Ok(CappedOrbit {
        z: z.clone(),
        k,
        m,
        action: capped_action(hp, z, k, m)?,
        cz_index: base_index(hp, z, k, kind) + RECAP_CZ_SHIFT * m,
    })
}

/// Every fixed point with every capping `m` in `ms`.
pub fn capped_orbits(hp: &HeightProfile, ms: std::ops::RangeInclusive<i64>) -> Result<Vec<CappedOrbit>, SphereError> {
    let mut out = Vec::new();
    for o in sphere_fixed_points(hp)? {
        for m in ms.clone() {
            out.push(capped_orbit(hp, &o.z, o.k, m)?);
        }
    }
    Ok(out)
}

pub fn c_simple_bump(hp: &HeightProfile) -> Result<SimpleBump, SphereError> {
    let fail = |s: &str| Err(SphereError::HypothesisViolated(s.to_string()));
    let delta = match hp.dh.solve(&Q::zero()).first() {
        Some(Hit::Segment(a, b)) if a.is_zero() => b.clone(),
        _ => return fail("h' = 0 on an interval [0, delta] with delta > 0"),
    };
    let two = qi(2);
    for (z, v) in hp.dh.points() {
        if z > &delta && !(v.is_positive() && v < &two) {
            return fail("0 < h' < 2 on (delta, 1)");
        }
    }
    if hp.dh.last_value().is_zero() {
        return fail("h'(1) nonzero");
    }
    let ones = hp.dh.solve(&Q::one());
    let (z_beta, z_alpha) = match ones.as_slice() {
        [Hit::Point(b), Hit::Point(a)] if a < &Q::one() => (b.clone(), a.clone()),
        _ => return fail("h' = 1 at exactly two points"),
    };
    let mut warnings = Vec::new();
    if hp.dh.last_value() >= &q(1, 2) {
        warnings.push(format!("h'(1) = {} is not small", fmt_q(hp.dh.last_value())));
    }
    let s = capped_action(hp, &Q::zero(), 0, -1)?;
    let beta = capped_action(hp, &z_beta, 1, 0)?;
    let alpha = capped_action(hp, &z_alpha, 1, 1)?;
    let north = capped_action(hp, &Q::one(), 0, 0)?;
    if !(alpha < s && alpha < beta && alpha < north) {
        return fail("[alpha, u#A] carries strictly the smallest action");
    }
    if beta >= s {
        return fail("action of [beta, u] below that of [S, -A]");
    }
    Ok(SimpleBump {
        c: beta.clone().min(north.clone()),
        delta,
        z_beta,
        z_alpha,
        candidates: [s, beta, alpha, north],
        warnings,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CounterexampleReport {
    pub z_beta: Q,
    pub delta_prime: Q,
    /// `h(z_beta) + 1/2`.
    pub d: Q,
    pub h: HeightProfile,
    pub h_tilde: HeightProfile,
    pub h2: HeightProfile,
    /// `c(H)`, standing in for `c(H~)`.
    pub c_sum: Q,
    /// `sup |h~ - h|`, which bounds `|c(H~) - c(H)|`.
    pub c_sum_error: Q,
    /// Upper bound: `H1 <= 0`.
    pub c1: Q,
    pub c1_is_bound: bool,
    pub c2: Q,
    pub z_gamma2: Q,
    pub gap: Q,
    /// `c2 - c_sum - c_sum_error`.
    pub certified_gap: Q,
}

impl CounterexampleReport {
    pub fn gap_f64(&self) -> f64 {
        to_f64(&self.gap)
    }
}

fn pl(pts: Vec<(Q, Q)>) -> Result<Pl, SphereError> {
    Ok(Pl::new(pts)?.simplified())
}

/// Builds `h` with `h(0) = -1/2`, `h(1/2) = 0`, `h(1) > 1/2`, flattens it to
/// zero on `[1/2 - delta', 1/2 + delta']`, and evaluates all three values.
pub fn counterexample(z_beta: &Q, delta_prime: &Q) -> Result<CounterexampleReport, SphereError> {
    let fail = |s: &str| Err(SphereError::ConstructionFailed(s.to_string()));
    let half = q(1, 2);
    let zb = z_beta.clone();
    let dp = delta_prime.clone();
    if !(zb.is_positive() && zb < half) {
        return fail("0 < z_beta < 1/2");
    }
    if !dp.is_positive() {
        return fail("delta' > 0");
    }
    let lo = (&zb * qi(2) - &half).max(Q::zero());
    let d = &lo + (&zb - &lo) / qi(5);

    // [0, z_beta]: flat, then up to 1
    let e = (&zb - &d) / qi(2);
    let qv = &d * qi(2) / (&zb + &d);
    // [z_beta, 1/2]: trapezoid with mean slope a_mean in (1, 2)
    let len = &half - &zb;
    let a_mean = (&half - &d) / &len;
    let s = Q::one() + (&a_mean - Q::one()) / qi(2);
    let w = &len * (qi(2) - &a_mean) / qi(4);
    let p = (&a_mean * &len - (Q::one() + &s) * &w / qi(2)) / (&len - &w);
    // [1/2, 1]: constant s, then a bump above 1 and down to a small slope
    let m = q(1, 5);
    let r = &half - &m;
    let phi = (&s + qi(2)) / qi(2);
    let end = q(1, 10);
    let dh = pl(vec![
        (Q::zero(), Q::zero()),
        (e.clone(), Q::zero()),
        (&e * qi(2), qv),
        (zb.clone(), Q::one()),
        (&zb + &w, p.clone()),
        (&half - &w, p),
        (half.clone(), s.clone()),
        (&half + &m, s.clone()),
        (&half + &m + &r / qi(3), phi.clone()),
        (Q::one() - &r / qi(3), phi),
        (Q::one(), end),
    ])?;
    let h = HeightProfile::new(dh, -half.clone())?;
    if h.h(&half) != Q::zero() || h.h(&Q::one()) <= half {
        return fail("h(1/2) = 0 and h(1) > 1/2");
    }

    // left flattening on [1/2 - 2d', 1/2 - d']
    let a0 = &half - &dp * qi(2);
    if a0 <= &zb + &w {
        return fail("1/2 - 2 delta' must lie beyond the beta region");
    }
    let ha0 = h.h(&a0);
    let da0 = h.dh_at(&a0);
    let peak_l = (-ha0 * qi(4) / &dp - &da0) / qi(2);
    if !peak_l.is_positive() {
        return fail("left ramp peak must be positive");
    }
    // right flattening: 0 -> P over u, hold for D, P -> s over u
    let b0 = &half + &dp;
    let u = dp.clone();
    let peak_r = (&s + qi(2)) / qi(2);
    let hold = (&s * &dp + &s * &u * q(3, 2) - &peak_r * &u) / (&peak_r - &s);
    if hold.is_negative() {
        return fail("right ramp cannot rejoin h");
    }
    let z_join = &b0 + &hold + &u * qi(2);
    if z_join > &half + &m {
        return fail("right ramp must rejoin inside the constant-slope stretch");
    }
    let right: Vec<(Q, Q)> = vec![
        (b0.clone(), Q::zero()),
        (&b0 + &u, peak_r.clone()),
        (&b0 + &u + &hold, peak_r.clone()),
        (z_join.clone(), s.clone()),
    ];
    let mut tilde_pts: Vec<(Q, Q)> = h.dh.points().iter().filter(|(z, _)| z < &a0).cloned().collect();
    tilde_pts.push((a0.clone(), da0));
    tilde_pts.push((&a0 + &dp / qi(2), peak_l));
    tilde_pts.push((&half - &dp, Q::zero()));
    tilde_pts.extend(right.iter().cloned());
    tilde_pts.extend(h.dh.points().iter().filter(|(z, _)| z > &z_join).cloned());
    let h_tilde = HeightProfile::new(pl(tilde_pts)?, h.h0.clone())?;
    if h_tilde.h(&(&half - &dp)) != Q::zero() || h_tilde.h(&Q::one()) != h.h(&Q::one()) {
        return fail("flattening must vanish on the middle band and rejoin h");
    }

    let mut h2_pts = vec![(Q::zero(), Q::zero())];
    h2_pts.extend(h_tilde.dh.points().iter().filter(|(z, _)| z >= &b0).cloned());
    let h2 = HeightProfile::new(pl(h2_pts)?, Q::zero())?;

    let c_h = c_simple_bump(&h)?.c;
    let bump2 = c_simple_bump(&h2)?;
    let c2 = bump2.c;
    let err = sup_distance(&h, &h_tilde)?;
    let c1 = Q::zero();
    let gap = c1.clone().max(c2.clone()) - &c_h;
    let certified_gap = &gap - &err;
    Ok(CounterexampleReport {
        z_beta: zb,
        delta_prime: dp,
        d,
        h,
        h_tilde,
        h2,
        c_sum: c_h,
        c_sum_error: err,
        c1,
        c1_is_bound: true,
        c2,
        z_gamma2: bump2.z_beta,
        gap,
        certified_gap,
    })
}

/// Exact `sup |a - b|` over [0, 1] for two height profiles.
pub fn sup_distance(a: &HeightProfile, b: &HeightProfile) -> Result<Q, SphereError> {
    let diff = a.dh.lin_comb(&Q::one(), &b.dh, &qi(-1))?;
    let mut zs: Vec<Q> = diff.points().iter().map(|p| p.0.clone()).collect();
    for hit in diff.solve(&Q::zero()) {
        match hit {
            Hit::Point(z) => zs.push(z),
            Hit::Segment(x, y) => zs.extend([x, y]),
        }
    }
    Ok(zs
        .iter()
        .map(|z| (a.h(z) - b.h(z)).abs())
        .max()
        .expect("nonempty"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hp(pts: &[(i64, i64, i64, i64)], h0: Q) -> HeightProfile {
        HeightProfile::new(Pl::new(pts.iter().map(|&(a, b, c, d)| (q(a, b), q(c, d))).collect()).unwrap(), h0).unwrap()
    }

    fn bump_042() -> HeightProfile {
        hp(
            &[(0, 1, 0, 1), (1, 10, 0, 1), (1, 5, 1, 1), (3, 10, 3, 2), (7, 10, 3, 2), (4, 5, 1, 1), (1, 1, 3, 10)],
            q(-43, 100),
        )
    }

    #[test]
    fn fixed_points_of_bump() {
        let h = bump_042();
        let z: Vec<(Q, i64)> = sphere_fixed_points(&h).unwrap().into_iter().map(|o| (o.z, o.k)).collect();
        assert_eq!(z, vec![(qi(0), 0), (q(1, 5), 1), (q(4, 5), 1), (qi(1), 0)]);
        let flat = hp(&[(0, 1, 0, 1), (1, 1, 0, 1)], qi(0));
        assert_eq!(sphere_fixed_points(&flat).unwrap().len(), 2);
        let one = hp(&[(0, 1, 0, 1), (1, 4, 1, 1), (1, 2, 1, 1), (1, 1, 0, 1)], qi(0));
        assert!(matches!(sphere_fixed_points(&one), Err(SphereError::DegenerateProfile { k: 1, .. })));
    }

    #[test]
    fn capped_actions() {
        let h = bump_042();
        assert_eq!(capped_action(&h, &qi(0), 0, -1).unwrap(), h.h0.clone() + qi(1));
        let zero = hp(&[(0, 1, 0, 1), (1, 1, 0, 1)], qi(0));
        assert_eq!(capped_action(&zero, &qi(0), 0, -1).unwrap(), qi(1));
        let zb = q(1, 5);
        assert_eq!(capped_action(&h, &zb, 1, 0).unwrap(), h.h(&zb) + qi(1) - &zb);
        let za = q(4, 5);
        assert_eq!(capped_action(&h, &za, 1, 1).unwrap(), h.h(&za) - &za);
        assert!(matches!(capped_action(&h, &q(1, 3), 1, 0), Err(SphereError::InvalidOrbit { .. })));
    }

    #[test]
    fn indices_and_recapping() {
        let h = bump_042();
        let beta = capped_orbit(&h, &q(1, 5), 1, 0).unwrap();
        let alpha = capped_orbit(&h, &q(4, 5), 1, 1).unwrap();
        let south = capped_orbit(&h, &qi(0), 0, -1).unwrap();
        let north = capped_orbit(&h, &qi(1), 0, 0).unwrap();
        assert_eq!([beta.cz_index, alpha.cz_index, south.cz_index, north.cz_index], [2, 2, 2, 2]);
        for o in capped_orbits(&h, -3..=3).unwrap().windows(2) {
            if o[0].z == o[1].z {
                assert_eq!(&o[0].action - &o[1].action, qi(1));
                assert_eq!(o[0].cz_index - o[1].cz_index, 2);
            }
        }
    }

    #[test]
    fn simple_bump_values() {
        let b = c_simple_bump(&bump_042()).unwrap();
        assert_eq!(b.c, q(42, 100));
        assert_eq!(b.candidates[3], q(6, 10));
        assert!(b.warnings.is_empty());
        let low = hp(&[(0, 1, 0, 1), (1, 2, 0, 1), (3, 5, 1, 1), (7, 10, 6, 5), (4, 5, 1, 1), (1, 1, 1, 10)], qi(0));
        let b = c_simple_bump(&low).unwrap();
        assert_eq!(b.c, low.h(&qi(1)));
        assert!(b.c < b.candidates[1]);
        let steep = hp(&[(0, 1, 0, 1), (1, 5, 0, 1), (1, 2, 2, 1), (1, 1, 1, 10)], qi(0));
        assert!(matches!(c_simple_bump(&steep), Err(SphereError::HypothesisViolated(_))));
    }

    #[test]
    fn counterexample_values() {
        let r = counterexample(&q(1, 10), &q(1, 100)).unwrap();
        assert_eq!(r.d, q(1, 50));
        assert_eq!(r.h.h(&q(1, 10)), q(-12, 25));
        assert_eq!(r.c_sum, q(21, 50));
        let c2 = to_f64(&r.c2);
        assert!((0.48..=0.52).contains(&c2), "{c2}");
        assert!(r.gap_f64() >= 0.05);
        assert!(r.certified_gap.is_positive());
        assert!(r.z_gamma2 > q(51, 100) && r.z_gamma2 < q(52, 100));
    }

    #[test]
    fn counterexample_limits() {
        let near = counterexample(&q(49, 100), &q(1, 1000)).unwrap();
        assert!(near.gap_f64() < 0.02);
        assert!(matches!(counterexample(&q(1, 10), &q(1, 4)), Err(SphereError::ConstructionFailed(_))));
    }
}
