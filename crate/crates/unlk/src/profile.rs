//! A single foliated annulus: level and rotation number against enclosed area.

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pl::{Hit, Pl, PlError};
use crate::rational::{ceil_i64, floor_i64, fmt_q, qi, Q};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProfileError {
    #[error(transparent)]
    Shape(#[from] PlError),
    #[error("area {0} outside the edge")]
    OutOfRange(String),
    #[error("rho equals the integer {k} on [{from}, {to}]")]
    DegenerateProfile { k: i64, from: String, to: String },
}

/// Documentation only: area is always the absolute enclosed area.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    InwardDecreasingArea,
    #[default]
    OutwardIncreasingArea,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RhoProfile {
    rho: Pl,
}

impl RhoProfile {
    pub fn new(breakpoints: Vec<(Q, Q)>) -> Result<Self, ProfileError> {
        Ok(RhoProfile { rho: Pl::new(breakpoints)? })
    }

    pub fn from_pl(rho: Pl) -> Self {
        RhoProfile { rho }
    }

    pub fn pl(&self) -> &Pl {
        &self.rho
    }

    pub fn breakpoints(&self) -> &[(Q, Q)] {
        self.rho.points()
    }

    pub fn area_lo(&self) -> &Q {
        self.rho.x0()
    }

    pub fn area_hi(&self) -> &Q {
        self.rho.x1()
    }

    pub fn rho_at(&self, a: &Q) -> Option<Q> {
        self.rho.eval(a)
    }

    pub fn negated(&self) -> RhoProfile {
        RhoProfile { rho: self.rho.scale(&qi(-1)) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EdgeGeometry {
    pub area_lo: Q,
    pub area_hi: Q,
    pub level_at_lo: Q,
}

impl EdgeGeometry {
    pub fn for_profile(profile: &RhoProfile, level_at_lo: Q) -> Self {
        EdgeGeometry {
            area_lo: profile.area_lo().clone(),
            area_hi: profile.area_hi().clone(),
            level_at_lo,
        }
    }
}

/// An edge annulus: geometry plus its rotation profile.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Annulus {
    pub geom: EdgeGeometry,
    pub profile: RhoProfile,
}

impl Annulus {
    pub fn new(profile: RhoProfile, level_at_lo: Q) -> Self {
        Annulus { geom: EdgeGeometry::for_profile(&profile, level_at_lo), profile }
    }

    pub fn level_at(&self, a: &Q) -> Result<Q, ProfileError> {
        level_at(&self.geom, &self.profile, a)
    }

    pub fn level_at_hi(&self) -> Q {
        &self.geom.level_at_lo + self.profile.pl().total()
    }

    pub fn shifted(&self, by: &Q) -> Annulus {
        let mut out = self.clone();
        out.geom.level_at_lo += by;
        out
    }

    pub fn negated(&self) -> Annulus {
        Annulus::new(self.profile.negated(), -&self.geom.level_at_lo)
    }

    /// Scales every area by `factor > 0` while keeping all levels.
    pub fn rescaled_areas(&self, factor: &Q) -> Annulus {
        let pl = self.profile.pl().map_x(|x| x * factor).expect("positive factor keeps order");
        Annulus::new(RhoProfile::from_pl(pl.scale(&(Q::from_integer(1.into()) / factor))), self.geom.level_at_lo.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OrbitPoint {
    pub edge_id: usize,
    pub area: Q,
    pub k: i64,
    pub level: Q,
    pub action: Q,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProfileDiagnostic {
    /// Geometry and breakpoint span disagree.
    SpanMismatch,
    SignChangeInInterior { piece: usize },
    InteriorZero { breakpoint: usize },
    FlatIntegerSegment { from: usize, to: usize, k: i64 },
}

pub fn level_at(geom: &EdgeGeometry, profile: &RhoProfile, a: &Q) -> Result<Q, ProfileError> {
    if a < &geom.area_lo || a > &geom.area_hi || !profile.pl().contains(a) {
        return Err(ProfileError::OutOfRange(fmt_q(a)));
    }
    Ok(&geom.level_at_lo + profile.pl().integral(&geom.area_lo, a))
}

pub fn action_of(level: &Q, area: &Q, k: i64) -> Q {
    level - area * qi(k)
}

pub fn fixed_points(
    geom: &EdgeGeometry,
    profile: &RhoProfile,
    edge_id: usize,
) -> Result<Vec<OrbitPoint>, ProfileError> {
    let pl = profile.pl();
    let (lo, hi) = (pl.min_value(), pl.max_value());
    let mut out = Vec::new();
    for k in ceil_i64(&lo)..=floor_i64(&hi) {
        if k == 0 {
            continue;
        }
        for hit in pl.solve(&qi(k)) {
            match hit {
                Hit::Segment(a, b) => {
                    return Err(ProfileError::DegenerateProfile { k, from: fmt_q(&a), to: fmt_q(&b) })
                }
                Hit::Point(a) => {
                    if a <= geom.area_lo || a >= geom.area_hi {
                        continue;
                    }
                    let level = level_at(geom, profile, &a)?;
                    let action = action_of(&level, &a, k);
                    out.push(OrbitPoint { edge_id, area: a, k, level, action });
                }
            }
        }
    }
    out.sort_by(|x, y| x.area.cmp(&y.area));
    Ok(out)
}

pub fn validate_profile(profile: &RhoProfile) -> Vec<ProfileDiagnostic> {
    let pts = profile.breakpoints();
    let mut diags = Vec::new();
    let n = pts.len();
    for (i, p) in pts.iter().enumerate().take(n - 1).skip(1) {
        if p.1.is_zero() {
            diags.push(ProfileDiagnostic::InteriorZero { breakpoint: i });
        }
    }
    for i in 0..n - 1 {
        let (a, b) = (&pts[i].1, &pts[i + 1].1);
        if (a.is_positive() && b.is_negative()) || (a.is_negative() && b.is_positive()) {
            diags.push(ProfileDiagnostic::SignChangeInInterior { piece: i });
        }
        if a.is_zero() && b.is_zero() {
            diags.push(ProfileDiagnostic::InteriorZero { breakpoint: i });
        }
    }
    let mut i = 0;
    while i < n - 1 {
        let y = &pts[i].1;
        if y.is_integer() && !y.is_zero() && pts[i + 1].1 == *y {
            let mut j = i + 1;
            while j + 1 < n && pts[j + 1].1 == *y {
                j += 1;
            }
            let k = floor_i64(y);
            diags.push(ProfileDiagnostic::FlatIntegerSegment { from: i, to: j, k });
            i = j;
        } else {
            i += 1;
        }
    }
    diags
}
