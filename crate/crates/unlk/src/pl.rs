//! Continuous piecewise-linear functions with rational breakpoints.

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::rational::Q;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlError {
    #[error("need at least two breakpoints, got {0}")]
    TooFewPoints(usize),
    #[error("abscissae not strictly increasing at breakpoint {0}")]
    NotIncreasing(usize),
    #[error("domains differ")]
    DomainMismatch,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Pl {
    pts: Vec<(Q, Q)>,
}

/// Solution set component of `f(x) = y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Hit {
    Point(Q),
    Segment(Q, Q),
}

impl Pl {
    pub fn new(pts: Vec<(Q, Q)>) -> Result<Self, PlError> {
        if pts.len() < 2 {
            return Err(PlError::TooFewPoints(pts.len()));
        }
        for i in 1..pts.len() {
            if pts[i].0 <= pts[i - 1].0 {
                return Err(PlError::NotIncreasing(i));
            }
        }
        Ok(Pl { pts })
    }

    pub fn constant(x0: Q, x1: Q, y: Q) -> Result<Self, PlError> {
        Pl::new(vec![(x0, y.clone()), (x1, y)])
    }

    pub fn points(&self) -> &[(Q, Q)] {
        &self.pts
    }

    pub fn x0(&self) -> &Q {
        &self.pts[0].0
    }

    pub fn x1(&self) -> &Q {
        &self.pts[self.pts.len() - 1].0
    }

    pub fn first_value(&self) -> &Q {
        &self.pts[0].1
    }

    pub fn last_value(&self) -> &Q {
        &self.pts[self.pts.len() - 1].1
    }

    pub fn contains(&self, x: &Q) -> bool {
        x >= self.x0() && x <= self.x1()
    }

    fn piece_of(&self, x: &Q) -> usize {
        // index i with pts[i].0 <= x <= pts[i+1].0
        match self.pts.binary_search_by(|p| p.0.cmp(x)) {
            Ok(i) => i.min(self.pts.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.pts.len() - 2),
        }
    }

    pub fn eval(&self, x: &Q) -> Option<Q> {
        if !self.contains(x) {
            return None;
        }
        let i = self.piece_of(x);
        Some(lerp(&self.pts[i], &self.pts[i + 1], x))
    }

    /// Slopes of the pieces to the left and right of `x` (the single adjacent
    /// slope at domain ends).
    pub fn slopes_at(&self, x: &Q) -> (Q, Q) {
        let n = self.pts.len();
        let slope = |i: usize| {
            (&self.pts[i + 1].1 - &self.pts[i].1) / (&self.pts[i + 1].0 - &self.pts[i].0)
        };
        match self.pts.binary_search_by(|p| p.0.cmp(x)) {
            Ok(i) => {
                let l = if i == 0 { slope(0) } else { slope(i - 1) };
                let r = if i == n - 1 { slope(n - 2) } else { slope(i) };
                (l, r)
            }
            Err(i) => {
                let s = slope(i.saturating_sub(1).min(n - 2));
                (s.clone(), s)
            }
        }
    }

    /// `∫_{x0}^{x} f`, with `x` clamped to the domain.
    pub fn integral_to(&self, x: &Q) -> Q {
        let mut acc = Q::zero();
        for w in self.pts.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            if x <= &a.0 {
                break;
            }
            if x >= &b.0 {
                acc += (&b.0 - &a.0) * (&a.1 + &b.1) / Q::from_integer(2.into());
            } else {
                let y = lerp(a, b, x);
                acc += (x - &a.0) * (&a.1 + y) / Q::from_integer(2.into());
                break;
            }
        }
        acc
    }

    pub fn integral(&self, a: &Q, b: &Q) -> Q {
        self.integral_to(b) - self.integral_to(a)
    }

    pub fn total(&self) -> Q {
        self.integral_to(self.x1())
    }

    pub fn min_value(&self) -> Q {
        self.pts.iter().map(|p| &p.1).min().cloned().expect("nonempty")
    }

    pub fn max_value(&self) -> Q {
        self.pts.iter().map(|p| &p.1).max().cloned().expect("nonempty")
    }

    /// All solutions of `f(x) = y`, left to right, with flat stretches merged.
    pub fn solve(&self, y: &Q) -> Vec<Hit> {
        let mut out: Vec<Hit> = Vec::new();
        let push_point = |out: &mut Vec<Hit>, x: Q| {
            match out.last() {
                Some(Hit::Point(p)) if *p == x => {}
                Some(Hit::Segment(_, e)) if *e == x => {}
                _ => out.push(Hit::Point(x)),
            }
        };
        for w in self.pts.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            if a.1 == *y && b.1 == *y {
                match out.last_mut() {
                    Some(Hit::Segment(_, e)) if *e == a.0 => *e = b.0.clone(),
                    Some(Hit::Point(p)) if *p == a.0 => {
                        let s = p.clone();
                        *out.last_mut().expect("just matched") = Hit::Segment(s, b.0.clone());
                    }
                    _ => out.push(Hit::Segment(a.0.clone(), b.0.clone())),
                }
                continue;
            }
            let da = &a.1 - y;
            let db = &b.1 - y;
            if da.is_zero() {
                push_point(&mut out, a.0.clone());
            }
            if (da.is_positive() && db.is_negative()) || (da.is_negative() && db.is_positive()) {
                let x = &a.0 + (y - &a.1) * (&b.0 - &a.0) / (&b.1 - &a.1);
                push_point(&mut out, x);
            }
            if db.is_zero() {
                push_point(&mut out, b.0.clone());
            }
        }
        out
    }

    /// Pointwise `min(f, c)`.
    pub fn min_const(&self, c: &Q) -> Pl {
        let mut pts: Vec<(Q, Q)> = Vec::with_capacity(self.pts.len() + 4);
        for (i, p) in self.pts.iter().enumerate() {
            if i > 0 {
                let a = &self.pts[i - 1];
                let (da, db) = (&a.1 - c, &p.1 - c);
                if (da.is_positive() && db.is_negative()) || (da.is_negative() && db.is_positive()) {
                    let x = &a.0 + (c - &a.1) * (&p.0 - &a.0) / (&p.1 - &a.1);
                    pts.push((x, c.clone()));
                }
            }
            pts.push((p.0.clone(), if &p.1 > c { c.clone() } else { p.1.clone() }));
        }
        Pl { pts }.simplified()
    }

    /// `a·self + b·other` on a common domain.
    pub fn lin_comb(&self, a: &Q, other: &Pl, b: &Q) -> Result<Pl, PlError> {
        if self.x0() != other.x0() || self.x1() != other.x1() {
            return Err(PlError::DomainMismatch);
        }
        let mut xs: Vec<Q> = self.pts.iter().chain(other.pts.iter()).map(|p| p.0.clone()).collect();
        xs.sort();
        xs.dedup();
        let pts = xs
            .into_iter()
            .map(|x| {
                let y = a * self.eval(&x).expect("in domain") + b * other.eval(&x).expect("in domain");
                (x, y)
            })
            .collect();
        Ok(Pl { pts }.simplified())
    }

    pub fn scale(&self, c: &Q) -> Pl {
        Pl { pts: self.pts.iter().map(|(x, y)| (x.clone(), y * c)).collect() }.simplified()
    }

    pub fn map_x(&self, f: impl Fn(&Q) -> Q) -> Result<Pl, PlError> {
        Pl::new(self.pts.iter().map(|(x, y)| (f(x), y.clone())).collect())
    }

    /// Drops interior breakpoints that lie on the line through their neighbours.
    pub fn simplified(mut self) -> Pl {
        let mut out: Vec<(Q, Q)> = Vec::with_capacity(self.pts.len());
        for p in self.pts.drain(..) {
            while out.len() >= 2 {
                let a = &out[out.len() - 2];
                let b = &out[out.len() - 1];
                let lhs = (&b.1 - &a.1) * (&p.0 - &a.0);
                let rhs = (&p.1 - &a.1) * (&b.0 - &a.0);
                if lhs == rhs {
                    out.pop();
                } else {
                    break;
                }
            }
            out.push(p);
        }
        Pl { pts: out }
    }
}

fn lerp(a: &(Q, Q), b: &(Q, Q), x: &Q) -> Q {
    if *x == a.0 {
        return a.1.clone();
    }
    if *x == b.0 {
        return b.1.clone();
    }
    &a.1 + (&b.1 - &a.1) * (x - &a.0) / (&b.0 - &a.0)
}
