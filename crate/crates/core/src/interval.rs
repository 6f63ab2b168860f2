//! Outward-rounded interval arithmetic on `f64`.
//!
//! Each operation is computed in round-to-nearest and then widened by one ulp
//! on each side, which contains the exact result.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::ToPrimitive;
use serde::Serialize;

use crate::poly::{Polynomial, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

fn down(x: f64) -> f64 {
    if x.is_finite() {
        x.next_down()
    } else {
        x
    }
}

fn up(x: f64) -> f64 {
    if x.is_finite() {
        x.next_up()
    } else {
        x
    }
}

impl Interval {
    pub const ENTIRE: Interval = Interval {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };

    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi, "empty interval [{lo}, {hi}]");
        Interval { lo, hi }
    }

    pub fn point(x: f64) -> Self {
        Interval { lo: x, hi: x }
    }

    /// Smallest representable-bounds interval around an exact rational.
    pub fn from_rational(r: &Rational) -> Self {
        match r.to_f64() {
            Some(v) if v.is_finite() => {
                // Conversion is at most one ulp off; widen by two for margin.
                Interval::new(down(down(v)), up(up(v)))
            }
            _ => Interval::ENTIRE,
        }
    }

    fn checked(lo: f64, hi: f64) -> Self {
        if lo.is_nan() || hi.is_nan() {
            Interval::ENTIRE
        } else {
            Interval { lo, hi }
        }
    }

    pub fn width(&self) -> f64 {
        up(self.hi - self.lo)
    }

    pub fn mid(&self) -> f64 {
        let m = 0.5 * self.lo + 0.5 * self.hi;
        m.clamp(self.lo, self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(0.0)
    }

    /// True if `self` lies strictly inside `other`.
    pub fn interior_of(&self, other: &Interval) -> bool {
        other.lo < self.lo && self.hi < other.hi
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then_some(Interval { lo, hi })
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    pub fn mag(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    /// Strict sign if the interval excludes zero.
    pub fn sign(&self) -> Option<i8> {
        if self.lo > 0.0 {
            Some(1)
        } else if self.hi < 0.0 {
            Some(-1)
        } else {
            None
        }
    }

    pub fn sqr(&self) -> Interval {
        let (a, b) = (self.lo.abs(), self.hi.abs());
        if self.contains_zero() {
            Interval::checked(0.0, up(a.max(b) * a.max(b)))
        } else {
            let (m, n) = if a < b { (a, b) } else { (b, a) };
            Interval::checked(down(m * m).max(0.0), up(n * n))
        }
    }

    pub fn powi(&self, n: u32) -> Interval {
        match n {
            0 => Interval::point(1.0),
            1 => *self,
            _ if n % 2 == 0 => self.powi(n / 2).sqr(),
            _ => *self * self.powi(n - 1),
        }
    }

    pub fn split(&self) -> (Interval, Interval) {
        let m = self.mid();
        (Interval::new(self.lo, m), Interval::new(m, self.hi))
    }

    /// Widens by `amount` on both sides.
    pub fn inflate(&self, amount: f64) -> Interval {
        Interval::new(down(self.lo - amount), up(self.hi + amount))
    }
}

impl Add for Interval {
    type Output = Interval;
    fn add(self, rhs: Interval) -> Interval {
        Interval::checked(down(self.lo + rhs.lo), up(self.hi + rhs.hi))
    }
}

impl Sub for Interval {
    type Output = Interval;
    fn sub(self, rhs: Interval) -> Interval {
        Interval::checked(down(self.lo - rhs.hi), up(self.hi - rhs.lo))
    }
}

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval {
            lo: -self.hi,
            hi: -self.lo,
        }
    }
}

impl Mul for Interval {
    type Output = Interval;
    fn mul(self, rhs: Interval) -> Interval {
        let p = [
            self.lo * rhs.lo,
            self.lo * rhs.hi,
            self.hi * rhs.lo,
            self.hi * rhs.hi,
        ];
        if p.iter().any(|v| v.is_nan()) {
            return Interval::ENTIRE;
        }
        let lo = p.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Interval::checked(down(lo), up(hi))
    }
}

/// Shortest round-trip form, in scientific notation when tiny.
fn bound(v: f64) -> String {
    if v != 0.0 && v.abs() < 1e-4 {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", bound(self.lo), bound(self.hi))
    }
}

/// A polynomial with interval coefficients enclosing exact rationals.
#[derive(Debug, Clone)]
pub struct IntervalPoly {
    terms: Vec<(u32, u32, Interval)>,
    max_x: u32,
    max_y: u32,
}

impl IntervalPoly {
    pub fn new(p: &Polynomial) -> Self {
        let terms: Vec<_> = p
            .terms()
            .map(|(m, c)| (m.ex, m.ey, Interval::from_rational(c)))
            .collect();
        let max_x = terms.iter().map(|t| t.0).max().unwrap_or(0);
        let max_y = terms.iter().map(|t| t.1).max().unwrap_or(0);
        IntervalPoly { terms, max_x, max_y }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Encloses the range of the polynomial over the box `x × y`.
    pub fn eval(&self, x: Interval, y: Interval) -> Interval {
        let xs: Vec<Interval> = (0..=self.max_x).map(|k| x.powi(k)).collect();
        let ys: Vec<Interval> = (0..=self.max_y).map(|k| y.powi(k)).collect();
        self.terms
            .iter()
            .fold(Interval::point(0.0), |acc, &(ex, ey, c)| {
                acc + c * xs[ex as usize] * ys[ey as usize]
            })
    }

    pub fn eval_point(&self, x: f64, y: f64) -> Interval {
        self.eval(Interval::point(x), Interval::point(y))
    }
}
