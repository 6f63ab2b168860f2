//! Sparse bivariate polynomials over the rationals.
//!
//! Every polynomial lives in `Q[x, y]` and is stored as a map from monomial
//! to nonzero coefficient. All arithmetic is exact.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Exact rational number, always kept in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

/// Builds a rational from a machine integer.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Builds `num / den` as a rational.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// One of the two coordinates of the plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    X,
    Y,
}

/// The power product `x^ex * y^ey`.
///
/// The derived ordering is lexicographic in `(ex, ey)`; it is only used for
/// storage. Term orders for Gröbner computations live in
/// [`crate::groebner::TermOrder`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial {
    pub ex: u32,
    pub ey: u32,
}

impl Monomial {
    pub const ONE: Monomial = Monomial { ex: 0, ey: 0 };
    pub const X: Monomial = Monomial { ex: 1, ey: 0 };
    pub const Y: Monomial = Monomial { ex: 0, ey: 1 };

    pub const fn new(ex: u32, ey: u32) -> Self {
        Monomial { ex, ey }
    }

    pub fn degree(&self) -> u32 {
        self.ex + self.ey
    }

    pub fn exponent(&self, var: Var) -> u32 {
        match var {
            Var::X => self.ex,
            Var::Y => self.ey,
        }
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial::new(self.ex + other.ex, self.ey + other.ey)
    }

    /// True if `self` divides `other`.
    pub fn divides(&self, other: &Monomial) -> bool {
        self.ex <= other.ex && self.ey <= other.ey
    }

    /// `other / self`, if `self` divides `other`.
    pub fn quotient_of(&self, other: &Monomial) -> Option<Monomial> {
        self.divides(other)
            .then(|| Monomial::new(other.ex - self.ex, other.ey - self.ey))
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial::new(self.ex.max(other.ex), self.ey.max(other.ey))
    }

    pub fn is_coprime(&self, other: &Monomial) -> bool {
        (self.ex == 0 || other.ex == 0) && (self.ey == 0 || other.ey == 0)
    }
}

impl fmt::Display for Monomial {
    /// Writes `1`, `x`, `y^2`, `x*y^3`, ...
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ex == 0 && self.ey == 0 {
            return f.write_str("1");
        }
        let mut first = true;
        for (name, e) in [("x", self.ex), ("y", self.ey)] {
            if e == 0 {
                continue;
            }
            if !first {
                f.write_str("*")?;
            }
            first = false;
            f.write_str(name)?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

/// A polynomial in `Q[x, y]`.
///
/// Zero coefficients are never stored, so structural equality is
/// mathematical equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, Rational>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial::default()
    }

    pub fn one() -> Self {
        Polynomial::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Polynomial::term(Monomial::ONE, c)
    }

    pub fn var(var: Var) -> Self {
        match var {
            Var::X => Polynomial::term(Monomial::X, Rational::one()),
            Var::Y => Polynomial::term(Monomial::Y, Rational::one()),
        }
    }

    pub fn x() -> Self {
        Polynomial::var(Var::X)
    }

    pub fn y() -> Self {
        Polynomial::var(Var::Y)
    }

    /// The single term `c * m` (zero if `c` is zero).
    pub fn term(m: Monomial, c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Polynomial { terms }
    }

    /// Collects terms, merging repeated monomials and dropping zeros.
    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, Rational)>,
    {
        let mut p = Polynomial::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    /// Convenience constructor from integer coefficients `(coef, ex, ey)`.
    pub fn from_int_terms(terms: &[(i64, u32, u32)]) -> Self {
        Polynomial::from_terms(
            terms
                .iter()
                .map(|&(c, ex, ey)| (Monomial::new(ex, ey), rat(c))),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| *m == Monomial::ONE)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Iterates terms in storage order (lexicographic ascending in `(ex, ey)`).
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// Total degree, or `None` for the zero polynomial (degree minus infinity).
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn degree_in(&self, var: Var) -> Option<u32> {
        self.terms.keys().map(|m| m.exponent(var)).max()
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero();
        }
        Polynomial {
            terms: self.terms.iter().map(|(m, a)| (*m, a * c)).collect(),
        }
    }

    /// Multiplies by the single term `c * m`.
    pub fn mul_term(&self, m: &Monomial, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero();
        }
        Polynomial {
            terms: self.terms.iter().map(|(t, a)| (t.mul(m), a * c)).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Polynomial {
        let mut result = Polynomial::one();
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = &result * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Formal partial derivative.
    pub fn partial(&self, var: Var) -> Polynomial {
        let mut out = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = m.exponent(var);
            if e == 0 {
                continue;
            }
            let lowered = match var {
                Var::X => Monomial::new(m.ex - 1, m.ey),
                Var::Y => Monomial::new(m.ex, m.ey - 1),
            };
            out.insert(lowered, c * Rational::from_integer(BigInt::from(e)));
        }
        Polynomial { terms: out }
    }

    /// Exact value at `(x, y)`.
    pub fn evaluate(&self, x: &Rational, y: &Rational) -> Rational {
        let max_x = self.degree_in(Var::X).unwrap_or(0) as usize;
        let max_y = self.degree_in(Var::Y).unwrap_or(0) as usize;
        let xs = powers(x, max_x);
        let ys = powers(y, max_y);
        self.terms
            .iter()
            .map(|(m, c)| c * &xs[m.ex as usize] * &ys[m.ey as usize])
            .fold(Rational::zero(), |acc, t| acc + t)
    }

    /// Substitutes polynomials for both variables: `p(qx, qy)`.
    pub fn compose(&self, qx: &Polynomial, qy: &Polynomial) -> Polynomial {
        let max_x = self.degree_in(Var::X).unwrap_or(0) as usize;
        let max_y = self.degree_in(Var::Y).unwrap_or(0) as usize;
        let mut xs = vec![Polynomial::one()];
        for i in 0..max_x {
            xs.push(&xs[i] * qx);
        }
        let mut ys = vec![Polynomial::one()];
        for i in 0..max_y {
            ys.push(&ys[i] * qy);
        }
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            let t = (&xs[m.ex as usize] * &ys[m.ey as usize]).scale(c);
            out = &out + &t;
        }
        out
    }
}

fn powers(base: &Rational, max: usize) -> Vec<Rational> {
    let mut out = Vec::with_capacity(max + 1);
    out.push(Rational::one());
    for i in 0..max {
        let next = &out[i] * base;
        out.push(next);
    }
    out
}

/// The functional determinant `∂(p, q)/∂(x, y) = p_x q_y - p_y q_x`.
pub fn func_det(p: &Polynomial, q: &Polynomial) -> Polynomial {
    let a = &p.partial(Var::X) * &q.partial(Var::Y);
    let b = &p.partial(Var::Y) * &q.partial(Var::X);
    &a - &b
}

impl Add for &Polynomial {
    type Output = Polynomial;

    fn add(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, c.clone());
        }
        out
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;

    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, -c);
        }
        out
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;

    fn mul(self, rhs: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;

    fn neg(self) -> Polynomial {
        Polynomial {
            terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr for Polynomial {
            type Output = Polynomial;
            fn $method(self, rhs: Polynomial) -> Polynomial {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::expr::format_polynomial(self))
    }
}
