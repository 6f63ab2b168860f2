//! Buchberger's algorithm and ideal certificates in `Q[x, y]`.
//!
//! Reduction is fraction-free over the integers: every polynomial handled by
//! the pair loop is kept primitive with a positive leading coefficient, and
//! rationals only reappear when the final basis is made monic.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::expr::DEFAULT_DEGREE_GUARD;
use crate::poly::{Monomial, Polynomial, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroebnerError {
    #[error("degree guard exceeded: intermediate polynomial of degree {degree} (guard {guard})")]
    DegreeGuardExceeded { degree: u32, guard: u32 },
    #[error("ideal is not zero-dimensional: no pure power of {missing} among the leading monomials")]
    NotZeroDimensional { missing: &'static str },
}

/// Admissible term order on monomials in `x > y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum TermOrder {
    /// Graded reverse lexicographic. In two variables this coincides with
    /// graded lexicographic.
    #[default]
    GrevLex,
    Lex,
}

impl TermOrder {
    /// Order-preserving key that is additive under monomial multiplication.
    pub fn key(&self, m: &Monomial) -> u64 {
        match self {
            TermOrder::GrevLex => (u64::from(m.degree()) << 32) | u64::from(m.ex),
            TermOrder::Lex => (u64::from(m.ex) << 32) | u64::from(m.ey),
        }
    }

    pub fn cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        self.key(a).cmp(&self.key(b))
    }
}

/// Integer polynomial with terms sorted by descending term order.
#[derive(Debug, Clone, PartialEq, Eq)]
struct IntPoly {
    terms: Vec<(Monomial, BigInt)>,
}

impl IntPoly {
    fn lm(&self) -> Monomial {
        self.terms[0].0
    }

    fn lc(&self) -> &BigInt {
        &self.terms[0].1
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn degree(&self) -> u32 {
        self.terms.iter().map(|(m, _)| m.degree()).max().unwrap_or(0)
    }

    /// Scales `p` to a primitive integer polynomial; returns it with the
    /// rational `content` such that `p = content * result`.
    fn from_rational(p: &Polynomial, order: TermOrder) -> (IntPoly, Rational) {
        if p.is_zero() {
            return (IntPoly { terms: Vec::new() }, Rational::one());
        }
        let den = p
            .terms()
            .fold(BigInt::one(), |acc, (_, c)| acc.lcm(c.denom()));
        let mut terms: Vec<(Monomial, BigInt)> = p
            .terms()
            .map(|(m, c)| (*m, c.numer() * (&den / c.denom())))
            .collect();
        terms.sort_by(|a, b| order.cmp(&b.0, &a.0));
        let mut ip = IntPoly { terms };
        let content = ip.make_primitive();
        (ip, Rational::new(content, den))
    }

    /// Divides out the integer content and fixes the leading sign to be
    /// positive. Returns the signed factor removed.
    fn make_primitive(&mut self) -> BigInt {
        if self.terms.is_empty() {
            return BigInt::one();
        }
        let mut g = BigInt::zero();
        for (_, c) in &self.terms {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        if self.terms[0].1.is_negative() {
            g = -g;
        }
        if !g.is_one() {
            for (_, c) in self.terms.iter_mut() {
                *c /= &g;
            }
        }
        g
    }

    fn to_monic_rational(&self) -> Polynomial {
        let lc = Rational::from_integer(self.lc().clone());
        Polynomial::from_terms(
            self.terms
                .iter()
                .map(|(m, c)| (*m, Rational::from_integer(c.clone()) / &lc)),
        )
    }
}

/// Fraction-free full reduction of `p` modulo `reducers`.
///
/// Returns the primitive remainder `r` and a nonzero rational `k` with
/// `r ≡ k * p` modulo the ideal of the reducers.
fn reduce_full(p: &IntPoly, reducers: &[&IntPoly], order: TermOrder) -> (IntPoly, Rational) {
    let mut work: BTreeMap<u64, (Monomial, BigInt)> = p
        .terms
        .iter()
        .map(|(m, c)| (order.key(m), (*m, c.clone())))
        .collect();
    let mut rem: Vec<(Monomial, BigInt)> = Vec::new();
    let mut scale_num = BigInt::one();
    let mut scale_den = BigInt::one();
    let mut steps = 0usize;

    while let Some((_, (m, c))) = work.pop_last() {
        let Some(g) = reducers.iter().find(|g| g.lm().divides(&m)) else {
            rem.push((m, c));
            continue;
        };
        let q = g.lm().quotient_of(&m).expect("divisibility checked");
        let gcd = g.lc().gcd(&c);
        let a = g.lc() / &gcd;
        let b = &c / &gcd;
        if !a.is_one() {
            for (_, v) in work.values_mut() {
                *v *= &a;
            }
            for (_, v) in rem.iter_mut() {
                *v *= &a;
            }
            scale_num *= &a;
        }
        for (t, d) in &g.terms[1..] {
            let mt = q.mul(t);
            let key = order.key(&mt);
            let delta = &b * d;
            match work.get_mut(&key) {
                Some(entry) => {
                    entry.1 -= delta;
                    if entry.1.is_zero() {
                        work.remove(&key);
                    }
                }
                None => {
                    work.insert(key, (mt, -delta));
                }
            }
        }
        steps += 1;
        if steps % 8 == 0 {
            let mut g = BigInt::zero();
            for (_, v) in work.values().chain(rem.iter()) {
                g = g.gcd(v);
                if g.is_one() {
                    break;
                }
            }
            if !g.is_zero() && !g.is_one() {
                for (_, v) in work.values_mut() {
                    *v /= &g;
                }
                for (_, v) in rem.iter_mut() {
                    *v /= &g;
                }
                scale_den *= &g;
            }
        }
    }
    let mut r = IntPoly { terms: rem };
    let removed = r.make_primitive();
    scale_den *= removed;
    (r, Rational::new(scale_num, scale_den))
}

fn s_polynomial(f: &IntPoly, g: &IntPoly, order: TermOrder) -> IntPoly {
    let lcm = f.lm().lcm(&g.lm());
    let qf = f.lm().quotient_of(&lcm).expect("lcm is a multiple");
    let qg = g.lm().quotient_of(&lcm).expect("lcm is a multiple");
    let gcd = f.lc().gcd(g.lc());
    let af = g.lc() / &gcd;
    let ag = f.lc() / &gcd;
    let mut acc: BTreeMap<u64, (Monomial, BigInt)> = BTreeMap::new();
    for (m, c) in &f.terms[1..] {
        let mm = qf.mul(m);
        acc.entry(order.key(&mm)).or_insert((mm, BigInt::zero())).1 += &af * c;
    }
    for (m, c) in &g.terms[1..] {
        let mm = qg.mul(m);
        acc.entry(order.key(&mm)).or_insert((mm, BigInt::zero())).1 -= &ag * c;
    }
    let mut p = IntPoly {
        terms: acc
            .into_values()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .collect(),
    };
    p.make_primitive();
    p
}

/// A reduced Gröbner basis together with its term order.
///
/// Generators are monic and sorted by ascending leading monomial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroebnerBasis {
    generators: Vec<Polynomial>,
    order: TermOrder,
    integral: Vec<IntPoly>,
}

impl GroebnerBasis {
    fn from_integral(mut integral: Vec<IntPoly>, order: TermOrder) -> Self {
        integral.sort_by(|a, b| order.cmp(&a.lm(), &b.lm()));
        let generators = integral.iter().map(IntPoly::to_monic_rational).collect();
        GroebnerBasis {
            generators,
            order,
            integral,
        }
    }

    pub fn generators(&self) -> &[Polynomial] {
        &self.generators
    }

    pub fn order(&self) -> TermOrder {
        self.order
    }

    pub fn leading_monomials(&self) -> Vec<Monomial> {
        self.integral.iter().map(IntPoly::lm).collect()
    }

    /// Leading term of a polynomial under this basis' order.
    pub fn leading_monomial(&self, p: &Polynomial) -> Option<Monomial> {
        p.terms()
            .map(|(m, _)| *m)
            .max_by(|a, b| self.order.cmp(a, b))
    }

    /// True iff the basis is `{1}`, i.e. the ideal is the whole ring.
    pub fn is_unit_ideal(&self) -> bool {
        self.integral.len() == 1 && self.integral[0].lm() == Monomial::ONE
    }

    /// True iff both `x` and `y` have a pure power among the leading monomials.
    pub fn is_zero_dimensional(&self) -> bool {
        self.pure_power_bounds().is_ok()
    }

    fn pure_power_bounds(&self) -> Result<(u32, u32), GroebnerError> {
        let lms = self.leading_monomials();
        let bx = lms.iter().filter(|m| m.ey == 0).map(|m| m.ex).min();
        let by = lms.iter().filter(|m| m.ex == 0).map(|m| m.ey).min();
        match (bx, by) {
            (Some(a), Some(b)) => Ok((a, b)),
            (None, _) => Err(GroebnerError::NotZeroDimensional { missing: "x" }),
            (_, None) => Err(GroebnerError::NotZeroDimensional { missing: "y" }),
        }
    }

    /// Monomials outside the leading-term ideal, ascending in the term order.
    /// Their number is the dimension of the quotient algebra.
    pub fn standard_monomials(&self) -> Result<Vec<Monomial>, GroebnerError> {
        let (bx, by) = self.pure_power_bounds()?;
        let lms = self.leading_monomials();
        let mut out = Vec::new();
        for ex in 0..bx {
            for ey in 0..by {
                let m = Monomial::new(ex, ey);
                if !lms.iter().any(|l| l.divides(&m)) {
                    out.push(m);
                }
            }
        }
        out.sort_by(|a, b| self.order.cmp(a, b));
        Ok(out)
    }

    /// Remainder of `p` on full division by the basis.
    pub fn normal_form(&self, p: &Polynomial) -> Polynomial {
        if p.is_zero() {
            return Polynomial::zero();
        }
        let (ip, content) = IntPoly::from_rational(p, self.order);
        let reducers: Vec<&IntPoly> = self.integral.iter().collect();
        let (r, k) = reduce_full(&ip, &reducers, self.order);
        let factor = content / k;
        Polynomial::from_terms(
            r.terms
                .into_iter()
                .map(|(m, c)| (m, Rational::from_integer(c) * &factor)),
        )
    }

    /// True iff `p` lies in the ideal.
    pub fn contains(&self, p: &Polynomial) -> bool {
        self.normal_form(p).is_zero()
    }

    /// Checks the defining properties: every S-polynomial reduces to zero,
    /// the basis is minimal, tails are reduced, and generators are monic.
    pub fn verify(&self) -> bool {
        let reducers: Vec<&IntPoly> = self.integral.iter().collect();
        let lms = self.leading_monomials();
        for (i, g) in self.generators.iter().enumerate() {
            if self.leading_monomial(g) != Some(lms[i]) || !g.coeff(&lms[i]).is_one() {
                return false;
            }
            for (m, _) in g.terms() {
                let hits = lms.iter().filter(|l| l.divides(m)).count();
                if (*m == lms[i] && hits != 1) || (*m != lms[i] && hits != 0) {
                    return false;
                }
            }
        }
        for i in 0..self.integral.len() {
            for j in (i + 1)..self.integral.len() {
                let s = s_polynomial(&self.integral[i], &self.integral[j], self.order);
                if !reduce_full(&s, &reducers, self.order).0.is_zero() {
                    return false;
                }
            }
        }
        true
    }
}

/// Remainder of `p` on division by `g` (free-function form).
pub fn normal_form(p: &Polynomial, g: &GroebnerBasis) -> Polynomial {
    g.normal_form(p)
}

#[derive(Debug, Clone)]
struct Pair {
    i: usize,
    j: usize,
    lcm: Monomial,
}

struct Builder {
    order: TermOrder,
    guard: u32,
    store: Vec<IntPoly>,
    basis: Vec<usize>,
    pairs: Vec<Pair>,
}

impl Builder {
    fn lm(&self, i: usize) -> Monomial {
        self.store[i].lm()
    }

    /// Gebauer–Möller installation of a new basis element.
    fn update(&mut self, h: IntPoly) {
        let hi = self.store.len();
        let lh = h.lm();
        self.store.push(h);

        let mut pending: Vec<Pair> = self
            .basis
            .iter()
            .map(|&g| Pair {
                i: g,
                j: hi,
                lcm: self.lm(g).lcm(&lh),
            })
            .collect();
        pending.reverse();

        // Chain criterion among the new pairs, applied sequentially so that
        // exactly one representative of each lcm survives.
        let mut accepted: Vec<Pair> = Vec::new();
        while let Some(p) = pending.pop() {
            let coprime = self.lm(p.i).is_coprime(&lh);
            let dominated = pending
                .iter()
                .chain(accepted.iter())
                .any(|q| q.lcm.divides(&p.lcm));
            if coprime || !dominated {
                accepted.push(p);
            }
        }
        // Product criterion.
        let fresh: Vec<Pair> = accepted
            .into_iter()
            .filter(|p| !self.lm(p.i).is_coprime(&lh))
            .collect();

        // Old pairs made redundant by the new element.
        let store = &self.store;
        self.pairs.retain(|p| {
            !lh.divides(&p.lcm)
                || store[p.i].lm().lcm(&lh) == p.lcm
                || store[p.j].lm().lcm(&lh) == p.lcm
        });
        self.pairs.extend(fresh);

        let store = &self.store;
        self.basis.retain(|&g| !lh.divides(&store[g].lm()));
        self.basis.push(hi);
    }

    fn check_guard(&self, p: &IntPoly) -> Result<(), GroebnerError> {
        let degree = p.degree();
        if degree > self.guard {
            return Err(GroebnerError::DegreeGuardExceeded {
                degree,
                guard: self.guard,
            });
        }
        Ok(())
    }

    fn next_pair(&mut self) -> Option<Pair> {
        let order = self.order;
        let idx = self
            .pairs
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| {
                order
                    .cmp(&a.lcm, &b.lcm)
                    .then(a.j.cmp(&b.j))
                    .then(a.i.cmp(&b.i))
            })
            .map(|(k, _)| k)?;
        Some(self.pairs.swap_remove(idx))
    }

    fn reducers(&self) -> Vec<&IntPoly> {
        self.basis.iter().map(|&i| &self.store[i]).collect()
    }
}

/// Reduced Gröbner basis with the default degree guard.
pub fn buchberger(gens: &[Polynomial], order: TermOrder) -> Result<GroebnerBasis, GroebnerError> {
    buchberger_with_guard(gens, order, DEFAULT_DEGREE_GUARD)
}

/// Reduced Gröbner basis of the ideal generated by `gens`.
///
/// Uses the normal selection strategy with the product and chain criteria.
/// Fails if any input or intermediate polynomial exceeds total degree `guard`.
pub fn buchberger_with_guard(
    gens: &[Polynomial],
    order: TermOrder,
    guard: u32,
) -> Result<GroebnerBasis, GroebnerError> {
    let mut b = Builder {
        order,
        guard,
        store: Vec::new(),
        basis: Vec::new(),
        pairs: Vec::new(),
    };

    let mut inputs: Vec<IntPoly> = gens
        .iter()
        .filter(|g| !g.is_zero())
        .map(|g| IntPoly::from_rational(g, order).0)
        .collect();
    for p in &inputs {
        b.check_guard(p)?;
    }
    inputs.sort_by(|a, c| order.cmp(&a.lm(), &c.lm()));
    for p in inputs {
        let (h, _) = reduce_full(&p, &b.reducers(), order);
        if h.is_zero() {
            continue;
        }
        if h.lm() == Monomial::ONE {
            return Ok(unit_basis(order));
        }
        b.update(h);
    }

    while let Some(pair) = b.next_pair() {
        let s = s_polynomial(&b.store[pair.i], &b.store[pair.j], order);
        b.check_guard(&s)?;
        let (h, _) = reduce_full(&s, &b.reducers(), order);
        if h.is_zero() {
            continue;
        }
        b.check_guard(&h)?;
        if h.lm() == Monomial::ONE {
            return Ok(unit_basis(order));
        }
        b.update(h);
    }

    // The basis is minimal; inter-reduce tails.
    let minimal: Vec<IntPoly> = b.basis.iter().map(|&i| b.store[i].clone()).collect();
    let mut reduced = Vec::with_capacity(minimal.len());
    for (k, g) in minimal.iter().enumerate() {
        let others: Vec<&IntPoly> = minimal
            .iter()
            .enumerate()
            .filter(|(k2, _)| *k2 != k)
            .map(|(_, p)| p)
            .collect();
        let (r, _) = reduce_full(g, &others, order);
        debug_assert_eq!(r.lm(), g.lm());
        reduced.push(r);
    }
    let gb = GroebnerBasis::from_integral(reduced, order);
    debug_assert!(gb.verify(), "Buchberger output failed verification");
    Ok(gb)
}

fn unit_basis(order: TermOrder) -> GroebnerBasis {
    GroebnerBasis::from_integral(
        vec![IntPoly {
            terms: vec![(Monomial::ONE, BigInt::one())],
        }],
        order,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;
    use crate::testutil::arb_poly;
    use proptest::prelude::*;

    fn p(terms: &[(i64, u32, u32)]) -> Polynomial {
        Polynomial::from_int_terms(terms)
    }

    fn gb(gens: &[Polynomial]) -> GroebnerBasis {
        buchberger(gens, TermOrder::GrevLex).unwrap()
    }

    #[test]
    fn term_orders() {
        let o = TermOrder::GrevLex;
        assert_eq!(o.cmp(&Monomial::new(0, 2), &Monomial::new(1, 0)), Ordering::Greater);
        assert_eq!(o.cmp(&Monomial::new(2, 0), &Monomial::new(1, 1)), Ordering::Greater);
        let l = TermOrder::Lex;
        assert_eq!(l.cmp(&Monomial::new(0, 9), &Monomial::new(1, 0)), Ordering::Less);
        assert_eq!(l.cmp(&Monomial::ONE, &Monomial::Y), Ordering::Less);
    }

    #[test]
    fn trivial_bases() {
        let g = gb(&[Polynomial::x(), Polynomial::y()]);
        assert_eq!(g.generators(), &[Polynomial::y(), Polynomial::x()]);
        assert!(!g.is_unit_ideal());
        assert!(g.is_zero_dimensional());
        assert_eq!(g.standard_monomials().unwrap(), vec![Monomial::ONE]);

        let whitney = gb(&[
            p(&[(1, 1, 0), (3, 0, 2)]),
            p(&[(-6, 0, 1)]),
            p(&[(1, 1, 0), (-3, 0, 2)]),
        ]);
        assert_eq!(whitney, g);

        let line = gb(&[Polynomial::x()]);
        assert!(!line.is_zero_dimensional());
        assert!(matches!(
            line.standard_monomials(),
            Err(GroebnerError::NotZeroDimensional { missing: "y" })
        ));

        let unit = gb(&[p(&[(3, 0, 0)])]);
        assert!(unit.is_unit_ideal());
        assert!(unit.is_zero_dimensional());
        assert!(unit.standard_monomials().unwrap().is_empty());
        assert!(gb(&[Polynomial::zero(), p(&[(1, 1, 0), (1, 0, 0)]), p(&[(1, 1, 0)])]).is_unit_ideal());
    }

    #[test]
    fn normal_forms_modulo_coordinates() {
        let g = gb(&[Polynomial::x(), Polynomial::y()]);
        assert!(g.normal_form(&p(&[(1, 2, 0), (1, 0, 1)])).is_zero());
        assert_eq!(g.normal_form(&p(&[(3, 0, 0), (1, 1, 0)])), p(&[(3, 0, 0)]));
    }

    #[test]
    fn squares_map_is_not_unit() {
        // f = (x^2, y^2): J = 4xy, F1 = -8x^2... all vanish at the origin.
        let gens = [p(&[(1, 1, 1)]), p(&[(1, 2, 0)]), p(&[(1, 0, 2)])];
        let g = gb(&gens);
        assert!(!g.is_unit_ideal());
        assert_eq!(g.standard_monomials().unwrap().len(), 3);
    }

    #[test]
    fn circle_and_line() {
        // x^2 + y^2 - 1, x - y: two points, dim 2.
        let g = gb(&[p(&[(1, 2, 0), (1, 0, 2), (-1, 0, 0)]), p(&[(1, 1, 0), (-1, 0, 1)])]);
        assert_eq!(g.standard_monomials().unwrap(), vec![Monomial::ONE, Monomial::Y]);
        assert_eq!(
            g.normal_form(&p(&[(1, 0, 2)])),
            Polynomial::constant(crate::poly::ratio(1, 2))
        );
        let lex = buchberger(g.generators(), TermOrder::Lex).unwrap();
        assert_eq!(lex.standard_monomials().unwrap().len(), 2);
    }

    #[test]
    fn guard_trips() {
        let gens = [p(&[(1, 5, 0), (1, 0, 1)]), p(&[(1, 0, 5), (1, 1, 0)])];
        assert!(buchberger_with_guard(&gens, TermOrder::GrevLex, 64).is_ok());
        assert!(matches!(
            buchberger_with_guard(&gens, TermOrder::GrevLex, 4),
            Err(GroebnerError::DegreeGuardExceeded { guard: 4, .. })
        ));
    }

    #[test]
    fn normal_form_of_rationals() {
        let g = gb(&[p(&[(2, 2, 0), (-1, 0, 0)]), p(&[(3, 0, 1), (-1, 1, 0)])]);
        let q = Polynomial::from_terms([
            (Monomial::new(3, 0), crate::poly::ratio(1, 3)),
            (Monomial::new(0, 1), crate::poly::ratio(-5, 7)),
        ]);
        let r = g.normal_form(&q);
        assert!(g.contains(&(&q - &r)));
        assert!(r.terms().all(|(m, _)| g.leading_monomials().iter().all(|l| !l.divides(m))));
        assert_eq!(g.normal_form(&Polynomial::constant(rat(4))), Polynomial::constant(rat(4)));
    }

    proptest! {
        #![proptest_config(ProptestConfig {
            cases: 500,
            rng_seed: proptest::test_runner::RngSeed::Fixed(0x5eed_0003),
            ..ProptestConfig::default()
        })]

        #[test]
        fn random_bases_verify(a in arb_poly(3), b in arb_poly(3), c in arb_poly(2)) {
            let gens = [a, b, c];
            let g = buchberger(&gens, TermOrder::GrevLex).unwrap();
            prop_assert!(g.verify());
            for f in &gens {
                prop_assert!(g.contains(f));
            }
        }

        #[test]
        fn normal_form_idempotent_and_linear(
            a in arb_poly(3), b in arb_poly(3),
            p1 in arb_poly(5), p2 in arb_poly(5),
            s in -5i64..5, t in 1i64..5,
        ) {
            let g = buchberger(&[a, b], TermOrder::GrevLex).unwrap();
            let n1 = g.normal_form(&p1);
            prop_assert_eq!(g.normal_form(&n1), n1.clone());
            let (s, t) = (rat(s), crate::poly::ratio(1, t));
            let combo = &p1.scale(&s) + &p2.scale(&t);
            let expected = &n1.scale(&s) + &g.normal_form(&p2).scale(&t);
            prop_assert_eq!(g.normal_form(&combo), expected);
        }
    }
}
