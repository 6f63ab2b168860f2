//! The finite-dimensional algebra `A = Q[x, y] / I` of a zero-dimensional
//! ideal, its trace functional, and trace quadratic forms `a ↦ T(δ·a²)`.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::groebner::{GroebnerBasis, GroebnerError};
use crate::matrix::{dot, RatMatrix};
use crate::poly::{Monomial, Polynomial, Rational};

/// `A = Q[x, y] / I` in the basis of standard monomials.
#[derive(Debug, Clone)]
pub struct QuotientAlgebra {
    basis: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
    gb: GroebnerBasis,
    mult_x: RatMatrix,
    mult_y: RatMatrix,
    /// `products[i][j]` = coordinates of `NF(b_i * b_j)`.
    products: Vec<Vec<Scaled>>,
    /// `traces[k]` = `T(b_k)`.
    traces: Vec<Rational>,
    /// `T(b_l * b_k)` over the common denominator `gram_den`.
    gram_num: Vec<Vec<BigInt>>,
    gram_den: BigInt,
}

/// A rational vector as integer numerators over one positive denominator.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Scaled {
    num: Vec<BigInt>,
    den: BigInt,
}

impl Scaled {
    fn from_rationals(v: &[Rational]) -> Self {
        let den = v.iter().fold(BigInt::one(), |d, c| d.lcm(c.denom()));
        let num = v.iter().map(|c| c.numer() * (&den / c.denom())).collect();
        Scaled { num, den }
    }

    fn to_rationals(&self) -> Vec<Rational> {
        self.num
            .iter()
            .map(|c| Rational::new(c.clone(), self.den.clone()))
            .collect()
    }

    /// `Σ num_i · w_i`, skipping zero numerators.
    fn dot_num(&self, w: &[BigInt]) -> BigInt {
        self.num
            .iter()
            .zip(w)
            .filter(|(a, _)| !a.is_zero())
            .fold(BigInt::zero(), |acc, (a, b)| acc + a * b)
    }
}

/// Symmetric matrix of the form `a ↦ T(δ·a²)` in the algebra's basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymmetricForm {
    pub matrix: RatMatrix,
    pub delta_label: String,
}

impl QuotientAlgebra {
    /// Builds the algebra from a reduced, zero-dimensional Gröbner basis.
    pub fn new(gb: &GroebnerBasis) -> Result<Self, GroebnerError> {
        let basis = gb.standard_monomials()?;
        let n = basis.len();
        let index: HashMap<Monomial, usize> =
            basis.iter().enumerate().map(|(i, m)| (*m, i)).collect();

        let mut alg = QuotientAlgebra {
            basis,
            index,
            gb: gb.clone(),
            mult_x: RatMatrix::zeros(n),
            mult_y: RatMatrix::zeros(n),
            products: Vec::new(),
            traces: Vec::new(),
            gram_num: Vec::new(),
            gram_den: BigInt::one(),
        };

        let empty = Scaled {
            num: Vec::new(),
            den: BigInt::one(),
        };
        let mut products = vec![vec![empty; n]; n];
        for i in 0..n {
            for j in i..n {
                let m = alg.basis[i].mul(&alg.basis[j]);
                let v = Scaled::from_rationals(&alg.coords_of_monomial(&m));
                products[j][i] = v.clone();
                products[i][j] = v;
            }
        }
        for j in 0..n {
            let cx = alg.coords_of_monomial(&alg.basis[j].mul(&Monomial::X));
            let cy = alg.coords_of_monomial(&alg.basis[j].mul(&Monomial::Y));
            alg.mult_x.set_column(j, &cx);
            alg.mult_y.set_column(j, &cy);
        }
        // Cheap enough to check on small algebras only.
        debug_assert!(
            n > 24 || alg.mult_x.mul(&alg.mult_y) == alg.mult_y.mul(&alg.mult_x),
            "multiplication matrices must commute"
        );
        // T(b_k) = trace of a ↦ b_k·a, whose column j is products[k][j].
        alg.traces = (0..n)
            .map(|k| {
                (0..n).fold(Rational::zero(), |acc, j| {
                    let p = &products[k][j];
                    acc + Rational::new(p.num[j].clone(), p.den.clone())
                })
            })
            .collect();
        let t = Scaled::from_rationals(&alg.traces);
        let gram: Vec<Rational> = (0..n)
            .flat_map(|l| (0..n).map(move |k| (l, k)))
            .map(|(l, k)| {
                let p = &products[l][k];
                Rational::new(p.dot_num(&t.num), &p.den * &t.den)
            })
            .collect();
        let g = Scaled::from_rationals(&gram);
        alg.gram_num = g.num.chunks(n.max(1)).map(|r| r.to_vec()).collect();
        alg.gram_den = g.den;
        alg.products = products;
        Ok(alg)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Monomial] {
        &self.basis
    }

    pub fn groebner_basis(&self) -> &GroebnerBasis {
        &self.gb
    }

    pub fn mult_x(&self) -> &RatMatrix {
        &self.mult_x
    }

    pub fn mult_y(&self) -> &RatMatrix {
        &self.mult_y
    }

    fn coords_of_monomial(&self, m: &Monomial) -> Vec<Rational> {
        if let Some(&i) = self.index.get(m) {
            let mut v = vec![Rational::zero(); self.dim()];
            v[i] = num_traits::One::one();
            return v;
        }
        self.coords(&Polynomial::term(*m, num_traits::One::one()))
    }

    /// Coordinate vector of the residue class of `h`.
    pub fn coords(&self, h: &Polynomial) -> Vec<Rational> {
        let nf = self.gb.normal_form(h);
        let mut v = vec![Rational::zero(); self.dim()];
        for (m, c) in nf.terms() {
            let i = self.index[m];
            v[i] = c.clone();
        }
        v
    }

    /// Polynomial representative of a coordinate vector.
    pub fn element(&self, coords: &[Rational]) -> Polynomial {
        Polynomial::from_terms(self.basis.iter().copied().zip(coords.iter().cloned()))
    }

    /// Coordinates of `a * b` for coordinate vectors `a`, `b`.
    fn multiply_coords(&self, a: &[Rational], b: &[Rational]) -> Vec<Rational> {
        let n = self.dim();
        let mut out = vec![Rational::zero(); n];
        for (i, ai) in a.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (j, bj) in b.iter().enumerate() {
                if bj.is_zero() {
                    continue;
                }
                let s = ai * bj;
                for (o, p) in out.iter_mut().zip(&self.products[i][j].to_rationals()) {
                    if !p.is_zero() {
                        *o += &s * p;
                    }
                }
            }
        }
        out
    }

    /// Matrix of `a ↦ h·a` in the basis.
    pub fn mult_matrix(&self, h: &Polynomial) -> RatMatrix {
        let v = self.coords(h);
        let n = self.dim();
        let mut m = RatMatrix::zeros(n);
        for j in 0..n {
            let mut col = vec![Rational::zero(); n];
            for (k, vk) in v.iter().enumerate() {
                if vk.is_zero() {
                    continue;
                }
                for (c, p) in col.iter_mut().zip(&self.products[k][j].to_rationals()) {
                    if !p.is_zero() {
                        *c += vk * p;
                    }
                }
            }
            m.set_column(j, &col);
        }
        m
    }

    /// The trace functional `T(h) = tr(a ↦ h·a)`.
    pub fn trace(&self, h: &Polynomial) -> Rational {
        dot(&self.coords(h), &self.traces)
    }

    /// Matrix with entries `T(δ·b_i·b_j)`.
    ///
    /// With `w_k = T(δ·b_k)`, each entry is the linear functional `w` applied
    /// to the cached coordinates of `b_i·b_j`.
    pub fn form_matrix(&self, delta: &Polynomial, label: &str) -> SymmetricForm {
        let n = self.dim();
        let v = Scaled::from_rationals(&self.coords(delta));
        // T(δ b_k) = Σ_l v_l T(b_l b_k) = w_k / (v.den · gram_den)
        let mut w = vec![BigInt::zero(); n];
        for (vl, row) in v.num.iter().zip(&self.gram_num) {
            if vl.is_zero() {
                continue;
            }
            for (wk, g) in w.iter_mut().zip(row) {
                *wk += vl * g;
            }
        }
        let den = &v.den * &self.gram_den;
        let mut matrix = RatMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                let p = &self.products[i][j];
                let e = Rational::new(p.dot_num(&w), &p.den * &den);
                matrix[(j, i)] = e.clone();
                matrix[(i, j)] = e;
            }
        }
        SymmetricForm {
            matrix,
            delta_label: label.to_string(),
        }
    }

    /// `Θ_δ(a) = T(δ·a²)` evaluated directly from the algebra product.
    pub fn form_value(&self, delta: &Polynomial, a: &[Rational]) -> Rational {
        let sq = self.multiply_coords(a, a);
        let prod = self.multiply_coords(&self.coords(delta), &sq);
        dot(&prod, &self.traces)
    }
}

/// Free-function forms of the algebra operations.
pub fn build_algebra(gb: &GroebnerBasis) -> Result<QuotientAlgebra, GroebnerError> {
    QuotientAlgebra::new(gb)
}

pub fn mult_matrix(alg: &QuotientAlgebra, h: &Polynomial) -> RatMatrix {
    alg.mult_matrix(h)
}

pub fn trace_functional(alg: &QuotientAlgebra, h: &Polynomial) -> Rational {
    alg.trace(h)
}

pub fn form_matrix(alg: &QuotientAlgebra, delta: &Polynomial) -> SymmetricForm {
    alg.form_matrix(delta, &crate::expr::format_polynomial(delta))
}

/// Evaluates `h` at the commuting pair `(mx, my)`.
pub fn evaluate_at_matrices(h: &Polynomial, mx: &RatMatrix, my: &RatMatrix) -> RatMatrix {
    let n = mx.dim();
    let max_x = h.degree_in(crate::poly::Var::X).unwrap_or(0);
    let max_y = h.degree_in(crate::poly::Var::Y).unwrap_or(0);
    let mut px = vec![RatMatrix::identity(n)];
    for i in 0..max_x as usize {
        px.push(px[i].mul(mx));
    }
    let mut py = vec![RatMatrix::identity(n)];
    for i in 0..max_y as usize {
        py.push(py[i].mul(my));
    }
    let mut out = RatMatrix::zeros(n);
    for (m, c) in h.terms() {
        let t = px[m.ex as usize].mul(&py[m.ey as usize]).scale(c);
        out = out.add(&t);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groebner::{buchberger, TermOrder};
    use crate::poly::{rat, ratio};
    use crate::testutil::arb_poly;
    use proptest::prelude::*;

    fn p(terms: &[(i64, u32, u32)]) -> Polynomial {
        Polynomial::from_int_terms(terms)
    }

    fn algebra(gens: &[Polynomial]) -> QuotientAlgebra {
        QuotientAlgebra::new(&buchberger(gens, TermOrder::GrevLex).unwrap()).unwrap()
    }

    /// Radical ideal of the four points (0,0), (1,0), (0,2), (1,2).
    fn grid() -> QuotientAlgebra {
        algebra(&[p(&[(1, 2, 0), (-1, 1, 0)]), p(&[(1, 0, 2), (-2, 0, 1)])])
    }

    #[test]
    fn origin_algebra() {
        let a = algebra(&[Polynomial::x(), Polynomial::y()]);
        assert_eq!(a.basis(), &[Monomial::ONE]);
        assert_eq!(a.mult_x(), &RatMatrix::zeros(1));
        assert_eq!(a.mult_y(), &RatMatrix::zeros(1));
        assert_eq!(a.trace(&Polynomial::one()), rat(1));
    }

    #[test]
    fn unit_ideal_is_empty_algebra() {
        let a = algebra(&[Polynomial::one()]);
        assert_eq!(a.dim(), 0);
        assert_eq!(a.trace(&Polynomial::x()), rat(0));
        assert_eq!(a.form_matrix(&Polynomial::one(), "1").matrix.dim(), 0);
    }

    #[test]
    fn not_zero_dimensional() {
        let gb = buchberger(&[Polynomial::x()], TermOrder::GrevLex).unwrap();
        assert!(QuotientAlgebra::new(&gb).is_err());
    }

    #[test]
    fn trace_counts_points() {
        // Reduced ideal of four real points: T(h) = Σ h(p).
        let a = grid();
        assert_eq!(a.dim(), 4);
        assert_eq!(a.trace(&Polynomial::one()), rat(4));
        assert_eq!(a.trace(&Polynomial::x()), rat(2));
        assert_eq!(a.trace(&p(&[(1, 0, 2)])), rat(8));
        assert_eq!(a.trace(&p(&[(1, 1, 1), (3, 0, 0)])), rat(2 + 12));
        assert!(a.trace(&Polynomial::zero()).is_zero());
        assert_eq!(a.mult_matrix(&Polynomial::one()), RatMatrix::identity(4));
        assert!(a.mult_matrix(&p(&[(1, 2, 0), (-1, 1, 0)])).is_zero());
    }

    #[test]
    fn form_matrix_is_symmetric_and_counts() {
        let a = grid();
        let f = a.form_matrix(&p(&[(1, 1, 0), (-1, 0, 1)]), "x - y");
        assert!(f.matrix.is_symmetric());
        // sgn(x - y) at (0,0),(1,0),(0,2),(1,2) = 0, +, -, -.
        let s = crate::signature::signature_of(&f.matrix).unwrap();
        assert_eq!((s.signature, s.rank), (-1, 3));
    }

    proptest! {
        #![proptest_config(ProptestConfig {
            cases: 200,
            rng_seed: proptest::test_runner::RngSeed::Fixed(0x5eed_0004),
            ..ProptestConfig::default()
        })]

        #[test]
        fn mult_matrix_is_homomorphism(a in arb_poly(4), b in arb_poly(4)) {
            let alg = grid();
            let (ma, mb) = (alg.mult_matrix(&a), alg.mult_matrix(&b));
            prop_assert_eq!(alg.mult_matrix(&(&a * &b)), ma.mul(&mb));
            prop_assert_eq!(alg.mult_matrix(&(&a + &b)), ma.add(&mb));
            prop_assert_eq!(&ma, &evaluate_at_matrices(&a, alg.mult_x(), alg.mult_y()));
            prop_assert_eq!(alg.trace(&a), ma.trace());
        }

        #[test]
        fn trace_ignores_ideal(a in arb_poly(4), g in arb_poly(2)) {
            let alg = grid();
            let member = &g * &p(&[(1, 0, 2), (-2, 0, 1)]);
            prop_assert_eq!(alg.trace(&(&a + &member)), alg.trace(&a));
        }

        #[test]
        fn form_matches_direct_evaluation(
            delta in arb_poly(3),
            coords in prop::collection::vec(-6i64..6, 4),
        ) {
            let alg = grid();
            let f = alg.form_matrix(&delta, "delta");
            let a: Vec<Rational> = coords.iter().map(|&c| ratio(c, 2)).collect();
            let bilinear = dot(&a, &f.matrix.mul_vec(&a));
            prop_assert_eq!(bilinear, alg.form_value(&delta, &a));
            let elem = alg.element(&a);
            prop_assert_eq!(alg.form_value(&delta, &a), alg.trace(&(&delta * &(&elem * &elem))));
        }
    }
}
