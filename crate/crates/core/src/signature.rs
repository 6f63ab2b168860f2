//! Exact inertia of symmetric rational matrices.
//!
//! The characteristic polynomial of a symmetric matrix has only real roots,
//! so Descartes' rule of signs counts its positive and negative roots
//! exactly. The polynomial itself comes from a similarity reduction to upper
//! Hessenberg form followed by the standard recurrence, carried out modulo
//! enough primes to pin down every integer coefficient.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::matrix::RatMatrix;
use crate::modular::integer_char_poly;
use crate::poly::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("matrix is not symmetric (first mismatch at ({row}, {col}))")]
pub struct NotSymmetric {
    pub row: usize,
    pub col: usize,
}

/// Inertia of a symmetric matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SignatureResult {
    pub signature: i64,
    pub rank: usize,
    pub positive_count: usize,
    pub negative_count: usize,
    pub nondegenerate: bool,
}

/// `M` scaled by the least common denominator `d > 0` of its entries, as a
/// row-major integer matrix.
fn integer_scaled(m: &RatMatrix) -> (Vec<BigInt>, BigInt) {
    let n = m.dim();
    let mut d = BigInt::one();
    for i in 0..n {
        for c in m.row(i) {
            d = d.lcm(c.denom());
        }
    }
    let mut entries = Vec::with_capacity(n * n);
    for i in 0..n {
        for c in m.row(i) {
            entries.push(c.numer() * (&d / c.denom()));
        }
    }
    (entries, d)
}

/// Coefficients of `det(λ·I − M)` in ascending degree; the last entry is 1.
pub fn char_poly(m: &RatMatrix) -> Vec<Rational> {
    let n = m.dim();
    let (entries, d) = integer_scaled(m);
    // det(λI − dM) = d^n · det((λ/d)I − M), so c_k(M) = c_k(dM) / d^(n−k).
    let scaled = integer_char_poly(&entries, n);
    let mut power = BigInt::one();
    let mut out = vec![Rational::zero(); n + 1];
    for k in (0..=n).rev() {
        out[k] = Rational::new(scaled[k].clone(), power.clone());
        power *= &d;
    }
    out
}

/// Sign changes in a coefficient sequence, ignoring zeros.
fn sign_variations<'a>(coeffs: impl Iterator<Item = (usize, &'a BigInt)>, flip_odd: bool) -> usize {
    let mut last: Option<bool> = None;
    let mut changes = 0;
    for (d, c) in coeffs {
        if c.is_zero() {
            continue;
        }
        let mut positive = c.is_positive();
        if flip_odd && d % 2 == 1 {
            positive = !positive;
        }
        if let Some(prev) = last {
            if prev != positive {
                changes += 1;
            }
        }
        last = Some(positive);
    }
    changes
}

fn first_asymmetry(m: &RatMatrix) -> Option<(usize, usize)> {
    let n = m.dim();
    (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .find(|&(i, j)| m[(i, j)] != m[(j, i)])
}

/// Exact counts of positive and negative eigenvalues of a symmetric matrix.
pub fn signature_of(m: &RatMatrix) -> Result<SignatureResult, NotSymmetric> {
    if let Some((row, col)) = first_asymmetry(m) {
        return Err(NotSymmetric { row, col });
    }
    let n = m.dim();
    // Scaling by d > 0 moves every root by the same positive factor, which
    // preserves all sign counts.
    let (entries, _) = integer_scaled(m);
    let cp = integer_char_poly(&entries, n);
    let positive_count = sign_variations(cp.iter().enumerate(), false);
    let negative_count = sign_variations(cp.iter().enumerate(), true);
    let zero_mult = cp.iter().take_while(|c| c.is_zero()).count();
    let rank = n - zero_mult;
    debug_assert_eq!(positive_count + negative_count, rank);
    Ok(SignatureResult {
        signature: positive_count as i64 - negative_count as i64,
        rank,
        positive_count,
        negative_count,
        nondegenerate: rank == n,
    })
}

/// True iff `det M ≠ 0`. The empty matrix is nondegenerate.
pub fn is_nondegenerate(m: &RatMatrix) -> bool {
    let (entries, _) = integer_scaled(m);
    !integer_char_poly(&entries, m.dim())[0].is_zero()
}
