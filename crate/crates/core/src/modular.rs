//! Characteristic polynomials of integer matrices, computed exactly by
//! Hessenberg reduction modulo word-size primes and Chinese remaindering.
//!
//! Enough primes are used that their product exceeds twice a Hadamard-type
//! bound on every coefficient, so the symmetric lift is the true integer.

use num_bigint::{BigInt, Sign};
use num_traits::One;

const PRIME_CEILING: u64 = 1 << 31;

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * a % p;
        }
        a = a * a % p;
        e >>= 1;
    }
    acc
}

/// Deterministic Miller–Rabin for `n < 2^32`.
fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % q == 0 {
            return n == q;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 7, 61] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = x * x % n;
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Odd primes below 2^31, descending.
fn primes() -> impl Iterator<Item = u64> {
    (3..PRIME_CEILING).rev().step_by(2).filter(|&n| is_prime(n))
}

/// A prime below 2^31 with a precomputed Barrett constant.
#[derive(Clone, Copy)]
struct Modulus {
    p: u64,
    mu: u64,
}

impl Modulus {
    fn new(p: u64) -> Self {
        Modulus { p, mu: u64::MAX / p }
    }

    /// `x mod p` for any `x < 2^64`.
    #[inline]
    fn reduce(self, x: u64) -> u64 {
        let q = ((x as u128 * self.mu as u128) >> 64) as u64;
        let mut r = x - q * self.p;
        while r >= self.p {
            r -= self.p;
        }
        r
    }
}

/// An integer stored as sign and little-endian base-2^32 digits, for fast
/// reduction modulo many small primes.
struct Digits {
    negative: bool,
    digits: Vec<u32>,
}

impl Digits {
    fn new(v: &BigInt) -> Self {
        let (sign, digits) = v.to_u32_digits();
        Digits {
            negative: sign == Sign::Minus,
            digits,
        }
    }

    fn residue(&self, m: Modulus) -> u64 {
        let p = m.p;
        let r = self
            .digits
            .iter()
            .rev()
            .fold(0u64, |r, &d| m.reduce((r << 32) | d as u64));
        if self.negative && r != 0 {
            p - r
        } else {
            r
        }
    }
}

/// Characteristic polynomial of a row-major `n×n` matrix over `F_p`,
/// ascending coefficients. The matrix is overwritten.
fn char_poly_mod(h: &mut [u64], n: usize, m: Modulus) -> Vec<u64> {
    let p = m.p;
    for col in 0..n.saturating_sub(2) {
        let k = col + 1;
        let Some(pivot_row) = (k..n).find(|&i| h[i * n + col] != 0) else {
            continue;
        };
        if pivot_row != k {
            for j in 0..n {
                h.swap(pivot_row * n + j, k * n + j);
            }
            for i in 0..n {
                h.swap(i * n + pivot_row, i * n + k);
            }
        }
        let inv = pow_mod(h[k * n + col], p - 2, p);
        for i in (k + 1)..n {
            let hic = h[i * n + col];
            if hic == 0 {
                continue;
            }
            let f = m.reduce(hic * inv);
            let nf = p - f;
            // row_i -= f * row_k; earlier columns of both rows are zero.
            for j in col..n {
                let v = h[k * n + j];
                if v != 0 {
                    h[i * n + j] = m.reduce(h[i * n + j] + nf * v);
                }
            }
            // col_k += f * col_i
            for r in 0..n {
                let v = h[r * n + i];
                if v != 0 {
                    h[r * n + k] = m.reduce(h[r * n + k] + f * v);
                }
            }
        }
    }

    let mut polys: Vec<Vec<u64>> = vec![vec![1]];
    for k in 1..=n {
        let prev = &polys[k - 1];
        let mut next = vec![0u64; k + 1];
        let diag = h[(k - 1) * n + k - 1];
        for (d, &c) in prev.iter().enumerate() {
            next[d + 1] = m.reduce(next[d + 1] + c);
            next[d] = m.reduce(next[d] + (p - diag) * c);
        }
        let mut t = 1u64;
        for i in (1..k).rev() {
            t = m.reduce(t * h[i * n + i - 1]);
            if t == 0 {
                break;
            }
            let coef = m.reduce(h[(i - 1) * n + k - 1] * t);
            if coef == 0 {
                continue;
            }
            let neg = p - coef;
            for (d, &c) in polys[i - 1].iter().enumerate() {
                next[d] = m.reduce(next[d] + neg * c);
            }
        }
        polys.push(next);
    }
    polys.pop().expect("at least the constant polynomial")
}

/// Product tree over the primes, with the inverses needed to merge siblings.
enum CrtTree {
    Leaf,
    Node {
        split: usize,
        left_modulus: BigInt,
        right_modulus: BigInt,
        /// `left_modulus⁻¹ mod right_modulus`.
        inverse: BigInt,
        left: Box<CrtTree>,
        right: Box<CrtTree>,
    },
}

impl CrtTree {
    fn build(primes: &[u64]) -> (CrtTree, BigInt) {
        if primes.len() == 1 {
            return (CrtTree::Leaf, BigInt::from(primes[0]));
        }
        let split = primes.len() / 2;
        let (left, lm) = CrtTree::build(&primes[..split]);
        let (right, rm) = CrtTree::build(&primes[split..]);
        let inverse = lm.modinv(&rm).expect("distinct primes are coprime");
        let product = &lm * &rm;
        let node = CrtTree::Node {
            split,
            left_modulus: lm,
            right_modulus: rm,
            inverse,
            left: Box::new(left),
            right: Box::new(right),
        };
        (node, product)
    }

    /// The unique value in `[0, M)` with the given residues.
    fn combine(&self, residues: &[u64]) -> BigInt {
        match self {
            CrtTree::Leaf => BigInt::from(residues[0]),
            CrtTree::Node {
                split,
                left_modulus,
                right_modulus,
                inverse,
                left,
                right,
            } => {
                let a = left.combine(&residues[..*split]);
                let b = right.combine(&residues[*split..]);
                let mut t = ((b - &a) * inverse) % right_modulus;
                if t.sign() == Sign::Minus {
                    t += right_modulus;
                }
                a + left_modulus * t
            }
        }
    }
}

/// Bits needed so that the prime product exceeds twice every coefficient.
fn coefficient_bound_bits(entries: &[BigInt], n: usize) -> u64 {
    let half_log_n = 0.5 * (n.max(1) as f64).log2();
    let mut bits = n as u64 + 2;
    for i in 0..n {
        let widest = entries[i * n..(i + 1) * n]
            .iter()
            .map(|v| v.bits())
            .max()
            .unwrap_or(0);
        if widest > 0 {
            // ‖row‖₂ ≤ 2^widest · √n
            bits += (widest as f64 + half_log_n).ceil() as u64;
        }
    }
    bits
}

/// Coefficients of `det(λ·I − A)` for a row-major integer matrix, ascending.
pub(crate) fn integer_char_poly(entries: &[BigInt], n: usize) -> Vec<BigInt> {
    assert_eq!(entries.len(), n * n, "matrix must be square");
    if n == 0 {
        return vec![BigInt::one()];
    }
    let digits: Vec<Digits> = entries.iter().map(Digits::new).collect();
    let needed = coefficient_bound_bits(entries, n);

    let mut used = Vec::new();
    let mut residues: Vec<Vec<u64>> = vec![Vec::new(); n + 1];
    let mut have_bits = 0u64;
    let mut scratch = vec![0u64; n * n];
    for p in primes() {
        if have_bits > needed {
            break;
        }
        let modulus = Modulus::new(p);
        for (slot, d) in scratch.iter_mut().zip(&digits) {
            *slot = d.residue(modulus);
        }
        let cp = char_poly_mod(&mut scratch, n, modulus);
        for (k, c) in cp.into_iter().enumerate() {
            residues[k].push(c);
        }
        used.push(p);
        // Every prime used exceeds 2^30.
        have_bits += 30;
    }

    let (tree, modulus) = CrtTree::build(&used);
    let half = &modulus >> 1;
    residues
        .iter()
        .map(|r| {
            let v = tree.combine(r);
            if v > half {
                v - &modulus
            } else {
                v
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn small_primes() {
        let ps: Vec<u64> = primes().take(3).collect();
        assert_eq!(ps, vec![2147483647, 2147483629, 2147483587]);
        assert!(!is_prime(2147483649));
        assert!(is_prime(65537));
    }

    #[test]
    fn residues_of_signed_values() {
        let d = Digits::new(&BigInt::from(-5));
        assert_eq!(d.residue(Modulus::new(7)), 2);
        let big = BigInt::from(1u64 << 40) + 3;
        assert_eq!(
            Digits::new(&big).residue(Modulus::new(1000003)),
            ((1u64 << 40) + 3) % 1000003
        );
    }

    #[test]
    fn barrett_matches_remainder() {
        for p in primes().take(4).chain([3, 7, 65537]) {
            let m = Modulus::new(p);
            for x in [0, 1, p - 1, p, p + 1, u64::MAX, u64::MAX - 1, (p - 1) * (p - 1)] {
                assert_eq!(m.reduce(x), x % p, "x={x} p={p}");
            }
        }
    }

    #[test]
    fn integer_polys() {
        assert_eq!(integer_char_poly(&ints(&[4, 2, 2, 2]), 2), ints(&[4, -6, 1]));
        assert_eq!(integer_char_poly(&[], 0), ints(&[1]));
        assert_eq!(
            integer_char_poly(&ints(&[1, 0, 2, 0, 3, 4, 2, 4, 5]), 3),
            ints(&[13, 3, -9, 1])
        );
    }

    #[test]
    fn huge_entries_need_many_primes() {
        // diag(10^40, -10^40): λ² − 10^80.
        let big = BigInt::from(10).pow(40);
        let m = vec![big.clone(), BigInt::zero(), BigInt::zero(), -big.clone()];
        let cp = integer_char_poly(&m, 2);
        assert_eq!(cp, vec![-(&big * &big), BigInt::zero(), BigInt::one()]);
    }
}
