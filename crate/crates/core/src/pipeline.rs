//! From a map `f = (f1, f2)` to the cusp census.
//!
//! `J = ∂(f1,f2)/∂(x,y)`, `F_i = ∂(J,f_i)/∂(x,y)`. The ideal
//! `I' = (J, F1, F2, ∂(J,F1)/∂(x,y), ∂(J,F2)/∂(x,y))` being the unit ideal
//! certifies that `f` is one-generic with finitely many cusps, which are the
//! real zeros of `I = (J, F1, F2)`. On `A = Q[x,y]/I` the trace forms
//! `T(a²)`, `T(det DF·a²)`, `T(u·a²)`, `T(u·det DF·a²)` have signatures that
//! count cusps by sign, globally and in `{u > 0}`.

use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use crate::expr::ProblemInput;
use crate::groebner::{buchberger_with_guard, GroebnerBasis, GroebnerError, TermOrder};
use crate::oracle::CertifiedPoint;
use crate::poly::{func_det, Monomial, Polynomial, Var};
use crate::quotient::{QuotientAlgebra, SymmetricForm};
use crate::signature::{signature_of, SignatureResult};

/// The polynomials derived from `f` that the census needs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivedSystem {
    pub j: Polynomial,
    pub f1: Polynomial,
    pub f2: Polynomial,
    /// Jacobian determinant of `(F1, F2)`.
    pub det_df: Polynomial,
    /// `∂(J, F1)/∂(x, y)`.
    pub minor1: Polynomial,
    /// `∂(J, F2)/∂(x, y)`.
    pub minor2: Polynomial,
}

impl DerivedSystem {
    /// Generators of `I = (J, F1, F2)`.
    pub fn cusp_ideal(&self) -> [Polynomial; 3] {
        [self.j.clone(), self.f1.clone(), self.f2.clone()]
    }

    /// Generators of `I'`.
    pub fn genericity_ideal(&self) -> [Polynomial; 5] {
        [
            self.j.clone(),
            self.f1.clone(),
            self.f2.clone(),
            self.minor1.clone(),
            self.minor2.clone(),
        ]
    }
}

pub fn derive_system(f1: &Polynomial, f2: &Polynomial) -> DerivedSystem {
    let j = func_det(f1, f2);
    let big_f1 = func_det(&j, f1);
    let big_f2 = func_det(&j, f2);
    let det_df = func_det(&big_f1, &big_f2);
    let minor1 = func_det(&j, &big_f1);
    let minor2 = func_det(&j, &big_f2);
    DerivedSystem {
        j,
        f1: big_f1,
        f2: big_f2,
        det_df,
        minor1,
        minor2,
    }
}

/// Gröbner basis of `I'`; the map is certified one-generic iff it is `{1}`.
pub fn genericity_basis(d: &DerivedSystem, guard: u32) -> Result<GroebnerBasis, GroebnerError> {
    buchberger_with_guard(&d.genericity_ideal(), TermOrder::GrevLex, guard)
}

/// True iff `I'` is the unit ideal. `false` means "not certified", not
/// "not one-generic".
pub fn certify_genericity(d: &DerivedSystem) -> bool {
    genericity_basis(d, u32::MAX)
        .map(|g| g.is_unit_ideal())
        .unwrap_or(false)
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PipelineError {
    #[error(
        "genericity not certified: the ideal I' = (J, F1, F2, ∂(J,F1)/∂(x,y), ∂(J,F2)/∂(x,y)) \
         is not the unit ideal (reduced Gröbner basis has {basis_len} element(s), leading monomials {leading})"
    )]
    GenericityNotCertified { basis_len: usize, leading: String },
    #[error("the cusp ideal I = (J, F1, F2) is not zero-dimensional: {0}")]
    NotZeroDimensional(GroebnerError),
    #[error(
        "region form T(u·a²) is degenerate (rank {rank} < dim {dim}) for u = {u}; region counts withheld"
    )]
    DegenerateRegionForm {
        rank: usize,
        dim: usize,
        u: String,
        census: Box<CuspCensus>,
    },
    #[error("{0}")]
    DegreeGuard(GroebnerError),
    #[error("inconsistent signatures {sigs:?}: counts are not non-negative integers")]
    InconsistentSignatures { sigs: Vec<i64> },
}

impl From<GroebnerError> for PipelineError {
    fn from(e: GroebnerError) -> Self {
        match e {
            GroebnerError::NotZeroDimensional { .. } => PipelineError::NotZeroDimensional(e),
            GroebnerError::DegreeGuardExceeded { .. } => PipelineError::DegreeGuard(e),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RegionCounts {
    pub positive: i64,
    pub negative: i64,
}

/// Wall-clock time spent in each phase.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Timings {
    pub genericity: Duration,
    pub groebner: Duration,
    pub algebra: Duration,
    pub signatures: Duration,
    pub oracle: Option<Duration>,
}

/// Result of the exact census.
#[derive(Debug, Clone, PartialEq)]
pub struct CuspCensus {
    pub one_generic_certified: bool,
    pub dim: usize,
    pub basis: Vec<Monomial>,
    pub sig1: Option<i64>,
    pub sig2: Option<i64>,
    pub sig3: Option<i64>,
    pub sig4: Option<i64>,
    /// `σ(Θ1)`: number of cusps.
    pub total_cusps: i64,
    /// `σ(Θ2)`: sum of local degrees over all cusps.
    pub sum_of_degrees: i64,
    pub positive_cusps: i64,
    pub negative_cusps: i64,
    pub region: Option<RegionCounts>,
    pub oracle: Option<Vec<CertifiedPoint>>,
    /// The forms in the order Θ1, Θ2, Θ3, Θ4 (the last two only with a region).
    pub forms: Vec<SymmetricForm>,
    pub timings: Timings,
}

impl CuspCensus {
    pub fn signatures(&self) -> [Option<i64>; 4] {
        [self.sig1, self.sig2, self.sig3, self.sig4]
    }
}

fn half(n: i64) -> Option<i64> {
    (n >= 0 && n % 2 == 0).then_some(n / 2)
}

fn quarter(n: i64) -> Option<i64> {
    (n >= 0 && n % 4 == 0).then_some(n / 4)
}

fn signatures_of(forms: &[SymmetricForm]) -> Vec<SignatureResult> {
    // Independent forms; the char-poly computation dominates at large dim.
    std::thread::scope(|s| {
        let handles: Vec<_> = forms
            .iter()
            .map(|f| s.spawn(move || signature_of(&f.matrix).expect("trace forms are symmetric")))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("signature worker panicked"))
            .collect()
    })
}

/// Runs the full census on a problem.
pub fn census(p: &ProblemInput) -> Result<CuspCensus, PipelineError> {
    let guard = p.options.degree_guard;
    let d = derive_system(&p.f1, &p.f2);
    let mut timings = Timings::default();

    let start = Instant::now();
    let gb_prime = genericity_basis(&d, guard)?;
    timings.genericity = start.elapsed();
    if !gb_prime.is_unit_ideal() {
        let leading = gb_prime
            .leading_monomials()
            .iter()
            .map(|m| m.to_string())
            .collect::<Vec<_>>()
            .join(", ");
        return Err(PipelineError::GenericityNotCertified {
            basis_len: gb_prime.generators().len(),
            leading: format!("[{leading}]"),
        });
    }

    let start = Instant::now();
    let gb = buchberger_with_guard(&d.cusp_ideal(), TermOrder::GrevLex, guard)?;
    timings.groebner = start.elapsed();

    let start = Instant::now();
    let alg = QuotientAlgebra::new(&gb)?;
    // det DF enters the forms only through its residue class.
    let det_nf = gb.normal_form(&d.det_df);
    let mut forms = vec![
        alg.form_matrix(&Polynomial::one(), "1"),
        alg.form_matrix(&det_nf, "det DF"),
    ];
    let u_nf = p.u.as_ref().map(|u| gb.normal_form(u));
    if let Some(u_nf) = &u_nf {
        let u_det = gb.normal_form(&(u_nf * &det_nf));
        forms.push(alg.form_matrix(u_nf, "u"));
        forms.push(alg.form_matrix(&u_det, "u * det DF"));
    }
    timings.algebra = start.elapsed();

    let start = Instant::now();
    let sigs = signatures_of(&forms);
    timings.signatures = start.elapsed();

    let s1 = sigs[0].signature;
    let s2 = sigs[1].signature;
    let (positive_cusps, negative_cusps) = match (half(s1 + s2), half(s1 - s2)) {
        (Some(pos), Some(neg)) => (pos, neg),
        _ => {
            return Err(PipelineError::InconsistentSignatures {
                sigs: sigs.iter().map(|s| s.signature).collect(),
            })
        }
    };

    let mut out = CuspCensus {
        one_generic_certified: true,
        dim: alg.dim(),
        basis: alg.basis().to_vec(),
        sig1: Some(s1),
        sig2: Some(s2),
        sig3: sigs.get(2).map(|s| s.signature),
        sig4: sigs.get(3).map(|s| s.signature),
        total_cusps: s1,
        sum_of_degrees: s2,
        positive_cusps,
        negative_cusps,
        region: None,
        oracle: None,
        forms,
        timings,
    };

    if let (Some(s3), Some(s4)) = (sigs.get(2), sigs.get(3)) {
        if !s3.nondegenerate {
            let u = crate::expr::format_polynomial(p.u.as_ref().expect("region forms imply u"));
            return Err(PipelineError::DegenerateRegionForm {
                rank: s3.rank,
                dim: out.dim,
                u,
                census: Box::new(out),
            });
        }
        let (s3, s4) = (s3.signature, s4.signature);
        let pos = quarter(s1 + s2 + s3 + s4);
        let neg = quarter(s1 - s2 + s3 - s4);
        match (pos, neg) {
            (Some(positive), Some(negative))
                if positive <= out.positive_cusps && negative <= out.negative_cusps =>
            {
                out.region = Some(RegionCounts { positive, negative });
            }
            _ => {
                return Err(PipelineError::InconsistentSignatures {
                    sigs: vec![s1, s2, s3, s4],
                })
            }
        }
    }
    Ok(out)
}

/// Applies the translation `(x, y) ↦ (x + a, y + b)` to `p`.
pub fn translate(p: &Polynomial, a: &crate::poly::Rational, b: &crate::poly::Rational) -> Polynomial {
    let qx = &Polynomial::var(Var::X) + &Polynomial::constant(a.clone());
    let qy = &Polynomial::var(Var::Y) + &Polynomial::constant(b.clone());
    p.compose(&qx, &qy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_polynomial;
    use crate::matrix::RatMatrix;

    fn poly(s: &str) -> Polynomial {
        parse_polynomial(s).unwrap()
    }

    fn example_one() -> ProblemInput {
        ProblemInput::new(
            poly("x*y^2 - x^2 + y^2 + x - y"),
            poly("x - y"),
            Some(poly("1 - x^2 - y^2")),
        )
    }

    #[test]
    fn derives_example_system() {
        let p = example_one();
        let d = derive_system(&p.f1, &p.f2);
        assert_eq!(d.j, poly("-2*x*y - y^2 + 2*x - 2*y"));
        assert_eq!(d.f1, poly("-2*x*y^2 + 2*y^3 - 4*x^2 - 2*y^2 - 2*x + 8*y"));
        assert_eq!(d.f2, poly("2*x + 4*y"));
        assert!(certify_genericity(&d));
    }

    #[test]
    fn derives_trivial_systems() {
        let d = derive_system(&poly("x"), &poly("y"));
        assert_eq!(d.j, Polynomial::one());
        assert!(d.f1.is_zero() && d.f2.is_zero() && d.det_df.is_zero());
        assert!(certify_genericity(&d));

        let d = derive_system(&poly("x"), &poly("x*y + y^3"));
        assert_eq!(d.j, poly("x + 3*y^2"));
        assert_eq!(d.f1, poly("-6*y"));
        assert_eq!(d.f2, poly("x - 3*y^2"));
        assert_eq!(d.det_df, poly("6"));

        assert!(!certify_genericity(&derive_system(&poly("x^2"), &poly("y^2"))));
    }

    #[test]
    fn example_one_census() {
        let c = census(&example_one()).unwrap();
        assert_eq!(c.dim, 2);
        assert_eq!(c.basis, vec![Monomial::ONE, Monomial::Y]);
        assert_eq!(c.signatures(), [Some(2), Some(-2), Some(0), Some(0)]);
        assert_eq!((c.total_cusps, c.positive_cusps, c.negative_cusps), (2, 0, 2));
        assert_eq!(c.region, Some(RegionCounts { positive: 0, negative: 1 }));
        // Printed in basis (y, 1); ours is (1, y).
        let expected = [
            RatMatrix::from_i64_rows(&[&[4, 2], &[2, 2]]),
            RatMatrix::from_i64_rows(&[&[-96, -48], &[-48, -48]]),
            RatMatrix::from_i64_rows(&[&[-76, -38], &[-38, -18]]),
            RatMatrix::from_i64_rows(&[&[76, 38], &[38, 18]]).scale(&crate::poly::rat(24)),
        ];
        for (form, want) in c.forms.iter().zip(&expected) {
            assert_eq!(form.matrix.reversed(), *want, "{}", form.delta_label);
        }
    }

    #[test]
    fn immersion_and_folds() {
        let c = census(&ProblemInput::new(poly("x"), poly("y"), None)).unwrap();
        assert_eq!((c.dim, c.total_cusps, c.positive_cusps, c.negative_cusps), (0, 0, 0, 0));
        let c = census(&ProblemInput::new(poly("x^2"), poly("y"), Some(poly("x")))).unwrap();
        assert_eq!((c.dim, c.total_cusps), (0, 0));
        assert_eq!(c.region, Some(RegionCounts { positive: 0, negative: 0 }));
    }

    #[test]
    fn whitney_cusp() {
        let c = census(&ProblemInput::new(poly("x"), poly("x*y + y^3"), None)).unwrap();
        assert_eq!((c.dim, c.total_cusps, c.positive_cusps, c.negative_cusps), (1, 1, 1, 0));
    }

    #[test]
    fn refuses_uncertified_maps() {
        let err = census(&ProblemInput::new(poly("x^2"), poly("y^2"), None)).unwrap_err();
        assert!(matches!(err, PipelineError::GenericityNotCertified { .. }));
        assert!(err.to_string().contains("I'"));
    }

    #[test]
    fn degenerate_region_withholds_counts() {
        // u vanishes at the cusp of the Whitney map.
        let err = census(&ProblemInput::new(poly("x"), poly("x*y + y^3"), Some(poly("x")))).unwrap_err();
        match err {
            PipelineError::DegenerateRegionForm { rank, dim, census, .. } => {
                assert_eq!((rank, dim), (0, 1));
                assert_eq!(census.sig3, Some(0));
                assert!(census.region.is_none());
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn degree_guard_propagates() {
        let mut p = example_one();
        p.options.degree_guard = 2;
        assert!(matches!(census(&p), Err(PipelineError::DegreeGuard(_))));
    }
}
