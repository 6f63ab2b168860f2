//! Exact counting of positive and negative cusps of polynomial maps of the
//! plane, globally and inside a region `{u > 0}`, via signatures of trace
//! quadratic forms on the quotient algebra `Q[x, y] / (J, F1, F2)`.
//!
//! The exact pipeline lives in [`pipeline`]; [`oracle`] is an independent
//! interval-arithmetic root isolator used to cross-check it.

pub mod expr;
pub mod groebner;
pub mod interval;
pub mod matrix;
mod modular;
pub mod oracle;
pub mod pipeline;
pub mod poly;
pub mod quotient;
pub mod report;
pub mod signature;

pub use expr::{format_polynomial, parse_polynomial, parse_problem, ProblemInput};
pub use groebner::{buchberger, GroebnerBasis, TermOrder};
pub use pipeline::{census, derive_system, CuspCensus, DerivedSystem, PipelineError};
pub use poly::{func_det, Monomial, Polynomial, Rational, Var};
pub use quotient::{QuotientAlgebra, SymmetricForm};
pub use report::{run, run_text, RunOptions, RunOutcome};
pub use signature::{signature_of, SignatureResult};

#[cfg(test)]
pub(crate) mod testutil {
    use proptest::prelude::*;

    use crate::poly::{ratio, Monomial, Polynomial};

    /// Small random polynomials of total degree at most `max_deg`.
    pub fn arb_poly(max_deg: u32) -> impl Strategy<Value = Polynomial> {
        prop::collection::vec((-9i64..=9, 1i64..=4, 0..=max_deg, 0..=max_deg), 0..6).prop_map(
            move |ts| {
                Polynomial::from_terms(
                    ts.into_iter()
                        .filter(|t| t.2 + t.3 <= max_deg)
                        .map(|(n, d, ex, ey)| (Monomial::new(ex, ey), ratio(n, d))),
                )
            },
        )
    }
}
