//! Exact arithmetic: rationals, Laurent polynomials in `q`, their fraction
//! field, and linear algebra over it.

mod elim;
mod frac;
mod laurent;
mod matrix;

use num_bigint::BigInt;
use thiserror::Error;

pub use elim::{rank_of, same_span, Echelon, SparseVec};
pub use frac::QFrac;
pub use laurent::QScalar;
pub use matrix::{clear_denominators, QMatrix, RrefResult};

pub type Rat = num_rational::BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExactError {
    #[error("evaluation point q0 = 0 is not allowed")]
    ZeroEvaluationPoint,
    #[error("division by zero")]
    DivisionByZero,
    #[error("pole at q = {0}")]
    PoleAt(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("matrix is singular")]
    Singular,
    #[error("result is not a Laurent polynomial")]
    NotLaurent,
}

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    fn qs(terms: &[(i32, i64)]) -> QScalar {
        QScalar::from_terms(terms.iter().map(|&(e, c)| (e, rat_int(c))).collect())
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(QScalar::q().derivative_at_one(), rat_int(1));
        assert_eq!(QScalar::q_pow(-1).derivative_at_one(), rat_int(-1));
        assert_eq!(qs(&[(2, 1), (-2, -1)]).derivative_at_one(), rat_int(4));
    }

    #[test]
    fn evaluation_examples() {
        assert_eq!(QScalar::q_minus_qinv().evaluate_at(&rat_int(2)).unwrap(), rat(3, 2));
        assert_eq!(QScalar::from_int(7).evaluate_at(&rat_int(1)).unwrap(), rat_int(7));
        assert_eq!(qs(&[(2, 1), (1, 1), (0, 1)]).evaluate_at(&rat_int(-1)).unwrap(), rat_int(1));
        assert_eq!(QScalar::q().evaluate_at(&Rat::zero()), Err(ExactError::ZeroEvaluationPoint));
    }

    #[test]
    fn canonical_form_drops_zeros() {
        let a = qs(&[(1, 1), (0, 2)]);
        let b = qs(&[(1, 1)]);
        assert_eq!(&(&a - &b) - &QScalar::from_int(2), QScalar::zero());
        assert_eq!(qs(&[(3, 0)]), QScalar::zero());
    }

    #[test]
    fn display_is_ascending() {
        assert_eq!(qs(&[(1, 1), (-1, -1)]).to_string(), "-1*q^-1 + 1*q^1");
        assert_eq!(QScalar::zero().to_string(), "0");
    }

    #[test]
    fn frac_reduces_common_factors() {
        let a = qs(&[(2, 1), (0, -1)]);
        let b = qs(&[(1, 1), (0, -1)]);
        let f = QFrac::new(a, b).unwrap();
        assert_eq!(f.as_laurent().unwrap(), &qs(&[(1, 1), (0, 1)]));
        let g = QFrac::new(QScalar::one(), qs(&[(1, 1), (0, 1)])).unwrap();
        let h = &g * &QFrac::from(qs(&[(1, 1), (0, 1)]));
        assert!(h.is_one());
    }

    #[test]
    fn frac_derivative_at_one() {
        // 1/(1+q): derivative -1/(1+q)^2 = -1/4 at q = 1
        let g = QFrac::new(QScalar::one(), qs(&[(1, 1), (0, 1)])).unwrap();
        assert_eq!(g.derivative_at_one().unwrap(), rat(-1, 4));
    }

    #[test]
    fn rref_identity() {
        let r = QMatrix::identity(2).rref();
        assert_eq!(r.rank, 2);
        assert_eq!(r.kernel_basis.cols(), 0);
    }

    #[test]
    fn rref_duplicate_row() {
        let row = vec![QScalar::q(), QScalar::one()];
        let m = QMatrix::from_rows(vec![row.clone(), row]).unwrap();
        let r = m.rref();
        assert_eq!(r.rank, 1);
        assert_eq!(r.kernel_basis.cols(), 1);
        let k0 = r.kernel_basis.get(0, 0).clone();
        let k1 = r.kernel_basis.get(1, 0).clone();
        // proportional to (1, -q)
        assert_eq!(&k0 * &QScalar::q(), -k1);
        assert!((&m * &r.kernel_basis).is_zero());
    }

    #[test]
    fn rref_empty() {
        let r = QMatrix::zeros(0, 3).rref();
        assert_eq!(r.rank, 0);
        assert_eq!(r.kernel_basis.cols(), 3);
    }

    #[test]
    fn inverse_and_det() {
        let m = QMatrix::from_rows(vec![
            vec![QScalar::q(), QScalar::q_minus_qinv()],
            vec![QScalar::zero(), QScalar::q_pow(-1)],
        ])
        .unwrap();
        let inv = m.inverse().unwrap();
        assert_eq!(&m * &inv, QMatrix::identity(2));
        assert!(m.det().unwrap().is_one());
    }

    #[test]
    fn rref_clears_denominators() {
        let m = QMatrix::from_rows(vec![vec![qs(&[(1, 1), (0, 1)]), QScalar::one(), QScalar::q()]]).unwrap();
        let r = m.rref();
        assert_eq!(r.row_basis.rows(), 1);
        assert!((&m * &r.kernel_basis).is_zero());
    }
}
