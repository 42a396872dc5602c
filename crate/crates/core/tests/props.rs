use std::sync::{Arc, OnceLock};

use proptest::prelude::*;
use qgw_core::exactalg::{rank_of, rat, Echelon, QFrac, QMatrix, QScalar, Rat, SparseVec};
use qgw_core::freenc::{GradedQuotient, NCPoly, Word};
use qgw_core::poisson::{bracket_table, CPoly, PoissonKind, PoissonSpec};
use qgw_core::qfun::{presentation, AlgebraKind, GroupModel};
use qgw_core::rmat::{build_r, RMatrixData, Series, SeriesId};
use qgw_core::twistmod::{generator_cocycle, GeneratorCocycle};

fn sl2() -> Arc<RMatrixData> {
    static R: OnceLock<Arc<RMatrixData>> = OnceLock::new();
    R.get_or_init(|| Arc::new(build_r(SeriesId::new(Series::A, 1).unwrap()).unwrap())).clone()
}

fn re_quotient() -> &'static GradedQuotient {
    static Q: OnceLock<GradedQuotient> = OnceLock::new();
    Q.get_or_init(|| presentation(sl2(), AlgebraKind::Re, GroupModel::Free).unwrap().quotient(3))
}

fn sts() -> &'static PoissonSpec {
    static S: OnceLock<PoissonSpec> = OnceLock::new();
    S.get_or_init(|| bracket_table(&sl2(), PoissonKind::Sts))
}

fn cocycle() -> &'static GeneratorCocycle {
    static G: OnceLock<GeneratorCocycle> = OnceLock::new();
    G.get_or_init(|| generator_cocycle(&sl2()).unwrap())
}

fn scalar() -> impl Strategy<Value = QScalar> {
    prop::collection::vec((-3i32..=3, -4i64..=4), 0..4)
        .prop_map(|ts| QScalar::from_terms(ts.into_iter().map(|(k, c)| (k, rat(c, 1))).collect()))
}

fn nonzero_scalar() -> impl Strategy<Value = QScalar> {
    scalar().prop_filter("nonzero", |s| !s.is_zero())
}

fn frac() -> impl Strategy<Value = QFrac> {
    (scalar(), nonzero_scalar()).prop_map(|(n, d)| QFrac::new(n, d).unwrap())
}

fn small_frac() -> impl Strategy<Value = QFrac> {
    (-3i64..=3, -2i32..=2).prop_map(|(c, k)| QFrac::from(QScalar::monomial(rat(c, 1), k)))
}

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = QMatrix> {
    prop::collection::vec(scalar(), rows * cols)
        .prop_map(move |v| QMatrix::from_rows(v.chunks(cols).map(|c| c.to_vec()).collect()).unwrap())
}

/// Random homogeneous element of the given degree in the matrix letters of sl(2).
fn word_poly(d: usize) -> impl Strategy<Value = NCPoly> {
    prop::collection::vec((prop::collection::vec(1u16..=4, d), small_frac()), 1..5).prop_map(|ts| {
        NCPoly::from_terms(ts.into_iter().map(|(ls, c)| (Word::new(ls), c)))
    })
}

fn cpoly() -> impl Strategy<Value = CPoly> {
    prop::collection::vec((prop::collection::vec(0u32..=2, 4), -3i64..=3), 1..4).prop_map(|ts| {
        let mut p = CPoly::zero(4);
        for (e, c) in ts {
            p.add_term(e, rat(c, 1));
        }
        p
    })
}

fn eval_point() -> impl Strategy<Value = Rat> {
    prop_oneof![Just(rat(2, 1)), Just(rat(3, 1)), Just(rat(-1, 2)), Just(rat(5, 3))]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn laurent_ring_laws(a in scalar(), b in scalar(), c in scalar()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn fraction_field_laws(a in frac(), b in frac(), c in frac()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        if !a.is_zero() {
            prop_assert!((&a * &a.inv().unwrap()).is_one());
        }
    }

    #[test]
    fn evaluation_is_a_homomorphism(a in frac(), b in frac(), q0 in eval_point()) {
        if let (Ok(x), Ok(y)) = (a.evaluate_at(&q0), b.evaluate_at(&q0)) {
            prop_assert_eq!((&a + &b).evaluate_at(&q0).unwrap(), &x + &y);
            prop_assert_eq!((&a * &b).evaluate_at(&q0).unwrap(), &x * &y);
        }
    }

    #[test]
    fn rref_kernel_and_idempotence(m in matrix(3, 4)) {
        let r = m.rref();
        prop_assert_eq!(r.rank + r.kernel_basis.cols(), 4);
        prop_assert!((&m * &r.kernel_basis).is_zero());
        let again = r.row_basis.rref();
        prop_assert_eq!(again.rank, r.rank);
        prop_assert_eq!(again.pivot_columns, r.pivot_columns);
    }

    #[test]
    fn echelon_reduces_span_members_to_zero(m in matrix(3, 5), x in small_frac(), y in small_frac()) {
        let rows: Vec<SparseVec> = (0..3)
            .map(|i| (0..5).filter(|&j| !m.get(i, j).is_zero()).map(|j| (j, QFrac::from(m.get(i, j)))).collect())
            .collect();
        let mut e = Echelon::new(5);
        e.insert_many(rows.clone());
        prop_assert_eq!(e.rank(), rank_of(&rows, 5));
        let mut combo = vec![QFrac::zero(); 5];
        for (k, s) in [(0, &x), (1, &y)] {
            for (j, v) in &rows[k] {
                combo[*j] = &combo[*j] + &(s * v);
            }
        }
        let v: SparseVec = combo.into_iter().enumerate().filter(|(_, c)| !c.is_zero()).collect();
        prop_assert!(e.reduce(&v).is_empty());
    }

    #[test]
    fn normal_form_is_a_projection(p in word_poly(2)) {
        let gq = re_quotient();
        let nf = gq.normal_form(&p).unwrap();
        prop_assert_eq!(gq.normal_form(&nf).unwrap(), nf.clone());
        prop_assert!(gq.normal_form(&(&p - &nf)).unwrap().is_zero());
    }

    #[test]
    fn quotient_product_is_associative(a in word_poly(1), b in word_poly(1), c in word_poly(1)) {
        let gq = re_quotient();
        let left = gq.nc_multiply(&gq.nc_multiply(&a, &b).unwrap(), &c).unwrap();
        let right = gq.nc_multiply(&a, &gq.nc_multiply(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn bracket_is_antisymmetric_and_leibniz(f in cpoly(), g in cpoly(), h in cpoly()) {
        let s = sts();
        prop_assert!((&s.bracket(&f, &g) + &s.bracket(&g, &f)).is_zero());
        let lhs = s.bracket(&f, &(&g * &h));
        let rhs = &(&s.bracket(&f, &g) * &h) + &(&g * &s.bracket(&f, &h));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn transport_preserves_span_dimension(ps in prop::collection::vec(word_poly(2), 1..6)) {
        let gc = cocycle();
        let alpha = &re_quotient().alphabet;
        let src: Vec<SparseVec> = ps.iter().map(|p| p.to_sparse(alpha, 2).unwrap()).collect();
        let img: Vec<SparseVec> =
            ps.iter().map(|p| gc.transport_poly(p).unwrap().to_sparse(alpha, 2).unwrap()).collect();
        let n = alpha.word_count(2);
        prop_assert_eq!(rank_of(&src, n), rank_of(&img, n));
    }
}
