//! Graded dimensions compared against closed-form combinatorial and
//! representation-theoretic counts computed here, independently of the
//! commutative quotients the library uses as its own reference.

use std::collections::BTreeSet;
use std::sync::Arc;

use qgw_core::centermod::{center_report, freeness_report, sl2_center_generators};
use qgw_core::qfun::{flatness_check, presentation, AlgebraKind, GroupModel};
use qgw_core::rmat::{build_r, RMatrixData, Series, SeriesId};

fn rd(s: Series, r: usize) -> Arc<RMatrixData> {
    Arc::new(build_r(SeriesId::new(s, r).unwrap()).unwrap())
}

fn binom(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Polynomials of degree at most `d` on SL(2): matrix coefficients of V_k, k <= d.
fn sl2_poly_dims(d_max: usize) -> Vec<usize> {
    (0..=d_max).map(|d| (0..=d).map(|k| (k + 1) * (k + 1)).sum()).collect()
}

/// Polynomials of degree at most `d` on O(3). Irreps are (l, sign of -I);
/// the standard module is (1, -1).
fn o3_poly_dims(d_max: usize) -> Vec<usize> {
    let mut layer: BTreeSet<(usize, i8)> = [(0, 1)].into();
    let mut seen = layer.clone();
    let mut out = vec![1];
    for _ in 1..=d_max {
        let mut next = BTreeSet::new();
        for &(l, s) in &layer {
            for m in l.saturating_sub(1)..=l + 1 {
                if !(l == 0 && m == 0) {
                    next.insert((m, -s));
                }
            }
        }
        seen.extend(next.iter().copied());
        out.push(seen.iter().map(|(l, _)| (2 * l + 1) * (2 * l + 1)).sum());
        layer = next;
    }
    out
}

fn quantum_dims(s: Series, r: usize, kind: AlgebraKind, model: GroupModel, d: usize) -> Vec<usize> {
    let pres = presentation(rd(s, r), kind, model).unwrap();
    let rep = flatness_check(&pres, d).unwrap();
    assert!(rep.pass);
    rep.quantum_dims()
}

#[test]
fn free_models_match_polynomial_ring_counts() {
    let sl2: Vec<usize> = (0..=4).map(|d| binom(d + 3, 3)).collect();
    let sl3: Vec<usize> = (0..=2).map(|d| binom(d + 8, 8)).collect();
    assert_eq!(sl2, [1, 4, 10, 20, 35]);
    for kind in [AlgebraKind::Frt, AlgebraKind::Re] {
        assert_eq!(quantum_dims(Series::A, 1, kind, GroupModel::Free, 4), sl2);
        assert_eq!(quantum_dims(Series::A, 2, kind, GroupModel::Free, 2), sl3);
    }
}

#[test]
fn sharp_models_match_peter_weyl_counts() {
    assert_eq!(sl2_poly_dims(4), [1, 5, 14, 30, 55]);
    for kind in [AlgebraKind::Frt, AlgebraKind::Re] {
        assert_eq!(quantum_dims(Series::A, 1, kind, GroupModel::Sharp, 4), sl2_poly_dims(4));
        assert_eq!(quantum_dims(Series::C, 1, kind, GroupModel::Sharp, 3), sl2_poly_dims(3));
        assert_eq!(quantum_dims(Series::B, 1, kind, GroupModel::Sharp, 3), o3_poly_dims(3));
    }
}

#[test]
fn sl2_center_counts_trace_determinant_monomials() {
    let pres = presentation(rd(Series::A, 1), AlgebraKind::Re, GroupModel::Free).unwrap();
    let gq = pres.quotient(5);
    let rep = center_report(&pres, &gq, 4, 11).unwrap();
    let oracle: Vec<usize> = (0..=4).map(|d| d / 2 + 1).collect();
    assert_eq!(rep.dims(), oracle);
    assert_eq!(rep.classical_dims(), oracle);
    assert!(rep.pass);
}

#[test]
fn sl2_sharp_module_dims_follow_from_hilbert_series() {
    let d = 4;
    let rdata = rd(Series::A, 1);
    let free = presentation(rdata.clone(), AlgebraKind::Re, GroupModel::Free).unwrap().quotient(2);
    let sharp = presentation(rdata, AlgebraKind::Re, GroupModel::Sharp).unwrap().quotient(d);
    let gens = sl2_center_generators(&free).unwrap();
    let rep = freeness_report(&sharp, &gens, d).unwrap();
    assert!(rep.pass);
    // Center is a polynomial ring on two degree-1 generators.
    let i: Vec<usize> = (0..=d).map(|k| k + 1).collect();
    let a = sl2_poly_dims(d);
    let mut e = Vec::new();
    for k in 0..=d {
        let lower: usize = (1..=k).map(|j| i[j] * e[k - j]).sum();
        e.push(a[k] - lower);
    }
    assert_eq!(e, [1, 3, 5, 7, 9]);
    assert_eq!(rep.e_dims(), e);
    assert_eq!(rep.i_dims(), i);
    let conv: usize = (0..=d).map(|k| e[k] * i[d - k]).sum();
    assert_eq!(conv, 55);
}
