//! Twist transport between the FRT and reflection-equation presentations.
//!
//! Each generator `T^i_j` carries an upper slot `i` and a lower slot `j`.
//! A cocycle factor places the two legs of `R` (or `R^{-1}`) on slots of two
//! tensor blocks; lower slots transform untransposed and upper slots
//! transposed. The degree-2 rearrangement used here is
//!
//! `G = R[lower(1), upper(2)] · R^{-1}[upper(1), upper(2)]`
//!
//! (rightmost factor applied first), with `F = G^{-1}` the cocycle. Higher
//! degrees follow `Ω_n^{-1} = (Ω_m^{-1} ⊗ Ω_k^{-1}) · op((Δ^m ⊗ Δ^k) G)`, so
//! `Ω_2^{-1} = G` and transport maps a relation `w` to `Ω^{-1} w`.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::One;
use serde::Serialize;
use thiserror::Error;

use crate::exactalg::{same_span, QFrac, QMatrix, QScalar, Rat, SparseVec};
use crate::freenc::{Alphabet, GradedQuotient, NCPoly, RelationSet, Word, F_LETTER};
use crate::qfun::{self, AlgebraKind, GroupModel};
use crate::rmat::{embed_legs, RMatrixData, Series};

#[derive(Debug, Error)]
pub enum TwistError {
    #[error("R is not invertible")]
    Singular,
    #[error("degree {0} above cap {1}")]
    DegreeOverflow(usize, usize),
    #[error("{0}")]
    Other(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SlotKind {
    Upper,
    Lower,
}

/// One leg placement: which tensor block (0 or 1) and which slot kind.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Leg {
    pub block: usize,
    pub kind: SlotKind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Factor {
    pub inverse: bool,
    pub leg1: Leg,
    pub leg2: Leg,
}

/// The rearrangement factors, leftmost applied last.
pub fn standard_factors() -> Vec<Factor> {
    vec![
        Factor {
            inverse: false,
            leg1: Leg { block: 0, kind: SlotKind::Lower },
            leg2: Leg { block: 1, kind: SlotKind::Upper },
        },
        Factor {
            inverse: true,
            leg1: Leg { block: 0, kind: SlotKind::Upper },
            leg2: Leg { block: 1, kind: SlotKind::Upper },
        },
    ]
}

/// Linear operator on a word space, stored as sparse column images.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseOp {
    pub dim: usize,
    cols: Vec<SparseVec>,
}

fn add_into(acc: &mut BTreeMap<usize, QFrac>, i: usize, c: QFrac) {
    if c.is_zero() {
        return;
    }
    match acc.get_mut(&i) {
        Some(e) => {
            *e = &*e + &c;
            if e.is_zero() {
                acc.remove(&i);
            }
        }
        None => {
            acc.insert(i, c);
        }
    }
}

impl SparseOp {
    pub fn identity(dim: usize) -> Self {
        SparseOp { dim, cols: (0..dim).map(|i| vec![(i, QFrac::one())]).collect() }
    }

    pub fn column(&self, j: usize) -> &SparseVec {
        &self.cols[j]
    }

    pub fn apply(&self, v: &[(usize, QFrac)]) -> SparseVec {
        let mut acc = BTreeMap::new();
        for (j, c) in v {
            for (i, x) in &self.cols[*j] {
                add_into(&mut acc, *i, c * x);
            }
        }
        acc.into_iter().collect()
    }

    /// `self ∘ o`.
    pub fn compose(&self, o: &SparseOp) -> SparseOp {
        SparseOp { dim: self.dim, cols: o.cols.iter().map(|c| self.apply(c)).collect() }
    }

    pub fn kron(&self, o: &SparseOp) -> SparseOp {
        let mut cols = Vec::with_capacity(self.dim * o.dim);
        for i in 0..self.dim {
            for j in 0..o.dim {
                let mut v: SparseVec = Vec::new();
                for (a, x) in &self.cols[i] {
                    for (b, y) in &o.cols[j] {
                        v.push((a * o.dim + b, x * y));
                    }
                }
                v.sort_by_key(|e| e.0);
                cols.push(v);
            }
        }
        SparseOp { dim: self.dim * o.dim, cols }
    }

    pub fn to_qmatrix(&self) -> Option<QMatrix> {
        let mut m = QMatrix::zeros(self.dim, self.dim);
        for (j, col) in self.cols.iter().enumerate() {
            for (i, x) in col {
                m.set(*i, j, x.as_laurent()?.clone());
            }
        }
        Some(m)
    }

    pub fn is_identity(&self) -> bool {
        self.cols.iter().enumerate().all(|(j, c)| c.len() == 1 && c[0].0 == j && c[0].1.is_one())
    }

    /// Entrywise evaluation at a rational point.
    pub fn evaluate_at(&self, q0: &Rat) -> Option<SparseOp> {
        let cols = self
            .cols
            .iter()
            .map(|c| {
                let v: Option<SparseVec> = c
                    .iter()
                    .map(|(i, x)| x.evaluate_at(q0).ok().map(|r| (*i, QFrac::from(QScalar::constant(r)))))
                    .collect();
                v.map(|v| v.into_iter().filter(|e| !e.1.is_zero()).collect())
            })
            .collect::<Option<Vec<_>>>()?;
        Some(SparseOp { dim: self.dim, cols })
    }
}

/// The twist in the generator representation.
#[derive(Clone, Debug)]
pub struct GeneratorCocycle {
    pub n: usize,
    pub factors: Vec<Factor>,
    r: QMatrix,
    r_inv: QMatrix,
    /// `G = Ω_2^{-1}` on the 2-letter word space.
    pub rearrangement: SparseOp,
}

fn element_image(r: &QMatrix, r_inv: &QMatrix, n: usize, inverse: bool, l1: usize, l2: usize) -> QMatrix {
    let nlegs = l1 + l2;
    let mut m = QMatrix::identity(n.pow(nlegs as u32));
    if !inverse {
        for x in 0..l1 {
            for y in (l1..nlegs).rev() {
                m = &m * &embed_legs(n, nlegs, r, x, y);
            }
        }
    } else {
        for x in (0..l1).rev() {
            for y in l1..nlegs {
                m = &m * &embed_legs(n, nlegs, r_inv, x, y);
            }
        }
    }
    m
}

fn digits(mut x: usize, n: usize, len: usize) -> Vec<usize> {
    let mut v = vec![0; len];
    for t in (0..len).rev() {
        v[t] = x % n;
        x /= n;
    }
    v
}

fn undigits(v: &[usize], n: usize) -> usize {
    v.iter().fold(0, |acc, &d| acc * n + d)
}

impl GeneratorCocycle {
    pub fn with_factors(rdata: &RMatrixData, factors: Vec<Factor>) -> Result<Self, TwistError> {
        let mut gc = GeneratorCocycle {
            n: rdata.n(),
            factors,
            r: rdata.r.clone(),
            r_inv: rdata.r_inv.clone(),
            rearrangement: SparseOp::identity(1),
        };
        if &(&gc.r * &gc.r_inv) != &QMatrix::identity(gc.n * gc.n) {
            return Err(TwistError::Singular);
        }
        gc.rearrangement = gc.block_operator(1, 1);
        Ok(gc)
    }

    /// Word-space dimension of degree `d` (matrix letters only).
    pub fn word_dim(&self, d: usize) -> usize {
        (self.n * self.n).pow(d as u32)
    }

    fn factor_op(&self, f: &Factor, sizes: [usize; 2]) -> SparseOp {
        let n = self.n;
        let starts = [0, sizes[0]];
        let legs: Vec<(usize, SlotKind)> = [f.leg1, f.leg2]
            .iter()
            .flat_map(|leg| (0..sizes[leg.block]).map(move |t| (starts[leg.block] + t, leg.kind)))
            .collect();
        let l1 = sizes[f.leg1.block];
        let l2 = sizes[f.leg2.block];
        let img = element_image(&self.r, &self.r_inv, n, f.inverse, l1, l2);
        let nl = legs.len();
        // old leg values -> list of (new leg values, coefficient)
        let mut moves: BTreeMap<usize, Vec<(Vec<usize>, QScalar)>> = BTreeMap::new();
        for (row, col, v) in img.entries() {
            let rd = digits(row, n, nl);
            let cd = digits(col, n, nl);
            let mut old = vec![0; nl];
            let mut new = vec![0; nl];
            for t in 0..nl {
                match legs[t].1 {
                    SlotKind::Lower => {
                        new[t] = rd[t];
                        old[t] = cd[t];
                    }
                    SlotKind::Upper => {
                        old[t] = rd[t];
                        new[t] = cd[t];
                    }
                }
            }
            moves.entry(undigits(&old, n)).or_default().push((new, v.clone()));
        }
        let letters = sizes[0] + sizes[1];
        let slots = 2 * letters;
        let pos: Vec<usize> = legs
            .iter()
            .map(|(l, k)| 2 * l + if *k == SlotKind::Upper { 0 } else { 1 })
            .collect();
        let dim = n.pow(slots as u32);
        let cols = (0..dim)
            .map(|w| {
                let wd = digits(w, n, slots);
                let old: Vec<usize> = pos.iter().map(|&p| wd[p]).collect();
                let mut acc = BTreeMap::new();
                if let Some(list) = moves.get(&undigits(&old, n)) {
                    for (new, v) in list {
                        let mut nd = wd.clone();
                        for (t, &p) in pos.iter().enumerate() {
                            nd[p] = new[t];
                        }
                        add_into(&mut acc, undigits(&nd, n), QFrac::from(v));
                    }
                }
                acc.into_iter().collect()
            })
            .collect();
        SparseOp { dim, cols }
    }

    /// `op((Δ^m ⊗ Δ^k) G)` on `m + k` letters.
    pub fn block_operator(&self, m: usize, k: usize) -> SparseOp {
        let mut op = SparseOp::identity(self.word_dim(m + k));
        for f in &self.factors {
            op = op.compose(&self.factor_op(f, [m, k]));
        }
        op
    }

    /// `Ω_d^{-1}` built from the split `d = m + (d - m)`.
    pub fn omega_inv_split(&self, d: usize, m: usize) -> SparseOp {
        if d <= 1 {
            return SparseOp::identity(self.word_dim(d));
        }
        assert!(m >= 1 && m < d, "split must be proper");
        let a = self.omega_inv(m);
        let b = self.omega_inv(d - m);
        a.kron(&b).compose(&self.block_operator(m, d - m))
    }

    /// `Ω_d^{-1}` with the default split `(d - 1, 1)`.
    pub fn omega_inv(&self, d: usize) -> SparseOp {
        if d <= 1 {
            return SparseOp::identity(self.word_dim(d));
        }
        if d == 2 {
            return self.rearrangement.clone();
        }
        self.omega_inv_split(d, d - 1)
    }

    /// `F = G^{-1}` as a dense Laurent matrix.
    pub fn f2(&self) -> Result<QMatrix, TwistError> {
        let g = self.rearrangement.to_qmatrix().ok_or_else(|| TwistError::Other("G not Laurent".into()))?;
        g.inverse().map_err(|e| TwistError::Other(e.to_string()))
    }

    /// Applies `Ω^{-1}` termwise; `f` letters are inert.
    pub fn transport_poly(&self, p: &NCPoly) -> Result<NCPoly, TwistError> {
        let mut cache: BTreeMap<usize, SparseOp> = BTreeMap::new();
        self.transport_with(p, &mut cache)
    }

    fn transport_with(&self, p: &NCPoly, cache: &mut BTreeMap<usize, SparseOp>) -> Result<NCPoly, TwistError> {
        let plain = Alphabet::new(self.n, false, 'T');
        let mut out = NCPoly::zero();
        for (w, c) in p.terms() {
            let k = w.f_count();
            let mw = Word::new(w.matrix_part().to_vec());
            let d = mw.len();
            let op = cache.entry(d).or_insert_with(|| self.omega_inv(d));
            let idx = plain.index_of(&mw);
            for (i, x) in op.column(idx) {
                let img = plain.word_at(d, *i);
                let mut letters = vec![F_LETTER; k];
                letters.extend_from_slice(img.letters());
                out.add_term(Word::new(letters), c * x);
            }
        }
        Ok(out)
    }
}

pub fn generator_cocycle(rdata: &RMatrixData) -> Result<GeneratorCocycle, TwistError> {
    GeneratorCocycle::with_factors(rdata, standard_factors())
}

/// `J(W) -> J(Ω^{-1} W)` on a relation set; the target alphabet uses `K`.
pub fn transport_ideal(w: &RelationSet, gc: &GeneratorCocycle) -> Result<RelationSet, TwistError> {
    let mut cache = BTreeMap::new();
    let polys: Vec<NCPoly> =
        w.relations().iter().map(|p| gc.transport_with(p, &mut cache)).collect::<Result<_, _>>()?;
    let mut alpha = w.alphabet.clone();
    alpha.symbol = 'K';
    RelationSet::new(alpha, &polys).map_err(|e| TwistError::Other(e.to_string()))
}

#[derive(Clone, Debug, Serialize)]
pub struct TwistReport {
    pub frt_to_re: bool,
    /// Transported metric relations equal the directly assembled reflection-equation form.
    pub metric_relations: Option<bool>,
    /// Transported determinant relation is central in the reflection-equation algebra.
    pub determinant_relation: Option<bool>,
    pub omega3_partition_independent: bool,
    pub identity_at_q1: bool,
    pub rearrangement_det: String,
    pub pass: bool,
}

/// Runs the full twist comparison for one series.
pub fn verify_twist_correspondence(rdata: &Arc<RMatrixData>) -> Result<TwistReport, TwistError> {
    let gc = generator_cocycle(rdata)?;
    verify_with(rdata, &gc)
}

pub fn verify_with(rdata: &Arc<RMatrixData>, gc: &GeneratorCocycle) -> Result<TwistReport, TwistError> {
    let frt = qfun::frt_relations(rdata);
    let re = qfun::re_relations(rdata);
    let moved = transport_ideal(&frt, gc)?;
    let frt_to_re = moved.same_span(&re);
    let metric_relations = if rdata.id.series == Series::A {
        None
    } else {
        let alpha = Alphabet::new(rdata.n(), true, 'T');
        let metric = qfun::metric_polys(rdata.b_form.as_ref().unwrap(), rdata.b_inv.as_ref().unwrap(), &alpha);
        let moved: Vec<NCPoly> = metric.iter().map(|p| gc.transport_poly(p)).collect::<Result<_, _>>()?;
        let direct = qfun::re_metric_polys(rdata, &alpha);
        let a = RelationSet::new(alpha.clone(), &moved).map_err(|e| TwistError::Other(e.to_string()))?;
        let b = RelationSet::new(alpha, &direct).map_err(|e| TwistError::Other(e.to_string()))?;
        Some(a.same_span(&b))
    };
    let determinant_relation = if rdata.id.series == Series::A && frt_to_re {
        let pres = qfun::presentation(rdata.clone(), AlgebraKind::Re, GroupModel::Free)
            .map_err(|e| TwistError::Other(e.to_string()))?;
        let n = rdata.n();
        let gq: GradedQuotient = pres.quotient(n + 1);
        let det_t = qfun::frt_determinant(rdata).map_err(|e| TwistError::Other(e.to_string()))?;
        let det_k = gc.transport_poly(&det_t)?;
        Some(gq.is_central(&det_k).map_err(|e| TwistError::Other(e.to_string()))?)
    } else {
        None
    };
    let omega3_partition_independent = gc.omega_inv_split(3, 2) == gc.omega_inv_split(3, 1);
    let identity_at_q1 = gc.rearrangement.evaluate_at(&Rat::one()).map_or(false, |g| g.is_identity());
    let rearrangement_det = gc
        .rearrangement
        .to_qmatrix()
        .and_then(|m| m.det().ok())
        .map_or_else(|| "n/a".into(), |d| d.to_string());
    let pass = frt_to_re
        && metric_relations.unwrap_or(true)
        && determinant_relation.unwrap_or(true)
        && omega3_partition_independent
        && identity_at_q1;
    Ok(TwistReport {
        frt_to_re,
        metric_relations,
        determinant_relation,
        omega3_partition_independent,
        identity_at_q1,
        rearrangement_det,
        pass,
    })
}

/// Span comparison of transported and target relations in one degree.
pub fn spans_match(a: &[NCPoly], b: &[NCPoly], alpha: &Alphabet, d: usize) -> bool {
    let va: Vec<SparseVec> = a.iter().map(|p| p.to_sparse(alpha, d).unwrap()).collect();
    let vb: Vec<SparseVec> = b.iter().map(|p| p.to_sparse(alpha, d).unwrap()).collect();
    same_span(&va, &vb, alpha.word_count(d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rmat::{build_r, SeriesId};

    fn rd(s: Series, r: usize) -> Arc<RMatrixData> {
        Arc::new(build_r(SeriesId::new(s, r).unwrap()).unwrap())
    }

    #[test]
    fn sl2_transport_and_determinant() {
        let d = rd(Series::A, 1);
        let rep = verify_twist_correspondence(&d).unwrap();
        assert!(rep.frt_to_re);
        assert_eq!(rep.determinant_relation, Some(true));
        assert!(rep.omega3_partition_independent);
        assert!(rep.identity_at_q1);
    }

    #[test]
    fn f2_is_laurent_with_unit_det() {
        let d = rd(Series::A, 1);
        let gc = generator_cocycle(&d).unwrap();
        let f2 = gc.f2().unwrap();
        let det = f2.det().unwrap();
        let s = det.as_laurent().unwrap();
        assert!(s.is_monomial());
        assert_eq!(s.terms()[0].1, Rat::one());
    }

    #[test]
    fn flipped_legs_fail() {
        let d = rd(Series::A, 1);
        let mut fs = standard_factors();
        let f0 = &mut fs[0];
        std::mem::swap(&mut f0.leg1, &mut f0.leg2);
        let gc = GeneratorCocycle::with_factors(&d, fs).unwrap();
        let rep = verify_with(&d, &gc).unwrap();
        assert!(!rep.frt_to_re);
    }

    #[test]
    fn identity_cocycle_keeps_span() {
        let d = rd(Series::A, 1);
        let gc = GeneratorCocycle::with_factors(&d, vec![]).unwrap();
        let frt = qfun::frt_relations(&d);
        let moved = transport_ideal(&frt, &gc).unwrap();
        assert!(moved.same_span(&frt));
    }

    #[test]
    fn metric_relations_transport_for_so3_and_sp2() {
        for (s, r) in [(Series::B, 1), (Series::C, 1)] {
            let d = rd(s, r);
            let rep = verify_twist_correspondence(&d).unwrap();
            assert!(rep.frt_to_re, "{s}");
            assert_eq!(rep.metric_relations, Some(true), "{s}");
            assert!(rep.pass);
        }
    }

    #[test]
    fn omega_at_q1_is_identity() {
        let d = rd(Series::A, 1);
        let gc = generator_cocycle(&d).unwrap();
        let o3 = gc.omega_inv(3).evaluate_at(&Rat::one()).unwrap();
        assert!(o3.is_identity());
    }
}
