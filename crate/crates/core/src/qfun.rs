//! Presentations of the quantized coordinate rings: FRT and reflection
//! equation relations, group relations, the quantum determinant, and the
//! classical oracle used for flatness.

use std::fmt;
use std::sync::Arc;

use num_traits::One;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::exactalg::{QFrac, QMatrix, QScalar, Rat};
use crate::freenc::{build_quotient, Alphabet, FreeError, GradedQuotient, Letter, NCPoly, RelationSet, Word, F_LETTER};
use crate::rmat::{RMatrixData, Series};
use crate::twistmod;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AlgebraKind {
    Frt,
    Re,
    Classical,
}

impl fmt::Display for AlgebraKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            AlgebraKind::Frt => "frt",
            AlgebraKind::Re => "re",
            AlgebraKind::Classical => "classical",
        };
        write!(f, "{s}")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GroupModel {
    Free,
    Sharp,
    UnitF,
}

impl fmt::Display for GroupModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            GroupModel::Free => "free",
            GroupModel::Sharp => "sharp",
            GroupModel::UnitF => "unitf",
        };
        write!(f, "{s}")
    }
}

#[derive(Debug, Error)]
pub enum QfunError {
    #[error(transparent)]
    Free(#[from] FreeError),
    #[error("quantum determinant: {0}")]
    Determinant(String),
    #[error("inconsistent configuration: {0}")]
    Config(String),
    #[error("twist: {0}")]
    Twist(String),
}

/// Generator alphabet, relations and metadata of one algebra.
#[derive(Clone, Debug)]
pub struct AlgebraPresentation {
    pub kind: AlgebraKind,
    pub rdata: Arc<RMatrixData>,
    pub alphabet: Alphabet,
    pub relations: RelationSet,
    pub group_model: GroupModel,
}

impl AlgebraPresentation {
    pub fn quotient(&self, max_degree: usize) -> GradedQuotient {
        build_quotient(&self.relations, max_degree)
    }

    pub fn to_json(&self) -> Value {
        let rels: Vec<Value> = self
            .relations
            .relations()
            .iter()
            .map(|p| {
                Value::Array(
                    p.terms()
                        .map(|(w, c)| json!([self.alphabet.word_name(w), c.to_string()]))
                        .collect(),
                )
            })
            .collect();
        json!({
            "kind": self.kind.to_string(),
            "series": self.rdata.id.series.to_string(),
            "rank": self.rdata.id.rank,
            "n": self.rdata.id.n,
            "model": self.group_model.to_string(),
            "alphabet": {
                "generators": self.alphabet.letters().iter().map(|&l| self.alphabet.letter_name(l)).collect::<Vec<_>>(),
                "central": self.alphabet.has_f,
            },
            "relations": rels,
        })
    }
}

/// Square matrix with noncommutative polynomial entries.
#[derive(Clone, Debug)]
pub struct WordMatrix {
    pub dim: usize,
    entries: Vec<NCPoly>,
}

impl WordMatrix {
    pub fn zeros(dim: usize) -> Self {
        WordMatrix { dim, entries: vec![NCPoly::zero(); dim * dim] }
    }

    pub fn get(&self, i: usize, j: usize) -> &NCPoly {
        &self.entries[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, p: NCPoly) {
        self.entries[i * self.dim + j] = p;
    }

    pub fn scalar(m: &QMatrix) -> Self {
        let mut w = Self::zeros(m.rows());
        for (i, j, x) in m.entries() {
            w.set(i, j, NCPoly::term(Word::empty(), QFrac::from(x)));
        }
        w
    }

    /// Generator matrix `T` with `T[i][j] = T^i_j`.
    pub fn generators(alpha: &Alphabet) -> Self {
        let n = alpha.n;
        let mut w = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                w.set(i, j, NCPoly::letter(alpha.gen(i, j)));
            }
        }
        w
    }

    pub fn transpose(&self) -> Self {
        let mut w = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                w.set(i, j, self.get(j, i).clone());
            }
        }
        w
    }

    /// `X ⊗ 1`.
    pub fn leg1(&self) -> Self {
        let n = self.dim;
        let mut w = Self::zeros(n * n);
        for i in 0..n {
            for a in 0..n {
                for k in 0..n {
                    w.set(i * n + k, a * n + k, self.get(i, a).clone());
                }
            }
        }
        w
    }

    /// `1 ⊗ X`.
    pub fn leg2(&self) -> Self {
        let n = self.dim;
        let mut w = Self::zeros(n * n);
        for i in 0..n {
            for k in 0..n {
                for b in 0..n {
                    w.set(i * n + k, i * n + b, self.get(k, b).clone());
                }
            }
        }
        w
    }

    pub fn mul(&self, o: &WordMatrix) -> WordMatrix {
        let n = self.dim;
        let mut w = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = o.get(k, j);
                    if !b.is_zero() {
                        let e = &w.entries[i * n + j] + &(a * b);
                        w.set(i, j, e);
                    }
                }
            }
        }
        w
    }

    pub fn sub(&self, o: &WordMatrix) -> WordMatrix {
        WordMatrix {
            dim: self.dim,
            entries: self.entries.iter().zip(&o.entries).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn into_entries(self) -> Vec<NCPoly> {
        self.entries.into_iter().filter(|p| !p.is_zero()).collect()
    }
}

fn fpow(k: usize) -> Word {
    Word::new(vec![F_LETTER; k])
}

/// Entries of `R T1 T2 - T2 T1 R`.
pub fn frt_polys(rdata: &RMatrixData, alpha: &Alphabet) -> Vec<NCPoly> {
    let t = WordMatrix::generators(alpha);
    let (t1, t2) = (t.leg1(), t.leg2());
    let r = WordMatrix::scalar(&rdata.r);
    r.mul(&t1).mul(&t2).sub(&t2.mul(&t1).mul(&r)).into_entries()
}

/// Entries of `R21 K1 R12 K2 - K2 R21 K1 R12`.
pub fn re_polys(rdata: &RMatrixData, alpha: &Alphabet) -> Vec<NCPoly> {
    let k = WordMatrix::generators(alpha);
    let (k1, k2) = (k.leg1(), k.leg2());
    let r = WordMatrix::scalar(&rdata.r);
    let r21 = WordMatrix::scalar(&rdata.r21());
    r21.mul(&k1).mul(&r).mul(&k2).sub(&k2.mul(&r21).mul(&k1).mul(&r)).into_entries()
}

pub fn frt_relations(rdata: &RMatrixData) -> RelationSet {
    let alpha = Alphabet::new(rdata.n(), false, 'T');
    RelationSet::new(alpha.clone(), &frt_polys(rdata, &alpha)).expect("homogeneous")
}

pub fn re_relations(rdata: &RMatrixData) -> RelationSet {
    let alpha = Alphabet::new(rdata.n(), false, 'K');
    RelationSet::new(alpha.clone(), &re_polys(rdata, &alpha)).expect("homogeneous")
}

/// Commutators of all matrix generators.
pub fn commutator_polys(alpha: &Alphabet) -> Vec<NCPoly> {
    let letters: Vec<Letter> = alpha.matrix_letters().collect();
    let mut out = Vec::new();
    for (i, &a) in letters.iter().enumerate() {
        for &b in &letters[i + 1..] {
            let ab = NCPoly::word(Word::new(vec![a, b]));
            let ba = NCPoly::word(Word::new(vec![b, a]));
            out.push(&ab - &ba);
        }
    }
    out
}

fn permutations(n: usize) -> Vec<(Vec<usize>, i64)> {
    fn rec(prefix: &mut Vec<usize>, used: &mut Vec<bool>, n: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for i in 0..n {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, n, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], n, &mut out);
    out.into_iter()
        .map(|p| {
            let inv = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
            let sign = if inv % 2 == 0 { 1 } else { -1 };
            (p, sign)
        })
        .collect()
}

/// Leibniz determinant with row-ordered words.
pub fn classical_determinant(alpha: &Alphabet) -> NCPoly {
    NCPoly::from_terms(permutations(alpha.n).into_iter().map(|(p, s)| {
        let w = Word::new((0..alpha.n).map(|i| alpha.gen(i, p[i])).collect());
        (w, QFrac::from_int(s))
    }))
}

/// Evaluates scalar coefficients at `q = 1`.
fn specialize_matrix(m: &QMatrix) -> QMatrix {
    let one = Rat::one();
    m.map(|x| QScalar::constant(x.evaluate_at(&one).expect("Laurent entries evaluate at 1")))
}

/// Orthogonal/symplectic relations `B X^t B^{-1} X = f^2`, `X B X^t B^{-1} = f^2`.
pub fn metric_polys(b: &QMatrix, binv: &QMatrix, alpha: &Alphabet) -> Vec<NCPoly> {
    let x = WordMatrix::generators(alpha);
    let bm = WordMatrix::scalar(b);
    let bi = WordMatrix::scalar(binv);
    let mut ff = WordMatrix::zeros(alpha.n);
    for i in 0..alpha.n {
        ff.set(i, i, NCPoly::word(fpow(2)));
    }
    let r1 = bm.mul(&x.transpose()).mul(&bi).mul(&x).sub(&ff);
    let r2 = x.mul(&bm).mul(&x.transpose()).mul(&bi).sub(&ff);
    let mut out = r1.into_entries();
    out.extend(r2.into_entries());
    out
}

/// Twisted metric relations assembled directly in the reflection-equation
/// form. With `X = R` and `Y = R^{-1}` (first family) or `Y = R` (second):
///
/// * `sum X[(p,t),(i,u)] M[r][t] K^r_p K^u_j - (B^{-1})_ij f^2`, where
///   `M[a][d] = sum_{b,c} Y[(b,c),(a,d)] (B^{-1})_bc`;
/// * `sum X[(a,j),(b,d)] B_bc K^i_a K^d_c - sum_{a,b} Y[(i,j),(a,b)] B_ab f^2`.
pub fn re_metric_polys(rdata: &RMatrixData, alpha: &Alphabet) -> Vec<NCPoly> {
    let n = rdata.n();
    let b = rdata.b_form.as_ref().expect("metric");
    let binv = rdata.b_inv.as_ref().expect("metric");
    let x = &rdata.r;
    let ix = |a: usize, bb: usize| a * n + bb;
    let mut out = Vec::new();
    let yinv = &rdata.r_inv;
    let mut m = vec![vec![QScalar::zero(); n]; n];
    for a in 0..n {
        for d in 0..n {
            let mut acc = QScalar::zero();
            for bb in 0..n {
                for c in 0..n {
                    acc += &(yinv.get(ix(bb, c), ix(a, d)) * binv.get(bb, c));
                }
            }
            m[a][d] = acc;
        }
    }
    for i in 0..n {
        for j in 0..n {
            let mut p = NCPoly::zero();
            for pp in 0..n {
                for t in 0..n {
                    for u in 0..n {
                        let xv = x.get(ix(pp, t), ix(i, u));
                        if xv.is_zero() {
                            continue;
                        }
                        for r in 0..n {
                            if m[r][t].is_zero() {
                                continue;
                            }
                            let w = Word::new(vec![alpha.gen(r, pp), alpha.gen(u, j)]);
                            p.add_term(w, QFrac::from(&(xv * &m[r][t])));
                        }
                    }
                }
            }
            p.add_term(fpow(2), -QFrac::from(binv.get(i, j)));
            out.push(p);
        }
    }
    for i in 0..n {
        for j in 0..n {
            let mut p = NCPoly::zero();
            for a in 0..n {
                for bb in 0..n {
                    for d in 0..n {
                        let xv = x.get(ix(a, j), ix(bb, d));
                        if xv.is_zero() {
                            continue;
                        }
                        for c in 0..n {
                            let bv = b.get(bb, c);
                            if bv.is_zero() {
                                continue;
                            }
                            let w = Word::new(vec![alpha.gen(i, a), alpha.gen(d, c)]);
                            p.add_term(w, QFrac::from(&(xv * bv)));
                        }
                    }
                }
            }
            let mut rhs = QScalar::zero();
            for a in 0..n {
                for bb in 0..n {
                    rhs += &(x.get(ix(i, j), ix(a, bb)) * b.get(a, bb));
                }
            }
            p.add_term(fpow(2), -QFrac::from(&rhs));
            out.push(p);
        }
    }
    out.retain(|p| !p.is_zero());
    out
}

/// Classical (q = 1) limit of an element: coefficients evaluated at 1, words sorted.
pub fn classical_limit(p: &NCPoly) -> Result<NCPoly, QfunError> {
    let one = Rat::one();
    let mut out = NCPoly::zero();
    for (w, c) in p.terms() {
        let v = c.evaluate_at(&one).map_err(|e| QfunError::Determinant(e.to_string()))?;
        out.add_term(w.sorted(), QFrac::from(QScalar::constant(v)));
    }
    Ok(out)
}

fn sorted_poly(p: &NCPoly) -> NCPoly {
    NCPoly::from_terms(p.terms().map(|(w, c)| (w.sorted(), c.clone())))
}

/// Central degree-`N` element of the FRT quotient on row-ordered words
/// `T^1_{s(1)} ... T^N_{s(N)}`, normalized by the identity word.
pub fn frt_determinant(rdata: &RMatrixData) -> Result<NCPoly, QfunError> {
    if rdata.id.series != Series::A {
        return Err(QfunError::Determinant("series A only".into()));
    }
    let rels = frt_relations(rdata);
    let alpha = rels.alphabet.clone();
    let n = alpha.n;
    let gq = build_quotient(&rels, n + 1);
    solve_determinant(&gq, &alpha)
}

fn solve_determinant(gq: &GradedQuotient, alpha: &Alphabet) -> Result<NCPoly, QfunError> {
    use crate::exactalg::Echelon;
    use std::collections::BTreeMap;
    let n = alpha.n;
    let perms = permutations(n);
    let words: Vec<Word> =
        perms.iter().map(|(p, _)| Word::new((0..n).map(|i| alpha.gen(i, p[i])).collect())).collect();
    // commutator images of each ansatz word, as linear functionals on the unknowns
    let mut rows: BTreeMap<(Letter, usize), Vec<(usize, QFrac)>> = BTreeMap::new();
    for (k, w) in words.iter().enumerate() {
        let z = NCPoly::word(w.clone());
        for g in alpha.matrix_letters() {
            let gp = NCPoly::letter(g);
            let c = &(&z * &gp) - &(&gp * &z);
            for (j, x) in gq.coords(&c, n + 1)? {
                rows.entry((g, j)).or_default().push((k, x));
            }
        }
    }
    let mut e = Echelon::new(words.len());
    e.insert_many(rows.into_values().collect());
    let ker = e.kernel();
    if ker.len() != 1 {
        return Err(QfunError::Determinant(format!("central ansatz space has dimension {}", ker.len())));
    }
    let v = &ker[0];
    let id_coeff = v.iter().find(|(k, _)| *k == 0).map(|(_, c)| c.clone());
    let Some(id_coeff) = id_coeff else {
        return Err(QfunError::Determinant("identity word coefficient vanishes".into()));
    };
    let det = NCPoly::from_terms(v.iter().map(|(k, c)| (words[*k].clone(), c / &id_coeff)));
    let lim = classical_limit(&det)?;
    if lim != sorted_poly(&classical_determinant(alpha)) {
        return Err(QfunError::Determinant("classical limit is not the determinant".into()));
    }
    Ok(det)
}

/// Quantum determinant of an FRT or RE presentation (series A).
///
/// The RE form is the twist image of the FRT determinant.
pub fn quantum_determinant(pres: &AlgebraPresentation) -> Result<NCPoly, QfunError> {
    let rd = &pres.rdata;
    let det_t = frt_determinant(rd)?;
    let det = match pres.kind {
        AlgebraKind::Frt => det_t,
        AlgebraKind::Re => {
            let gc = twistmod::generator_cocycle(rd).map_err(|e| QfunError::Twist(e.to_string()))?;
            let img = gc.transport_poly(&det_t).map_err(|e| QfunError::Twist(e.to_string()))?;
            let lim = classical_limit(&img)?;
            let alpha = Alphabet::new(rd.n(), false, 'K');
            if lim != sorted_poly(&classical_determinant(&alpha)) {
                return Err(QfunError::Determinant("transported classical limit".into()));
            }
            img
        }
        AlgebraKind::Classical => classical_determinant(&pres.alphabet),
    };
    Ok(det)
}

fn base_alphabet(kind: AlgebraKind, n: usize, model: GroupModel) -> Alphabet {
    let symbol = if kind == AlgebraKind::Re { 'K' } else { 'T' };
    Alphabet::new(n, model != GroupModel::Free, symbol)
}

/// Degree-2 defining relations of the free-matrix model (no group relations).
fn base_polys(kind: AlgebraKind, rdata: &RMatrixData, alpha: &Alphabet) -> Vec<NCPoly> {
    match kind {
        AlgebraKind::Frt => frt_polys(rdata, alpha),
        AlgebraKind::Re => re_polys(rdata, alpha),
        AlgebraKind::Classical => commutator_polys(alpha),
    }
}

/// Group relations for the graded models.
pub fn group_polys(kind: AlgebraKind, rdata: &RMatrixData, alpha: &Alphabet) -> Result<Vec<NCPoly>, QfunError> {
    let n = rdata.n();
    match (rdata.id.series, kind) {
        (Series::A, AlgebraKind::Classical) => {
            let det = classical_determinant(alpha);
            Ok(vec![&det - &NCPoly::word(fpow(n))])
        }
        (Series::A, k) => {
            let tmp = AlgebraPresentation {
                kind: k,
                rdata: Arc::new(rdata.clone()),
                alphabet: alpha.clone(),
                relations: RelationSet::empty(alpha.clone()),
                group_model: GroupModel::Sharp,
            };
            let det = quantum_determinant(&tmp)?;
            Ok(vec![&det - &NCPoly::word(fpow(n))])
        }
        (_, AlgebraKind::Classical) => {
            let b0 = specialize_matrix(rdata.b_form.as_ref().unwrap());
            let b0i = specialize_matrix(rdata.b_inv.as_ref().unwrap());
            Ok(metric_polys(&b0, &b0i, alpha))
        }
        (_, AlgebraKind::Frt) => {
            Ok(metric_polys(rdata.b_form.as_ref().unwrap(), rdata.b_inv.as_ref().unwrap(), alpha))
        }
        (_, AlgebraKind::Re) => Ok(re_metric_polys(rdata, alpha)),
    }
}

/// Builds a presentation for the given kind and group model.
pub fn presentation(rdata: Arc<RMatrixData>, kind: AlgebraKind, model: GroupModel) -> Result<AlgebraPresentation, QfunError> {
    let alpha = base_alphabet(kind, rdata.n(), model);
    let mut polys = base_polys(kind, &rdata, &alpha);
    if model != GroupModel::Free {
        polys.extend(group_polys(kind, &rdata, &alpha)?);
    }
    let relations = RelationSet::new(alpha.clone(), &polys)?;
    Ok(AlgebraPresentation { kind, rdata, alphabet: alpha, relations, group_model: model })
}

/// Adds relations to a presentation.
pub fn group_relations(pres: &AlgebraPresentation, extra: &[NCPoly]) -> Result<AlgebraPresentation, QfunError> {
    let mut p = pres.clone();
    p.relations.extend(extra)?;
    Ok(p)
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct FlatnessRow {
    pub degree: usize,
    pub quantum: usize,
    pub classical: usize,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct FlatnessReport {
    pub kind: String,
    pub model: String,
    pub rows: Vec<FlatnessRow>,
    /// For the unit-f model: whether multiplication by `f` is injective in each degree.
    pub f_regular: Option<Vec<bool>>,
    pub pass: bool,
}

impl FlatnessReport {
    pub fn quantum_dims(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.quantum).collect()
    }

    pub fn classical_dims(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.classical).collect()
    }
}

/// Whether `x -> f x` is injective from degree `d-1` to degree `d`.
pub fn f_regular(gq: &GradedQuotient, d: usize) -> Result<bool, QfunError> {
    let prev = gq.dim(d - 1);
    let f = NCPoly::letter(F_LETTER);
    let imgs: Vec<_> = (0..prev)
        .map(|i| gq.coords(&(&f * &NCPoly::word(gq.basis_word(d - 1, i))), d))
        .collect::<Result<_, _>>()?;
    Ok(crate::exactalg::rank_of(&imgs, gq.dim(d)) == prev)
}

/// Compares quotient dimensions with the classical oracle of the same model.
pub fn flatness_check(pres: &AlgebraPresentation, d_max: usize) -> Result<FlatnessReport, QfunError> {
    let gq = pres.quotient(d_max);
    let classical = presentation(pres.rdata.clone(), AlgebraKind::Classical, pres.group_model)?;
    let gc = classical.quotient(d_max);
    flatness_from(pres, &gq, &gc)
}

pub fn flatness_from(pres: &AlgebraPresentation, gq: &GradedQuotient, gc: &GradedQuotient) -> Result<FlatnessReport, QfunError> {
    let rows: Vec<FlatnessRow> = (0..=gq.max_degree.min(gc.max_degree))
        .map(|d| FlatnessRow { degree: d, quantum: gq.dim(d), classical: gc.dim(d), pass: gq.dim(d) == gc.dim(d) })
        .collect();
    let f_reg = if pres.group_model == GroupModel::UnitF {
        Some((1..=gq.max_degree).map(|d| f_regular(gq, d)).collect::<Result<Vec<_>, _>>()?)
    } else {
        None
    };
    let pass = rows.iter().all(|r| r.pass) && f_reg.as_ref().map_or(true, |v| v.iter().all(|&b| b));
    Ok(FlatnessReport {
        kind: pres.kind.to_string(),
        model: pres.group_model.to_string(),
        rows,
        f_regular: f_reg,
        pass,
    })
}

/// Whether `det - f^N` lies in the degree-`N` ideal of the classical metric model.
pub fn classical_metric_implies_det(rdata: &RMatrixData) -> Result<bool, QfunError> {
    let pres = presentation(Arc::new(rdata.clone()), AlgebraKind::Classical, GroupModel::Sharp)?;
    let n = rdata.n();
    let gq = pres.quotient(n);
    let det = &classical_determinant(&pres.alphabet) - &NCPoly::word(fpow(n));
    Ok(gq.normal_form(&det)?.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rmat::{build_r, SeriesId};

    fn rd(s: Series, r: usize) -> Arc<RMatrixData> {
        Arc::new(build_r(SeriesId::new(s, r).unwrap()).unwrap())
    }

    #[test]
    fn sl2_relation_spans() {
        let d = rd(Series::A, 1);
        assert_eq!(frt_relations(&d).count(2), 6);
        assert_eq!(re_relations(&d).count(2), 6);
    }

    #[test]
    fn sl2_determinant_coefficient() {
        let d = rd(Series::A, 1);
        let det = frt_determinant(&d).unwrap();
        let a = Alphabet::new(2, false, 'T');
        let w11_22 = Word::new(vec![a.gen(0, 0), a.gen(1, 1)]);
        let w12_21 = Word::new(vec![a.gen(0, 1), a.gen(1, 0)]);
        assert!(det.coeff(&w11_22).is_one());
        assert_eq!(det.coeff(&w12_21), QFrac::from(-QScalar::q_pow(-1)));
        assert_eq!(det.len(), 2);
    }

    #[test]
    fn sl2_row_commutation_by_hand() {
        // R T1 T2 = T2 T1 R at entry ((1,1),(1,2)) reads q T11 T12 = T12 T11.
        let d = rd(Series::A, 1);
        let rels = frt_relations(&d);
        let a = rels.alphabet.clone();
        let gq = build_quotient(&rels, 2);
        let t11 = NCPoly::letter(a.gen(0, 0));
        let t12 = NCPoly::letter(a.gen(0, 1));
        let lhs = (&t11 * &t12).scale(&QFrac::from(QScalar::q()));
        let rhs = &t12 * &t11;
        assert!(gq.normal_form(&(&lhs - &rhs)).unwrap().is_zero());
    }

    #[test]
    fn q1_specialization_is_commutative() {
        let d = rd(Series::A, 1);
        let alpha = Alphabet::new(2, false, 'T');
        let one = Rat::one();
        let spec: Vec<NCPoly> = frt_polys(&d, &alpha)
            .iter()
            .map(|p| p.map_coeffs(|c| QFrac::from(QScalar::constant(c.evaluate_at(&one).unwrap()))))
            .collect();
        let a = RelationSet::new(alpha.clone(), &spec).unwrap();
        let b = RelationSet::new(alpha.clone(), &commutator_polys(&alpha)).unwrap();
        assert!(a.same_span(&b));
    }

    #[test]
    fn sl2_dims() {
        let d = rd(Series::A, 1);
        for kind in [AlgebraKind::Frt, AlgebraKind::Re] {
            let free = presentation(d.clone(), kind, GroupModel::Free).unwrap();
            assert_eq!(free.quotient(4).dims(), vec![1, 4, 10, 20, 35]);
            let sharp = presentation(d.clone(), kind, GroupModel::Sharp).unwrap();
            assert_eq!(sharp.quotient(4).dims(), vec![1, 5, 14, 30, 55]);
        }
    }

    #[test]
    fn unit_f_is_regular() {
        let d = rd(Series::A, 1);
        let p = presentation(d, AlgebraKind::Re, GroupModel::UnitF).unwrap();
        let rep = flatness_check(&p, 3).unwrap();
        assert!(rep.pass, "{rep:?}");
    }

    #[test]
    fn metric_model_does_not_force_det() {
        let d = rd(Series::B, 1);
        assert!(!classical_metric_implies_det(&d).unwrap());
    }
}
