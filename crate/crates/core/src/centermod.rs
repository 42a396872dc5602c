//! Centers, classical invariants and the free-module decomposition over the center.

use std::sync::Arc;

use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::exactalg::{Echelon, QFrac, QMatrix, QScalar, Rat, SparseVec};
use crate::freenc::{Alphabet, GradedQuotient, Letter, NCPoly, Word, F_LETTER};
use crate::poisson::cayley_points;
use crate::qfun::{self, AlgebraKind, AlgebraPresentation, GroupModel};
use crate::rmat::{RMatrixData, Series};
use crate::twistmod::{self, GeneratorCocycle};

#[derive(Debug, Error)]
pub enum CenterError {
    #[error("degree {0} needs a quotient built to degree {1}")]
    DegreeOverflow(usize, usize),
    #[error("degree-1 centralizer has dimension {0}")]
    TraceDimension(usize),
    #[error("{0}")]
    Other(String),
}

fn other<E: std::fmt::Display>(e: E) -> CenterError {
    CenterError::Other(e.to_string())
}

#[derive(Clone, Debug, Serialize)]
pub struct CenterRow {
    pub degree: usize,
    pub dim: usize,
    /// Kernel of the adjoint derivations on the classical quotient.
    pub classical_by_derivations: usize,
    /// Fixed space of conjugation by sampled rational group points.
    pub classical_by_group_points: usize,
    pub matches: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CenterReport {
    pub kind: String,
    pub model: String,
    pub rows: Vec<CenterRow>,
    pub pairwise_commute: bool,
    pub pass: bool,
    #[serde(skip)]
    pub bases: Vec<Vec<NCPoly>>,
}

impl CenterReport {
    pub fn dims(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.dim).collect()
    }

    pub fn classical_dims(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.classical_by_derivations).collect()
    }
}

/// Lie algebra basis acting by derivations: `gl_N` for series A, the metric algebra otherwise.
fn lie_basis(rdata: &RMatrixData) -> Vec<QMatrix> {
    let n = rdata.n();
    let unit = |i: usize, j: usize| QMatrix::from_fn(n, n, |a, b| if a == i && b == j { QScalar::one() } else { QScalar::zero() });
    match &rdata.b_form {
        None => (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| unit(i, j)).collect(),
        Some(b) => {
            let b0 = b.map(|x| QScalar::constant(x.evaluate_at(&Rat::one()).unwrap()));
            let symmetric = b0 == b0.transpose();
            let mut out = Vec::new();
            for i in 0..n {
                for j in i..n {
                    if i == j && symmetric {
                        continue;
                    }
                    let a = if symmetric { &unit(i, j) - &unit(j, i) } else { &unit(i, j) + &unit(j, i) };
                    out.push(&b0 * &a);
                }
            }
            out
        }
    }
}

/// `x^i_j -> (Xξ - ξX)_{ij}` as a linear form.
fn derivation_on_letter(alpha: &Alphabet, xi: &QMatrix, l: Letter) -> NCPoly {
    let Some((i, j)) = alpha.indices(l) else {
        return NCPoly::zero();
    };
    let n = alpha.n;
    let mut p = NCPoly::zero();
    for a in 0..n {
        let right = xi.get(a, j);
        if !right.is_zero() {
            p.add_term(Word::letter(alpha.gen(i, a)), QFrac::from(right.clone()));
        }
        let left = xi.get(i, a);
        if !left.is_zero() {
            p.add_term(Word::letter(alpha.gen(a, j)), QFrac::from(-left));
        }
    }
    p
}

fn apply_derivation(alpha: &Alphabet, xi: &QMatrix, w: &Word) -> NCPoly {
    let ls = w.letters();
    let mut out = NCPoly::zero();
    for p in 0..ls.len() {
        let d = derivation_on_letter(alpha, xi, ls[p]);
        if d.is_zero() {
            continue;
        }
        let pre = NCPoly::word(Word::new(ls[..p].to_vec()));
        let post = NCPoly::word(Word::new(ls[p + 1..].to_vec()));
        out = &out + &(&(&pre * &d) * &post);
    }
    out
}

/// `x^i_j -> (g X g^{-1})_{ij}`, with `f` fixed.
fn conjugation_on_letter(alpha: &Alphabet, g: &QMatrix, ginv: &QMatrix, l: Letter) -> NCPoly {
    let Some((i, j)) = alpha.indices(l) else {
        return NCPoly::letter(F_LETTER);
    };
    let n = alpha.n;
    let mut p = NCPoly::zero();
    for a in 0..n {
        for b in 0..n {
            let c = g.get(i, a) * ginv.get(b, j);
            if !c.is_zero() {
                p.add_term(Word::letter(alpha.gen(a, b)), QFrac::from(c));
            }
        }
    }
    p
}

fn kernel_dim_of_maps(dim: usize, images: &[Vec<SparseVec>]) -> usize {
    // images[op][basis index] -> coordinates; kernel of the stacked map
    let mut rows: std::collections::BTreeMap<(usize, usize), SparseVec> = std::collections::BTreeMap::new();
    for (op, cols) in images.iter().enumerate() {
        for (i, v) in cols.iter().enumerate() {
            for (j, c) in v {
                rows.entry((op, *j)).or_default().push((i, c.clone()));
            }
        }
    }
    let mut e = Echelon::new(dim);
    e.insert_many(rows.into_values().collect());
    dim - e.rank()
}

/// Classical invariant dimension in degree `d` via the adjoint derivations.
pub fn classical_invariants_by_derivations(gc: &GradedQuotient, rdata: &RMatrixData, d: usize) -> usize {
    let alpha = &gc.alphabet;
    let basis = gc.complement_words(d);
    let images: Vec<Vec<SparseVec>> = lie_basis(rdata)
        .par_iter()
        .map(|xi| basis.iter().map(|w| gc.coords(&apply_derivation(alpha, xi, w), d).unwrap()).collect())
        .collect();
    kernel_dim_of_maps(basis.len(), &images)
}

/// Rational group points: random integer matrices for series A, Cayley points otherwise.
pub fn group_points(rdata: &RMatrixData, count: usize, seed: u64) -> Result<Vec<QMatrix>, CenterError> {
    let n = rdata.n();
    if rdata.id.series != Series::A {
        let pts = cayley_points(rdata, count, seed).map_err(other)?;
        return Ok(pts.iter().map(|x| normalize_scale(x, rdata)).collect());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let g = QMatrix::from_fn(n, n, |_, _| QScalar::constant(Rat::from_integer(rng.gen_range(-3i64..=3).into())));
        if g.det().map(|d| !d.is_zero()).unwrap_or(false) {
            out.push(g);
        }
    }
    Ok(out)
}

/// Divides a variety point `X` by its scale `f`, where `B₀ X^t B₀^{-1} X = f²`.
fn normalize_scale(x: &QMatrix, rdata: &RMatrixData) -> QMatrix {
    let b = rdata.b_form.as_ref().unwrap();
    let b0 = b.map(|v| QScalar::constant(v.evaluate_at(&Rat::one()).unwrap()));
    let b0inv = b0.inverse().unwrap();
    let m = &(&(&b0 * &x.transpose()) * &b0inv) * x;
    let f2 = m.get(0, 0).as_constant().unwrap();
    let f = rational_sqrt(&f2).expect("scale is a rational square");
    x.scale(&QScalar::constant(Rat::one() / f))
}

fn rational_sqrt(r: &Rat) -> Option<Rat> {
    let (n, d) = (r.numer(), r.denom());
    let (sn, sd) = (n.sqrt(), d.sqrt());
    (&sn * &sn == *n && &sd * &sd == *d).then(|| Rat::new(sn, sd))
}

/// Classical invariant dimension in degree `d` as the common fixed space of group points.
pub fn classical_invariants_by_group_points(gc: &GradedQuotient, points: &[QMatrix], d: usize) -> Result<usize, CenterError> {
    let alpha = &gc.alphabet;
    let basis = gc.complement_words(d);
    let images: Vec<Vec<SparseVec>> = points
        .par_iter()
        .map(|g| {
            let ginv = g.inverse().expect("group point is invertible");
            let subs: Vec<NCPoly> = alpha.letters().into_iter().map(|l| conjugation_on_letter(alpha, g, &ginv, l)).collect();
            let letter_pos = |l: Letter| alpha.letters().iter().position(|&x| x == l).unwrap();
            basis
                .iter()
                .map(|w| {
                    let mut p = NCPoly::one();
                    for &l in w.letters() {
                        p = &p * &subs[letter_pos(l)];
                    }
                    let p = &p - &NCPoly::word(w.clone());
                    gc.coords(&p, d).unwrap()
                })
                .collect()
        })
        .collect();
    Ok(kernel_dim_of_maps(basis.len(), &images))
}

/// Center dimensions of `gq` up to `d_max`, compared with both classical routes.
pub fn center_report(
    pres: &AlgebraPresentation,
    gq: &GradedQuotient,
    d_max: usize,
    seed: u64,
) -> Result<CenterReport, CenterError> {
    if d_max + 1 > gq.max_degree {
        return Err(CenterError::DegreeOverflow(d_max, d_max + 1));
    }
    let classical = qfun::presentation(pres.rdata.clone(), AlgebraKind::Classical, pres.group_model).map_err(other)?;
    let gc = classical.quotient(d_max);
    let points = group_points(&pres.rdata, 4, seed)?;
    let mut rows = Vec::new();
    let mut bases = Vec::new();
    for d in 0..=d_max {
        let basis = gq.centralizer_basis(d).map_err(other)?;
        let by_der = classical_invariants_by_derivations(&gc, &pres.rdata, d);
        let by_pts = classical_invariants_by_group_points(&gc, &points, d)?;
        rows.push(CenterRow {
            degree: d,
            dim: basis.len(),
            classical_by_derivations: by_der,
            classical_by_group_points: by_pts,
            matches: basis.len() == by_der && by_der == by_pts,
        });
        bases.push(basis);
    }
    let pairwise_commute = center_commutes(gq, &bases)?;
    let pass = pairwise_commute && rows.iter().all(|r| r.matches);
    Ok(CenterReport {
        kind: pres.kind.to_string(),
        model: pres.group_model.to_string(),
        rows,
        pairwise_commute,
        pass,
        bases,
    })
}

/// Whether all center basis products within the cap commute.
pub fn center_commutes(gq: &GradedQuotient, bases: &[Vec<NCPoly>]) -> Result<bool, CenterError> {
    for (d1, b1) in bases.iter().enumerate() {
        for (d2, b2) in bases.iter().enumerate().skip(d1) {
            if d1 + d2 > gq.max_degree || d1 == 0 {
                continue;
            }
            for x in b1 {
                for y in b2 {
                    let c = &(x * y) - &(y * x);
                    if !gq.normal_form(&c).map_err(other)?.is_zero() {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, Serialize)]
pub struct QuantumTrace {
    pub element: String,
    /// Diagonal weights `w_i` in `Σ w_i K^i_i`, or `None` if off-diagonal terms appear.
    pub weights: Option<Vec<String>>,
    pub square_is_central: bool,
    #[serde(skip)]
    pub poly: NCPoly,
}

/// The degree-1 central element of an RE quotient, normalized so `K^1_1` has coefficient 1.
pub fn quantum_trace(gq: &GradedQuotient) -> Result<QuantumTrace, CenterError> {
    let alpha = &gq.alphabet;
    let basis = gq.centralizer_basis(1).map_err(other)?;
    let matrix_only: Vec<NCPoly> = basis.into_iter().filter(|p| p.terms().all(|(w, _)| w.f_count() == 0)).collect();
    if matrix_only.len() != 1 {
        return Err(CenterError::TraceDimension(matrix_only.len()));
    }
    let z = &matrix_only[0];
    let lead = z.coeff(&Word::letter(alpha.gen(0, 0)));
    if lead.is_zero() {
        return Err(CenterError::Other("trace element misses K^1_1".into()));
    }
    let z = z.scale(&(&QFrac::one() / &lead));
    let lim = qfun::classical_limit(&z).map_err(other)?;
    let trace = NCPoly::from_terms((0..alpha.n).map(|i| (Word::letter(alpha.gen(i, i)), QFrac::one())));
    if lim != trace {
        return Err(CenterError::Other("trace element does not specialize to the trace".into()));
    }
    let diagonal = z.terms().all(|(w, _)| alpha.indices(w.letters()[0]).map_or(false, |(i, j)| i == j));
    let weights = diagonal.then(|| (0..alpha.n).map(|i| z.coeff(&Word::letter(alpha.gen(i, i))).to_string()).collect());
    let square_is_central = if gq.max_degree >= 3 { gq.is_central(&gq.normal_form(&(&z * &z)).map_err(other)?).map_err(other)? } else { false };
    Ok(QuantumTrace { element: z.display(alpha), weights, square_is_central, poly: z })
}

#[derive(Clone, Debug, Serialize)]
pub struct FreenessRow {
    pub degree: usize,
    pub dim_a: usize,
    pub dim_i: usize,
    pub dim_e: usize,
    /// `Σ_{i+j=d} dim I_i · dim E_j`.
    pub products: usize,
    pub rank: usize,
    /// Whether the degree-`d` part of `I` is central; `None` past the cap.
    pub i_central: Option<bool>,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct FreenessReport {
    pub generators: Vec<String>,
    pub rows: Vec<FreenessRow>,
    pub pass: bool,
}

impl FreenessReport {
    pub fn e_dims(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.dim_e).collect()
    }

    pub fn i_dims(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.dim_i).collect()
    }
}

/// Ordered monomials `g_{i1} ... g_{ik}` with `i1 ≤ ... ≤ ik` of total degree `d`.
fn monomials(gens: &[(NCPoly, usize)], d: usize) -> Vec<NCPoly> {
    fn go(gens: &[(NCPoly, usize)], start: usize, left: usize, acc: NCPoly, out: &mut Vec<NCPoly>) {
        if left == 0 {
            out.push(acc);
            return;
        }
        for k in start..gens.len() {
            let (g, dg) = &gens[k];
            if *dg <= left {
                go(gens, k, left - dg, &acc * g, out);
            }
        }
    }
    let mut out = Vec::new();
    go(gens, 0, d, NCPoly::one(), &mut out);
    out
}

/// Independent subset, in order, of a list of degree-`d` elements.
fn independent(gq: &GradedQuotient, d: usize, elems: Vec<NCPoly>) -> Result<Vec<SparseVec>, CenterError> {
    let mut e = Echelon::new(gq.dim(d));
    let mut out = Vec::new();
    for p in elems {
        let v = gq.coords(&p, d).map_err(other)?;
        if e.insert(&v) {
            out.push(v);
        }
    }
    Ok(out)
}

/// Decomposition `A_d = ⊕ I_i · E_{d-i}` over the subalgebra generated by `gens`.
pub fn freeness_report(gq: &GradedQuotient, gens: &[NCPoly], d_max: usize) -> Result<FreenessReport, CenterError> {
    if d_max > gq.max_degree {
        return Err(CenterError::DegreeOverflow(d_max, gq.max_degree));
    }
    let alpha = &gq.alphabet;
    let graded: Vec<(NCPoly, usize)> = gens
        .iter()
        .map(|g| g.degree().filter(|&d| d > 0).map(|d| (g.clone(), d)).ok_or_else(|| CenterError::Other("generator not homogeneous".into())))
        .collect::<Result<_, _>>()?;
    let mut i_basis: Vec<Vec<NCPoly>> = Vec::new();
    let mut e_basis: Vec<Vec<NCPoly>> = Vec::new();
    let mut rows = Vec::new();
    for d in 0..=d_max {
        let ivecs = independent(gq, d, monomials(&graded, d))?;
        i_basis.push(ivecs.iter().map(|v| gq.from_coords(d, v)).collect());
        // span of I_{>0} · E_{<d}
        let mut span = Echelon::new(gq.dim(d));
        for i in 1..=d {
            for z in &i_basis[i] {
                for e in &e_basis[d - i] {
                    span.insert(&gq.coords(&(z * e), d).map_err(other)?);
                }
            }
        }
        let e_d: Vec<NCPoly> = span.free_columns().into_iter().map(|p| NCPoly::word(gq.basis_word(d, p))).collect();
        e_basis.push(e_d);
        let mut all = Echelon::new(gq.dim(d));
        let mut products = 0;
        for i in 0..=d {
            for z in &i_basis[i] {
                for e in &e_basis[d - i] {
                    products += 1;
                    all.insert(&gq.coords(&(z * e), d).map_err(other)?);
                }
            }
        }
        let dim_a = gq.dim(d);
        let i_central = if d == 0 || d + 1 > gq.max_degree {
            None
        } else {
            let mut ok = true;
            for z in &i_basis[d] {
                ok &= gq.is_central(z).map_err(other)?;
            }
            Some(ok)
        };
        rows.push(FreenessRow {
            degree: d,
            dim_a,
            dim_i: i_basis[d].len(),
            dim_e: e_basis[d].len(),
            products,
            rank: all.rank(),
            i_central,
            pass: products == dim_a && all.rank() == dim_a && i_central.unwrap_or(true),
        });
    }
    let pass = rows.iter().all(|r| r.pass);
    Ok(FreenessReport { generators: gens.iter().map(|g| g.display(alpha)).collect(), rows, pass })
}

/// Sharp RE model of series A rank 1 with its center generators `{qtrace, f}`.
pub fn sl2_center_generators(gq_free: &GradedQuotient) -> Result<Vec<NCPoly>, CenterError> {
    let qt = quantum_trace(gq_free)?;
    Ok(vec![qt.poly, NCPoly::letter(F_LETTER)])
}

#[derive(Clone, Debug, Serialize)]
pub struct TransportedCenterRow {
    pub degree: usize,
    pub frt_center_dim: usize,
    pub re_center_dim: usize,
    /// Every transported FRT central element is central in the RE quotient.
    pub lands_in_center: bool,
    /// Transported span dimension equals the FRT center dimension.
    pub injective: bool,
    /// `Ω^{-1}(z·a) = Ω^{-1}(z)·Ω^{-1}(a)` for transported central `z` and generators `a`.
    pub products_agree: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TransportedCenterReport {
    pub rows: Vec<TransportedCenterRow>,
    pub pass: bool,
}

/// Transports the FRT center degreewise into the RE quotient.
pub fn transported_center_check(
    rdata: &Arc<RMatrixData>,
    gq_frt: &GradedQuotient,
    gq_re: &GradedQuotient,
    d_max: usize,
) -> Result<TransportedCenterReport, CenterError> {
    let gc: GeneratorCocycle = twistmod::generator_cocycle(rdata).map_err(other)?;
    let gens: Vec<NCPoly> = gq_frt.alphabet.matrix_letters().map(NCPoly::letter).collect();
    let mut rows = Vec::new();
    for d in 0..=d_max {
        let frt_basis = gq_frt.centralizer_basis(d).map_err(other)?;
        let re_dim = gq_re.centralizer_basis(d).map_err(other)?.len();
        let moved: Vec<NCPoly> = frt_basis.iter().map(|z| gc.transport_poly(z)).collect::<Result<_, _>>().map_err(other)?;
        let mut lands = true;
        for z in &moved {
            lands &= gq_re.is_central(z).map_err(other)?;
        }
        let rank = independent(gq_re, d, moved.clone())?.len();
        let products_agree = if d >= 1 && d < gq_re.max_degree && d < gq_frt.max_degree {
            let mut ok = true;
            for (z, zk) in frt_basis.iter().zip(&moved) {
                for a in &gens {
                    let lhs = gc.transport_poly(&gq_frt.normal_form(&(z * a)).map_err(other)?).map_err(other)?;
                    let rhs = zk * &gc.transport_poly(a).map_err(other)?;
                    ok &= gq_re.normal_form(&(&lhs - &rhs)).map_err(other)?.is_zero();
                }
            }
            Some(ok)
        } else {
            None
        };
        rows.push(TransportedCenterRow {
            degree: d,
            frt_center_dim: frt_basis.len(),
            re_center_dim: re_dim,
            lands_in_center: lands,
            injective: rank == frt_basis.len(),
            products_agree,
        });
    }
    let pass = rows.iter().all(|r| r.lands_in_center && r.injective && r.products_agree.unwrap_or(true));
    Ok(TransportedCenterReport { rows, pass })
}

/// Free RE quotient and its sharp model for series A rank 1 or 2.
pub fn free_and_sharp(rdata: &Arc<RMatrixData>, kind: AlgebraKind, d: usize) -> Result<(GradedQuotient, GradedQuotient), CenterError> {
    let free = qfun::presentation(rdata.clone(), kind, GroupModel::Free).map_err(other)?;
    let sharp = qfun::presentation(rdata.clone(), kind, GroupModel::Sharp).map_err(other)?;
    Ok((free.quotient(d), sharp.quotient(d)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rmat::{build_r, SeriesId};

    fn rd(s: Series, r: usize) -> Arc<RMatrixData> {
        Arc::new(build_r(SeriesId::new(s, r).unwrap()).unwrap())
    }

    #[test]
    fn sl2_re_center_dims() {
        let d = rd(Series::A, 1);
        let pres = qfun::presentation(d, AlgebraKind::Re, GroupModel::Free).unwrap();
        let gq = pres.quotient(5);
        let rep = center_report(&pres, &gq, 4, 3).unwrap();
        assert_eq!(rep.dims(), vec![1, 1, 2, 2, 3]);
        assert!(rep.pass, "{rep:?}");
    }

    #[test]
    fn sl2_frt_has_no_linear_center() {
        let d = rd(Series::A, 1);
        let pres = qfun::presentation(d, AlgebraKind::Frt, GroupModel::Free).unwrap();
        let gq = pres.quotient(2);
        assert!(gq.centralizer_basis(1).unwrap().is_empty());
    }

    #[test]
    fn sl2_quantum_trace_is_diagonal() {
        let d = rd(Series::A, 1);
        let pres = qfun::presentation(d, AlgebraKind::Re, GroupModel::Free).unwrap();
        let qt = quantum_trace(&pres.quotient(3)).unwrap();
        assert!(qt.weights.is_some());
        assert!(qt.square_is_central);
    }

    #[test]
    fn sl2_sharp_freeness() {
        let d = rd(Series::A, 1);
        let (free, sharp) = free_and_sharp(&d, AlgebraKind::Re, 4).unwrap();
        let gens = sl2_center_generators(&free).unwrap();
        let rep = freeness_report(&sharp, &gens, 4).unwrap();
        assert_eq!(rep.e_dims(), vec![1, 3, 5, 7, 9]);
        assert_eq!(rep.i_dims(), vec![1, 2, 3, 4, 5]);
        assert!(rep.pass);
        let a = sharp.alphabet.clone();
        let bad = vec![NCPoly::letter(a.gen(0, 1)), NCPoly::letter(F_LETTER)];
        let neg = freeness_report(&sharp, &bad, 3).unwrap();
        assert!(!neg.pass, "{neg:?}");
        // K^1_2 and f still form a regular sequence, so only centrality flags it
        assert!(neg.rows.iter().all(|r| r.rank == r.dim_a));
        assert_eq!(neg.rows[1].i_central, Some(false));
    }

    #[test]
    fn sl2_transported_center() {
        let d = rd(Series::A, 1);
        let frt = qfun::presentation(d.clone(), AlgebraKind::Frt, GroupModel::Free).unwrap().quotient(5);
        let re = qfun::presentation(d.clone(), AlgebraKind::Re, GroupModel::Free).unwrap().quotient(5);
        let rep = transported_center_check(&d, &frt, &re, 4).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert_eq!(rep.rows[2].frt_center_dim, 1);
    }
}
