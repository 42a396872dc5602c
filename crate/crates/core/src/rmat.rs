//! Standard R-matrices of the basic representation for series A-D, the
//! invariant metric for B/C/D, and the classical parts `r`, `r_-`, `Omega`.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactalg::{rat, rat_int, Echelon, QFrac, QMatrix, QScalar, Rat};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Series {
    A,
    B,
    C,
    D,
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Series::A => "A",
            Series::B => "B",
            Series::C => "C",
            Series::D => "D",
        };
        write!(f, "{s}")
    }
}

impl FromStr for Series {
    type Err = RmatError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "A" | "a" => Ok(Series::A),
            "B" | "b" => Ok(Series::B),
            "C" | "c" => Ok(Series::C),
            "D" | "d" => Ok(Series::D),
            _ => Err(RmatError::Unsupported(format!("unknown series {s}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeriesId {
    pub series: Series,
    pub rank: usize,
    pub n: usize,
}

impl SeriesId {
    pub fn new(series: Series, rank: usize) -> Result<Self, RmatError> {
        let n = match (series, rank) {
            (_, 0) => return Err(RmatError::Unsupported("rank must be positive".into())),
            (Series::A, r) => r + 1,
            (Series::B, r) => 2 * r + 1,
            (Series::C, r) => 2 * r,
            (Series::D, 1) => {
                return Err(RmatError::Unsupported("D series needs rank at least 2".into()))
            }
            (Series::D, r) => 2 * r,
        };
        Ok(SeriesId { series, rank, n })
    }

    /// Conventional Lie algebra label, e.g. `sl(2)`.
    pub fn label(&self) -> String {
        match self.series {
            Series::A => format!("sl({})", self.n),
            Series::B | Series::D => format!("so({})", self.n),
            Series::C => format!("sp({})", self.n),
        }
    }

    /// Default degree cap for quotient computations.
    pub fn default_cap(&self) -> usize {
        if self.n <= 2 {
            4
        } else {
            3
        }
    }
}

#[derive(Debug, Error)]
pub enum RmatError {
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("shape error: {0}")]
    Shape(String),
    #[error("construction check failed: {0}")]
    CheckFailed(String),
}

#[derive(Clone, Debug)]
pub struct RMatrixData {
    pub id: SeriesId,
    pub r: QMatrix,
    pub r_inv: QMatrix,
    pub b_form: Option<QMatrix>,
    pub b_inv: Option<QMatrix>,
    pub r_classical: QMatrix,
    pub r_minus: QMatrix,
    pub omega_rep: QMatrix,
}

impl RMatrixData {
    pub fn n(&self) -> usize {
        self.id.n
    }

    /// `R_21 = P R P`.
    pub fn r21(&self) -> QMatrix {
        conj_flip(&self.r, self.id.n)
    }
}

/// Matrix unit `e_ij` of size `n`.
pub fn unit(n: usize, i: usize, j: usize) -> QMatrix {
    let mut m = QMatrix::zeros(n, n);
    m.set(i, j, QScalar::one());
    m
}

/// Leg-exchange permutation on `V ⊗ V`.
pub fn flip(n: usize) -> QMatrix {
    let mut p = QMatrix::zeros(n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            p.set(i * n + j, j * n + i, QScalar::one());
        }
    }
    p
}

/// `P M P` without forming products.
pub fn conj_flip(m: &QMatrix, n: usize) -> QMatrix {
    let sw = |x: usize| (x % n) * n + x / n;
    QMatrix::from_fn(n * n, n * n, |r, c| m.get(sw(r), sw(c)).clone())
}

/// Embeds an operator on legs `(a, b)` of `V^{⊗2}` into `V^{⊗nlegs}`.
pub fn embed_legs(n: usize, nlegs: usize, m: &QMatrix, a: usize, b: usize) -> QMatrix {
    let dim = n.pow(nlegs as u32);
    let stride = |t: usize| n.pow((nlegs - 1 - t) as u32);
    let (sa, sb) = (stride(a), stride(b));
    let mut out = QMatrix::zeros(dim, dim);
    for row in 0..dim {
        let ra = (row / sa) % n;
        let rb = (row / sb) % n;
        let base = row - ra * sa - rb * sb;
        for ca in 0..n {
            for cb in 0..n {
                let v = m.get(ra * n + rb, ca * n + cb);
                if !v.is_zero() {
                    out.add_at(row, base + ca * sa + cb * sb, v);
                }
            }
        }
    }
    out
}

fn perfect_root(m: &QMatrix) -> Result<usize, RmatError> {
    if !m.is_square() {
        return Err(RmatError::Shape("matrix is not square".into()));
    }
    let d = m.rows();
    let n = (d as f64).sqrt().round() as usize;
    if n * n != d {
        return Err(RmatError::Shape(format!("size {d} is not a perfect square")));
    }
    Ok(n)
}

/// `R12 R13 R23 == R23 R13 R12`.
pub fn check_qybe(r: &QMatrix) -> Result<bool, RmatError> {
    let n = perfect_root(r)?;
    let r12 = embed_legs(n, 3, r, 0, 1);
    let r13 = embed_legs(n, 3, r, 0, 2);
    let r23 = embed_legs(n, 3, r, 1, 2);
    Ok(&(&r12 * &r13) * &r23 == &(&r23 * &r13) * &r12)
}

/// `[r12, r13] + [r12, r23] + [r13, r23] == 0`.
pub fn check_cybe(r: &QMatrix) -> Result<bool, RmatError> {
    let n = perfect_root(r)?;
    let r12 = embed_legs(n, 3, r, 0, 1);
    let r13 = embed_legs(n, 3, r, 0, 2);
    let r23 = embed_legs(n, 3, r, 1, 2);
    let br = |a: &QMatrix, b: &QMatrix| &(a * b) - &(b * a);
    let total = &(&br(&r12, &r13) + &br(&r12, &r23)) + &br(&r13, &r23);
    Ok(total.is_zero())
}

/// `(R̂ - q)(R̂ + q^{-1}) == 0` with `R̂ = P R`.
pub fn check_hecke(r: &QMatrix) -> Result<bool, RmatError> {
    let n = perfect_root(r)?;
    let rh = &flip(n) * r;
    let id = QMatrix::identity(n * n);
    let a = &rh - &id.scale(&QScalar::q());
    let b = &rh + &id.scale(&QScalar::q_pow(-1));
    Ok((&a * &b).is_zero())
}

fn r_series_a(n: usize) -> QMatrix {
    let mut r = QMatrix::zeros(n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                r.add_at(i * n + i, i * n + i, &QScalar::q());
            } else {
                r.add_at(i * n + j, i * n + j, &QScalar::one());
            }
            if i < j {
                // e_ij ⊗ e_ji
                r.add_at(i * n + j, j * n + i, &QScalar::q_minus_qinv());
            }
        }
    }
    r
}

/// Twice the Weyl vector weights, a half-weight shift for the middle index of B,
/// and the sign vector distinguishing symplectic from orthogonal.
fn bcd_weights(series: Series, rank: usize, n: usize) -> (Vec<i32>, Vec<i32>, Vec<i32>) {
    let r = rank as i32;
    let mut rho2 = vec![0i32; n];
    let mut s2 = vec![0i32; n];
    let mut eps = vec![1i32; n];
    for i in 0..rank {
        let ii = i as i32;
        let w = match series {
            Series::B => 2 * r - 2 * ii - 1,
            Series::D => 2 * (r - 1 - ii),
            Series::C => 2 * (r - ii),
            Series::A => unreachable!(),
        };
        rho2[i] = w;
        rho2[n - 1 - i] = -w;
    }
    if series == Series::B {
        s2[rank] = 1;
    }
    if series == Series::C {
        for e in eps.iter_mut().skip(rank) {
            *e = -1;
        }
    }
    (rho2, s2, eps)
}

fn r_series_bcd(series: Series, rank: usize, n: usize) -> QMatrix {
    let (rho2, s2, eps) = bcd_weights(series, rank, n);
    let pr = |i: usize| n - 1 - i;
    let mut r = QMatrix::zeros(n * n, n * n);
    // index of e_ab ⊗ e_cd is (a*n + c, b*n + d)
    let mut add = |a: usize, b: usize, c: usize, d: usize, v: QScalar| {
        r.add_at(a * n + c, b * n + d, &v);
    };
    for i in 0..n {
        for j in 0..n {
            if i == j && i != pr(i) {
                add(i, i, i, i, QScalar::q());
            }
            if i == j && i == pr(i) {
                add(i, i, i, i, QScalar::one());
            }
            if i != j && i != pr(j) {
                add(i, i, j, j, QScalar::one());
            }
            if i != pr(i) && j == pr(i) {
                add(j, j, i, i, QScalar::q_pow(-1));
            }
            if i > j {
                add(i, j, j, i, QScalar::q_minus_qinv());
                let e2 = rho2[i] - rho2[j] + s2[i] - s2[j];
                assert!(e2 % 2 == 0, "non-integral exponent");
                let sign = (eps[i] * eps[j]) as i64;
                let v = &QScalar::q_minus_qinv() * &QScalar::monomial(rat_int(-sign), e2 / 2);
                add(i, j, pr(i), pr(j), v);
            }
        }
    }
    conj_flip(&r, n)
}

/// Singlet eigenvalue of `R̂` on `V ⊗ V`.
fn singlet_eigenvalue(id: &SeriesId) -> QScalar {
    let n = id.n as i32;
    match id.series {
        Series::C => QScalar::monomial(rat_int(-1), -1 - n),
        _ => QScalar::q_pow(1 - n),
    }
}

/// Metric from the singlet eigenvector of `R̂ = P R`, normalized so the
/// first nonzero entry is one.
pub fn build_b(id: &SeriesId) -> Result<QMatrix, RmatError> {
    if id.series == Series::A {
        return Err(RmatError::Unsupported("metric form requested for series A".into()));
    }
    let n = id.n;
    let r = r_series_bcd(id.series, id.rank, n);
    let lam = singlet_eigenvalue(id);
    let rh = &flip(n) * &r;
    let m = &rh - &QMatrix::identity(n * n).scale(&lam);
    let mut e = Echelon::new(n * n);
    for i in 0..n * n {
        let row: Vec<(usize, QFrac)> = (0..n * n)
            .filter(|&j| !m.get(i, j).is_zero())
            .map(|j| (j, QFrac::from(m.get(i, j))))
            .collect();
        e.insert(&row);
    }
    let ker = e.kernel();
    if ker.len() != 1 {
        return Err(RmatError::CheckFailed(format!("singlet space has dimension {}", ker.len())));
    }
    let v = &ker[0];
    let lead = v[0].1.clone();
    let mut b = QMatrix::zeros(n, n);
    for (c, x) in v {
        let y = x / &lead;
        let s = y.as_laurent().ok_or_else(|| RmatError::CheckFailed("metric not Laurent".into()))?;
        b.set(c / n, c % n, s.clone());
    }
    Ok(b)
}

pub fn build_r(id: SeriesId) -> Result<RMatrixData, RmatError> {
    let n = id.n;
    let r = match id.series {
        Series::A => r_series_a(n),
        s => r_series_bcd(s, id.rank, n),
    };
    let r_inv = r.inverse().map_err(|e| RmatError::CheckFailed(format!("R inverse: {e}")))?;
    let (b_form, b_inv) = if id.series == Series::A {
        (None, None)
    } else {
        let b = build_b(&id)?;
        let bi = b.inverse().map_err(|e| RmatError::CheckFailed(format!("B inverse: {e}")))?;
        (Some(b), Some(bi))
    };
    let half = rat(1, 2);
    let r_classical = r.map(|x| QScalar::constant(x.derivative_at_one() * &half));
    let rf = conj_flip(&r_classical, n);
    let r_minus = (&r_classical - &rf).scale(&QScalar::constant(half.clone()));
    let omega_rep = (&r_classical + &rf).scale(&QScalar::constant(half));
    let data = RMatrixData { id, r, r_inv, b_form, b_inv, r_classical, r_minus, omega_rep };
    verify(&data)?;
    Ok(data)
}

fn verify(d: &RMatrixData) -> Result<(), RmatError> {
    let n = d.id.n;
    let fail = |m: &str| Err(RmatError::CheckFailed(format!("{}: {m}", d.id.label())));
    let one = Rat::one();
    let at1 = d.r.evaluate_at(&one).map_err(|e| RmatError::CheckFailed(e.to_string()))?;
    for (i, row) in at1.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            let want = if i == j { Rat::one() } else { Rat::zero() };
            if *x != want {
                return fail("R(1) is not the identity");
            }
        }
    }
    if !check_qybe(&d.r)? {
        return fail("QYBE");
    }
    if !check_cybe(&d.r_classical)? {
        return fail("classical Yang-Baxter");
    }
    if d.id.series == Series::A && !check_hecke(&d.r)? {
        return fail("Hecke relation");
    }
    if conj_flip(&d.omega_rep, n) != d.omega_rep {
        return fail("Omega not flip invariant");
    }
    if conj_flip(&d.r_minus, n) != d.r_minus.scale(&QScalar::from_int(-1)) {
        return fail("r_minus not flip anti-invariant");
    }
    if let (Some(b), Some(bi)) = (&d.b_form, &d.b_inv) {
        if &(b * bi) != &QMatrix::identity(n) {
            return fail("B B^-1 != 1");
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn id(s: Series, r: usize) -> SeriesId {
        SeriesId::new(s, r).unwrap()
    }

    #[test]
    fn sl2_has_six_entries() {
        let d = build_r(id(Series::A, 1)).unwrap();
        assert_eq!(d.r.nonzero_count(), 5);
        let terms: usize = d.r.entries().map(|(_, _, x)| x.term_count()).sum();
        assert_eq!(terms, 6);
        assert_eq!(d.r.get(1, 2), &QScalar::q_minus_qinv());
    }

    #[test]
    fn identity_satisfies_qybe() {
        assert!(check_qybe(&QMatrix::identity(4)).unwrap());
        assert!(check_cybe(&QMatrix::zeros(4, 4)).unwrap());
    }

    #[test]
    fn broken_sl2_fails_qybe() {
        let mut r = r_series_a(2);
        r.set(1, 2, QScalar::one());
        assert!(!check_qybe(&r).unwrap());
    }

    #[test]
    fn doubled_skew_part_fails_cybe() {
        let d = build_r(id(Series::A, 1)).unwrap();
        let r2 = &d.r_classical + &d.r_minus;
        assert!(!check_cybe(&r2).unwrap());
    }

    #[test]
    fn non_square_rejected() {
        assert!(check_qybe(&QMatrix::zeros(3, 3)).is_err());
    }

    #[test]
    fn metric_symmetry_class() {
        let one = Rat::one();
        for (s, r, sign) in [(Series::B, 1, 1), (Series::C, 1, -1), (Series::C, 2, -1), (Series::D, 2, 1)] {
            let d = build_r(id(s, r)).unwrap();
            let b = d.b_form.unwrap().evaluate_at(&one).unwrap();
            let n = d.id.n;
            for i in 0..n {
                for j in 0..n {
                    assert_eq!(b[i][j], &b[j][i] * rat_int(sign), "{s}{r}");
                    let anti = i + j == n - 1;
                    assert_eq!(b[i][j].is_zero(), !anti, "{s}{r} antidiagonal");
                }
            }
        }
    }

    #[test]
    fn b_on_series_a_is_error() {
        assert!(build_b(&id(Series::A, 1)).is_err());
    }

    #[test]
    fn d_rank_one_rejected() {
        assert!(SeriesId::new(Series::D, 1).is_err());
    }
}
