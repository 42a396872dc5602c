//! Classical Poisson brackets on matrix coordinates.
//!
//! Coordinates `x^i_j` are indexed `i*N + j`. Left-invariant fields act by
//! `X -> X·ξ`, right-invariant fields by `X -> ξ·X`, adjoint fields by their
//! difference. A bivector `Σ c·ξ ⊗ η` evaluates as `{φ, ψ} = Σ c·(ξφ)(ηψ)`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::exactalg::{QFrac, QMatrix, QScalar, Rat};
use crate::freenc::{Alphabet, GradedQuotient, NCPoly, Word};
use crate::qfun::{AlgebraKind, AlgebraPresentation};
use crate::rmat::{conj_flip, RMatrixData, Series};

#[derive(Debug, Error)]
pub enum PoissonError {
    #[error("presentation and bracket kinds do not pair")]
    Mismatch,
    #[error("normal form does not specialize at q = 1: {0}")]
    Specialization(String),
    #[error("no variety point found after {0} attempts")]
    NoPoint(usize),
    #[error("{0}")]
    Other(String),
}

/// Commutative polynomial over `Q` in a fixed number of variables.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CPoly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Rat>,
}

impl CPoly {
    pub fn zero(nvars: usize) -> Self {
        CPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Rat) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn var(nvars: usize, v: usize) -> Self {
        let mut e = vec![0; nvars];
        e[v] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(e, Rat::one());
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn add_term(&mut self, e: Vec<u32>, c: Rat) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(x) => {
                *x += c;
                if x.is_zero() {
                    self.terms.remove(&e);
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Rat)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree of every term, if homogeneous.
    pub fn degree(&self) -> Option<u32> {
        let mut it = self.terms.keys().map(|e| e.iter().sum::<u32>());
        let d = it.next()?;
        it.all(|x| x == d).then_some(d)
    }

    pub fn scale(&self, c: &Rat) -> Self {
        let mut p = Self::zero(self.nvars);
        for (e, x) in &self.terms {
            p.add_term(e.clone(), x * c);
        }
        p
    }

    pub fn derivative(&self, v: usize) -> Self {
        let mut p = Self::zero(self.nvars);
        for (e, x) in &self.terms {
            if e[v] > 0 {
                let mut e2 = e.clone();
                e2[v] -= 1;
                p.add_term(e2, x * Rat::from_integer(e[v].into()));
            }
        }
        p
    }

    pub fn evaluate(&self, point: &[Rat]) -> Rat {
        self.terms
            .iter()
            .map(|(e, c)| {
                e.iter().enumerate().fold(c.clone(), |acc, (v, &k)| acc * num_traits::pow(point[v].clone(), k as usize))
            })
            .fold(Rat::zero(), |a, b| a + b)
    }

    /// The commutative monomials as sorted words in a matrix alphabet.
    /// Replaces each variable `v` by `images[v]`.
    pub fn substitute(&self, images: &[CPoly]) -> CPoly {
        let nv = images.first().map_or(self.nvars, |p| p.nvars);
        let mut out = CPoly::zero(nv);
        for (e, c) in self.terms() {
            let mut t = CPoly::constant(nv, c.clone());
            for (v, &k) in e.iter().enumerate() {
                for _ in 0..k {
                    t = &t * &images[v];
                }
            }
            out = &out + &t;
        }
        out
    }

    pub fn to_ncpoly(&self, alpha: &Alphabet) -> NCPoly {
        let n = alpha.n;
        NCPoly::from_terms(self.terms.iter().map(|(e, c)| {
            let letters = e
                .iter()
                .enumerate()
                .flat_map(|(v, &k)| std::iter::repeat(alpha.gen(v / n, v % n)).take(k as usize))
                .collect();
            (Word::new(letters).sorted(), QFrac::from(QScalar::constant(c.clone())))
        }))
    }

    /// `[[exponents, "coefficient"], ...]`.
    pub fn to_json(&self) -> Value {
        Value::Array(self.terms.iter().map(|(e, c)| json!([e, c.to_string()])).collect())
    }
}

impl fmt::Display for CPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mono: Vec<String> = e
                    .iter()
                    .enumerate()
                    .filter(|(_, &k)| k > 0)
                    .map(|(v, &k)| if k == 1 { format!("x{v}") } else { format!("x{v}^{k}") })
                    .collect();
                format!("{}*{}", c, if mono.is_empty() { "1".into() } else { mono.join("*") })
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl<'a> Add<&'a CPoly> for &'a CPoly {
    type Output = CPoly;
    fn add(self, o: &CPoly) -> CPoly {
        let mut p = self.clone();
        for (e, c) in &o.terms {
            p.add_term(e.clone(), c.clone());
        }
        p
    }
}

impl<'a> Sub<&'a CPoly> for &'a CPoly {
    type Output = CPoly;
    fn sub(self, o: &CPoly) -> CPoly {
        let mut p = self.clone();
        for (e, c) in &o.terms {
            p.add_term(e.clone(), -c.clone());
        }
        p
    }
}

impl<'a> Mul<&'a CPoly> for &'a CPoly {
    type Output = CPoly;
    fn mul(self, o: &CPoly) -> CPoly {
        let mut p = CPoly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                p.add_term(e, c1 * c2);
            }
        }
        p
    }
}

impl Neg for &CPoly {
    type Output = CPoly;
    fn neg(self) -> CPoly {
        self.scale(&-Rat::one())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PoissonKind {
    Ds,
    Sts,
}

impl fmt::Display for PoissonKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PoissonKind::Ds => "DS",
            PoissonKind::Sts => "STS",
        })
    }
}

/// Bracket table on coordinate pairs.
#[derive(Clone, Debug)]
pub struct PoissonSpec {
    pub kind: PoissonKind,
    pub rdata: Arc<RMatrixData>,
    pub n: usize,
    table: Vec<CPoly>,
}

/// Constant `N²×N²` matrix at `q = 1` as rationals.
fn constant_matrix(m: &QMatrix) -> Vec<Vec<Rat>> {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| m.get(i, j).as_constant().expect("classical matrix is constant")).collect())
        .collect()
}

/// Square matrix of commutative polynomials.
#[derive(Clone, Debug)]
struct CMat {
    dim: usize,
    e: Vec<CPoly>,
}

impl CMat {
    fn constant(m: &[Vec<Rat>], nvars: usize) -> Self {
        let dim = m.len();
        let e = (0..dim * dim).map(|k| CPoly::constant(nvars, m[k / dim][k % dim].clone())).collect();
        CMat { dim, e }
    }

    /// `X ⊗ I` (`leg = 0`) or `I ⊗ X` (`leg = 1`) with `X = (x^i_j)`.
    fn coordinate_leg(n: usize, leg: usize) -> Self {
        let nv = n * n;
        let dim = nv;
        let mut e = vec![CPoly::zero(nv); dim * dim];
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let (row, col) = (a * n + b, c * n + d);
                        let p = match leg {
                            0 if b == d => CPoly::var(nv, a * n + c),
                            1 if a == c => CPoly::var(nv, b * n + d),
                            _ => continue,
                        };
                        e[row * dim + col] = p;
                    }
                }
            }
        }
        CMat { dim, e }
    }

    fn mul(&self, o: &CMat) -> CMat {
        let dim = self.dim;
        let e = (0..dim * dim)
            .into_par_iter()
            .map(|k| {
                let (i, j) = (k / dim, k % dim);
                let mut acc = CPoly::zero(self.e[0].nvars);
                for t in 0..dim {
                    let (a, b) = (&self.e[i * dim + t], &o.e[t * dim + j]);
                    if !a.is_zero() && !b.is_zero() {
                        acc = &acc + &(a * b);
                    }
                }
                acc
            })
            .collect();
        CMat { dim, e }
    }

    fn add(&self, o: &CMat) -> CMat {
        CMat { dim: self.dim, e: self.e.iter().zip(&o.e).map(|(a, b)| a + b).collect() }
    }

    fn sub(&self, o: &CMat) -> CMat {
        CMat { dim: self.dim, e: self.e.iter().zip(&o.e).map(|(a, b)| a - b).collect() }
    }
}

/// Reads `{x^i_j, x^k_l} = M_{(i,k),(j,l)}` off an `N²×N²` matrix.
fn table_from_matrix(m: &CMat, n: usize) -> Vec<CPoly> {
    let nv = n * n;
    let mut t = vec![CPoly::zero(nv); nv * nv];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    t[(i * n + j) * nv + (k * n + l)] = m.e[(i * n + k) * m.dim + (j * n + l)].clone();
                }
            }
        }
    }
    t
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Field {
    Left,
    Right,
    Adjoint,
}

/// `ξ x^i_j` for `ξ = e_ab`, as a polynomial.
fn field_on_coordinate(n: usize, field: Field, a: usize, b: usize, i: usize, j: usize) -> CPoly {
    let nv = n * n;
    let left = if b == j { CPoly::var(nv, i * n + a) } else { CPoly::zero(nv) };
    let right = if i == a { CPoly::var(nv, b * n + j) } else { CPoly::zero(nv) };
    match field {
        Field::Left => left,
        Field::Right => right,
        Field::Adjoint => &left - &right,
    }
}

/// Adds `sign · t^{f1,f2}` for a two-tensor `t = Σ t_{(a,c),(b,d)} e_ab ⊗ e_cd`.
fn add_bivector(table: &mut [CPoly], n: usize, t: &[Vec<Rat>], f1: Field, f2: Field, sign: &Rat) {
    let nv = n * n;
    let mut terms = Vec::new();
    for row in 0..nv {
        for col in 0..nv {
            let c = &t[row][col];
            if !c.is_zero() {
                let (a, cc) = (row / n, row % n);
                let (b, d) = (col / n, col % n);
                terms.push((a, b, cc, d, c * sign));
            }
        }
    }
    let contributions: Vec<(usize, CPoly)> = (0..nv * nv)
        .into_par_iter()
        .map(|k| {
            let (u, v) = (k / nv, k % nv);
            let mut acc = CPoly::zero(nv);
            for (a, b, c, d, coef) in &terms {
                let p1 = field_on_coordinate(n, f1, *a, *b, u / n, u % n);
                if p1.is_zero() {
                    continue;
                }
                let p2 = field_on_coordinate(n, f2, *c, *d, v / n, v % n);
                if p2.is_zero() {
                    continue;
                }
                acc = &acc + &(&p1 * &p2).scale(coef);
            }
            (k, acc)
        })
        .collect();
    for (k, p) in contributions {
        table[k] = &table[k] + &p;
    }
}

fn classical_parts(rdata: &RMatrixData) -> (Vec<Vec<Rat>>, Vec<Vec<Rat>>, Vec<Vec<Rat>>) {
    (
        constant_matrix(&rdata.r_classical),
        constant_matrix(&rdata.r_minus),
        constant_matrix(&rdata.omega_rep),
    )
}

impl PoissonSpec {
    pub fn nvars(&self) -> usize {
        self.n * self.n
    }

    pub fn entry(&self, u: usize, v: usize) -> &CPoly {
        &self.table[u * self.nvars() + v]
    }

    pub fn table(&self) -> &[CPoly] {
        &self.table
    }

    /// Leibniz extension to arbitrary polynomials.
    pub fn bracket(&self, f: &CPoly, g: &CPoly) -> CPoly {
        let nv = self.nvars();
        let df: Vec<CPoly> = (0..nv).map(|u| f.derivative(u)).collect();
        let dg: Vec<CPoly> = (0..nv).map(|v| g.derivative(v)).collect();
        let mut acc = CPoly::zero(nv);
        for u in 0..nv {
            if df[u].is_zero() {
                continue;
            }
            for v in 0..nv {
                if dg[v].is_zero() || self.entry(u, v).is_zero() {
                    continue;
                }
                acc = &acc + &(&(&df[u] * &dg[v]) * self.entry(u, v));
            }
        }
        acc
    }

    pub fn jacobiator(&self, f: &CPoly, g: &CPoly, h: &CPoly) -> CPoly {
        let a = self.bracket(f, &self.bracket(g, h));
        let b = self.bracket(g, &self.bracket(h, f));
        let c = self.bracket(h, &self.bracket(f, g));
        &(&a + &b) + &c
    }

    pub fn is_antisymmetric(&self) -> bool {
        let nv = self.nvars();
        (0..nv).all(|u| (0..nv).all(|v| self.entry(u, v) == &-self.entry(v, u)))
    }

    /// Jacobiators of all coordinate triples `u ≤ v ≤ w`.
    pub fn generator_jacobiators(&self) -> Vec<((usize, usize, usize), CPoly)> {
        let nv = self.nvars();
        let triples: Vec<(usize, usize, usize)> =
            (0..nv).flat_map(|u| (u..nv).flat_map(move |v| (v..nv).map(move |w| (u, v, w)))).collect();
        triples
            .into_par_iter()
            .map(|(u, v, w)| {
                let (x, y, z) = (CPoly::var(nv, u), CPoly::var(nv, v), CPoly::var(nv, w));
                ((u, v, w), self.jacobiator(&x, &y, &z))
            })
            .collect()
    }

    pub fn to_json(&self) -> Value {
        let n = self.n;
        let nv = self.nvars();
        let mut entries = serde_json::Map::new();
        for u in 0..nv {
            for v in 0..nv {
                let key = format!("({},{}),({},{})", u / n + 1, u % n + 1, v / n + 1, v % n + 1);
                entries.insert(key, self.entry(u, v).to_json());
            }
        }
        json!({ "kind": self.kind.to_string(), "series": self.rdata.id.label(), "entries": entries })
    }
}

/// DS table by expanding `r^{l,l} - r^{r,r}` on coordinates.
pub fn ds_bracket_table(rdata: &Arc<RMatrixData>) -> PoissonSpec {
    let n = rdata.n();
    let (r, _, _) = classical_parts(rdata);
    ds_from_r(rdata, &r, n)
}

fn ds_from_r(rdata: &Arc<RMatrixData>, r: &[Vec<Rat>], n: usize) -> PoissonSpec {
    let mut table = vec![CPoly::zero(n * n); n.pow(4)];
    add_bivector(&mut table, n, r, Field::Left, Field::Left, &Rat::one());
    add_bivector(&mut table, n, r, Field::Right, Field::Right, &-Rat::one());
    PoissonSpec { kind: PoissonKind::Ds, rdata: rdata.clone(), n, table }
}

/// DS table from the matrix form `{X1, X2} = X1 X2 r - r X1 X2`.
pub fn ds_bracket_matrix_form(rdata: &Arc<RMatrixData>) -> PoissonSpec {
    let n = rdata.n();
    let (r, _, _) = classical_parts(rdata);
    ds_matrix_from_r(rdata, &r, n)
}

fn ds_matrix_from_r(rdata: &Arc<RMatrixData>, r: &[Vec<Rat>], n: usize) -> PoissonSpec {
    let nv = n * n;
    let x1 = CMat::coordinate_leg(n, 0);
    let x2 = CMat::coordinate_leg(n, 1);
    let rm = CMat::constant(r, nv);
    let x12 = x1.mul(&x2);
    let m = x12.mul(&rm).sub(&rm.mul(&x12));
    PoissonSpec { kind: PoissonKind::Ds, rdata: rdata.clone(), n, table: table_from_matrix(&m, n) }
}

/// STS table by expanding `r₋^{ad,ad} + Ω^{r,l} - Ω^{l,r}` on coordinates.
pub fn sts_bracket_table(rdata: &Arc<RMatrixData>) -> PoissonSpec {
    let n = rdata.n();
    let (_, rm, om) = classical_parts(rdata);
    sts_from_parts(rdata, &rm, &om, n)
}

fn sts_from_parts(rdata: &Arc<RMatrixData>, rm: &[Vec<Rat>], om: &[Vec<Rat>], n: usize) -> PoissonSpec {
    let mut table = vec![CPoly::zero(n * n); n.pow(4)];
    add_bivector(&mut table, n, rm, Field::Adjoint, Field::Adjoint, &Rat::one());
    add_bivector(&mut table, n, om, Field::Right, Field::Left, &Rat::one());
    add_bivector(&mut table, n, om, Field::Left, Field::Right, &-Rat::one());
    PoissonSpec { kind: PoissonKind::Sts, rdata: rdata.clone(), n, table }
}

/// STS table from the matrix form
/// `X1X2 r₋ + r₋ X1X2 - X1 r₋ X2 - X2 r₋ X1 + X2 Ω X1 - X1 Ω X2`.
pub fn sts_bracket_matrix_form(rdata: &Arc<RMatrixData>) -> PoissonSpec {
    let n = rdata.n();
    let (_, rm, om) = classical_parts(rdata);
    sts_matrix_from_parts(rdata, &rm, &om, n)
}

fn sts_matrix_from_parts(rdata: &Arc<RMatrixData>, rm: &[Vec<Rat>], om: &[Vec<Rat>], n: usize) -> PoissonSpec {
    let nv = n * n;
    let x1 = CMat::coordinate_leg(n, 0);
    let x2 = CMat::coordinate_leg(n, 1);
    let r = CMat::constant(rm, nv);
    let o = CMat::constant(om, nv);
    let x12 = x1.mul(&x2);
    let m = x12
        .mul(&r)
        .add(&r.mul(&x12))
        .sub(&x1.mul(&r).mul(&x2))
        .sub(&x2.mul(&r).mul(&x1))
        .add(&x2.mul(&o).mul(&x1))
        .sub(&x1.mul(&o).mul(&x2));
    PoissonSpec { kind: PoissonKind::Sts, rdata: rdata.clone(), n, table: table_from_matrix(&m, n) }
}

fn shift_by_identity(m: &[Vec<Rat>], lambda: &Rat) -> Vec<Vec<Rat>> {
    let mut out = m.to_vec();
    for (i, row) in out.iter_mut().enumerate() {
        row[i] += lambda.clone();
    }
    out
}

/// Tables computed after adding `λ·I⊗I` to `r` (DS) or to `Ω` (STS).
pub fn shifted_table(rdata: &Arc<RMatrixData>, kind: PoissonKind, lambda: &Rat) -> PoissonSpec {
    let n = rdata.n();
    let (r, rm, om) = classical_parts(rdata);
    match kind {
        PoissonKind::Ds => ds_from_r(rdata, &shift_by_identity(&r, lambda), n),
        PoissonKind::Sts => sts_from_parts(rdata, &rm, &shift_by_identity(&om, lambda), n),
    }
}

pub fn bracket_table(rdata: &Arc<RMatrixData>, kind: PoissonKind) -> PoissonSpec {
    match kind {
        PoissonKind::Ds => ds_bracket_table(rdata),
        PoissonKind::Sts => sts_bracket_table(rdata),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct JacobiReport {
    pub kind: PoissonKind,
    pub series: String,
    pub mode: String,
    pub triples: usize,
    pub points: usize,
    pub nonzero: usize,
    /// Off-variety negative control: whether some jacobiator is nonzero at a generic point.
    pub off_variety_nonzero: Option<bool>,
    /// Every generator jacobiator vanishes as a polynomial.
    pub identically_zero: bool,
    pub pass: bool,
}

/// Classical metric `B₀` at `q = 1`.
fn classical_metric(rdata: &RMatrixData) -> Option<QMatrix> {
    rdata.b_form.as_ref().map(|b| {
        QMatrix::from_fn(b.rows(), b.cols(), |i, j| QScalar::constant(b.get(i, j).evaluate_at(&Rat::one()).unwrap()))
    })
}

fn const_q(c: Rat) -> QScalar {
    QScalar::constant(c)
}

fn to_point(m: &QMatrix) -> Vec<Rat> {
    (0..m.rows())
        .flat_map(|i| (0..m.cols()).map(move |j| (i, j)))
        .map(|(i, j)| m.get(i, j).as_constant().unwrap())
        .collect()
}

/// Exact rational points `f·(1 - S)(1 + S)^{-1}` with `S = B₀ A`, `A`
/// antisymmetric for a symmetric metric and symmetric otherwise.
pub fn cayley_points(rdata: &RMatrixData, count: usize, seed: u64) -> Result<Vec<QMatrix>, PoissonError> {
    let n = rdata.n();
    let b0 = classical_metric(rdata).ok_or_else(|| PoissonError::Other("series A has no metric".into()))?;
    let b0inv = b0.inverse().map_err(|e| PoissonError::Other(e.to_string()))?;
    let symmetric = b0 == b0.transpose();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let id = QMatrix::identity(n);
    let mut out = Vec::new();
    let mut attempts = 0;
    while out.len() < count {
        attempts += 1;
        if attempts > 50 * count {
            return Err(PoissonError::NoPoint(attempts));
        }
        let mut a = QMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v: i64 = rng.gen_range(-3..=3);
                if i == j {
                    if !symmetric {
                        a.set(i, i, const_q(Rat::from_integer(v.into())));
                    }
                } else {
                    a.set(i, j, const_q(Rat::from_integer(v.into())));
                    let w = if symmetric { -v } else { v };
                    a.set(j, i, const_q(Rat::from_integer(w.into())));
                }
            }
        }
        let s = &b0 * &a;
        let Ok(inv) = (&id + &s).inverse() else { continue };
        let num: i64 = rng.gen_range(1..=5);
        let den: i64 = rng.gen_range(1..=3);
        let f = Rat::new(num.into(), den.into());
        let x = (&(&id - &s) * &inv).scale(&const_q(f.clone()));
        let lhs = &(&(&b0 * &x.transpose()) * &b0inv) * &x;
        if lhs != id.scale(&const_q(&f * &f)) {
            return Err(PoissonError::Other("Cayley point off the variety".into()));
        }
        out.push(x);
    }
    Ok(out)
}

/// Symbolic Jacobi for series A; exact sampled variety points otherwise.
pub fn jacobi_check_on_variety(spec: &PoissonSpec, points: usize, seed: u64) -> Result<JacobiReport, PoissonError> {
    let jac = spec.generator_jacobiators();
    let identically_zero = jac.iter().all(|(_, p)| p.is_zero());
    let series = spec.rdata.id.series;
    if series == Series::A {
        let nonzero = jac.iter().filter(|(_, p)| !p.is_zero()).count();
        return Ok(JacobiReport {
            kind: spec.kind,
            series: spec.rdata.id.label(),
            mode: "symbolic".into(),
            triples: jac.len(),
            points: 0,
            nonzero,
            off_variety_nonzero: None,
            identically_zero,
            pass: nonzero == 0,
        });
    }
    let pts = cayley_points(&spec.rdata, points, seed)?;
    let mut nonzero = 0;
    for x in &pts {
        let p = to_point(x);
        nonzero += jac.iter().filter(|(_, j)| !j.evaluate(&p).is_zero()).count();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let generic: Vec<Rat> = (0..spec.nvars()).map(|_| Rat::from_integer(rng.gen_range(-4i64..=4).into())).collect();
    let off = jac.iter().any(|(_, j)| !j.evaluate(&generic).is_zero());
    Ok(JacobiReport {
        kind: spec.kind,
        series: spec.rdata.id.label(),
        mode: "variety-points".into(),
        triples: jac.len(),
        points: pts.len(),
        nonzero,
        off_variety_nonzero: Some(off),
        identically_zero,
        pass: nonzero == 0 && (off || identically_zero),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct EquivarianceReport {
    pub points: usize,
    /// The `Ω^{r,l} - Ω^{l,r}` part commutes with every sampled conjugation.
    pub omega_part_invariant: bool,
    /// Whether the full STS table, `r₋` part included, is invariant as well.
    pub full_table_invariant: bool,
    pub pass: bool,
}

/// STS table without its `r₋` part.
pub fn sts_omega_part(rdata: &Arc<RMatrixData>) -> PoissonSpec {
    let n = rdata.n();
    let (_, _, om) = classical_parts(rdata);
    let zero = vec![vec![Rat::zero(); n * n]; n * n];
    sts_from_parts(rdata, &zero, &om, n)
}

/// `x^i_j -> (g X g^{-1})^i_j` as linear polynomials.
fn conjugation_images(g: &QMatrix) -> Result<Vec<CPoly>, PoissonError> {
    let n = g.rows();
    let nv = n * n;
    let gi = g.inverse().map_err(|e| PoissonError::Other(e.to_string()))?;
    let (g, gi) = (constant_matrix(g), constant_matrix(&gi));
    let mut out = Vec::with_capacity(nv);
    for i in 0..n {
        for j in 0..n {
            let mut p = CPoly::zero(nv);
            for a in 0..n {
                for b in 0..n {
                    let c = &g[i][a] * &gi[b][j];
                    if !c.is_zero() {
                        let mut e = vec![0; nv];
                        e[a * n + b] = 1;
                        p.add_term(e, c);
                    }
                }
            }
            out.push(p);
        }
    }
    Ok(out)
}

fn invariant_under(spec: &PoissonSpec, images: &[CPoly]) -> bool {
    let nv = spec.nvars();
    (0..nv * nv).into_par_iter().all(|k| {
        let (u, v) = (k / nv, k % nv);
        spec.bracket(&images[u], &images[v]) == spec.entry(u, v).substitute(images)
    })
}

/// Checks `{f∘c_g, h∘c_g} = {f, h}∘c_g` for conjugations `c_g` by the given group points.
pub fn conjugation_check(rdata: &Arc<RMatrixData>, points: &[QMatrix]) -> Result<EquivarianceReport, PoissonError> {
    let omega = sts_omega_part(rdata);
    let full = sts_bracket_table(rdata);
    let mut omega_ok = true;
    let mut full_ok = true;
    for g in points {
        let images = conjugation_images(g)?;
        omega_ok &= invariant_under(&omega, &images);
        full_ok &= invariant_under(&full, &images);
    }
    Ok(EquivarianceReport {
        points: points.len(),
        omega_part_invariant: omega_ok,
        full_table_invariant: full_ok,
        pass: omega_ok && !points.is_empty(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SemiclassicalReport {
    pub presentation: String,
    pub bracket: String,
    pub pairs: usize,
    pub constant: Option<String>,
    pub consistent: bool,
    pub pass: bool,
}

/// Degree-2 coordinates with respect to sorted classical monomials.
///
/// The classical complement words, sorted, give a basis of the classical
/// degree-2 slice; when they also span the quantum slice, coordinates in
/// that basis specialize cleanly at `q = 1`.
struct SortedBasis {
    words: Vec<Word>,
    /// `(M^T)^{-1}` where column `s` of `M^T` is the quantum normal form of word `s`.
    solve: Vec<Vec<(usize, QFrac)>>,
}

impl SortedBasis {
    fn new(gq: &GradedQuotient, gc: &GradedQuotient) -> Result<Self, PoissonError> {
        let mut words: Vec<Word> = gc.complement_words(2).into_iter().map(|w| w.sorted()).collect();
        words.sort();
        words.dedup();
        let k = gq.dim(2);
        if words.len() != k || gc.dim(2) != k {
            return Err(PoissonError::Specialization("degree-2 dimensions differ".into()));
        }
        let cols: Vec<Vec<(usize, QFrac)>> = words
            .iter()
            .map(|w| gq.coords(&NCPoly::word(w.clone()), 2))
            .collect::<Result<_, _>>()
            .map_err(|e| PoissonError::Other(e.to_string()))?;
        let mut rows: Vec<Vec<(usize, QFrac)>> = vec![Vec::new(); k];
        for (s, col) in cols.iter().enumerate() {
            for (j, x) in col {
                rows[*j].push((s, x.clone()));
            }
        }
        let mut e = crate::exactalg::Echelon::new(2 * k);
        let aug: Vec<Vec<(usize, QFrac)>> = rows
            .into_iter()
            .enumerate()
            .map(|(j, mut r)| {
                r.push((k + j, QFrac::one()));
                r
            })
            .collect();
        e.insert_many(aug);
        e.finish();
        if e.rank() != k || e.pivot_columns().iter().any(|&c| c >= k) {
            return Err(PoissonError::Specialization("sorted monomials do not span the quantum slice".into()));
        }
        let solve = e.rows().into_iter().map(|r| r[1..].iter().map(|(c, x)| (c - k, x.clone())).collect()).collect();
        Ok(SortedBasis { words, solve })
    }

    fn coordinates(&self, v: &[(usize, QFrac)]) -> Vec<QFrac> {
        let dense: BTreeMap<usize, &QFrac> = v.iter().map(|(j, x)| (*j, x)).collect();
        self.solve
            .iter()
            .map(|row| {
                row.iter().filter_map(|(j, x)| dense.get(j).map(|t| x * *t)).fold(QFrac::zero(), |a, b| &a + &b)
            })
            .collect()
    }
}

/// First-order part of `ab - ba`, as a classical element in the normal form of `gc`.
fn first_order_commutator(
    gq: &GradedQuotient,
    gc: &GradedQuotient,
    basis: &SortedBasis,
    a: &NCPoly,
    b: &NCPoly,
) -> Result<NCPoly, PoissonError> {
    let comm = &(a * b) - &(b * a);
    let v = gq.coords(&comm, 2).map_err(|e| PoissonError::Other(e.to_string()))?;
    let mut deriv = NCPoly::zero();
    for (w, c) in basis.words.iter().zip(basis.coordinates(&v)) {
        let c1 = c.evaluate_at(&Rat::one()).map_err(|e| PoissonError::Specialization(e.to_string()))?;
        if !c1.is_zero() {
            return Err(PoissonError::Specialization("commutator does not vanish at q = 1".into()));
        }
        let d1 = c.derivative_at_one().map_err(|e| PoissonError::Specialization(e.to_string()))?;
        deriv.add_term(w.clone(), QFrac::from(QScalar::constant(d1)));
    }
    gc.normal_form(&deriv).map_err(|e| PoissonError::Other(e.to_string()))
}

/// Finds the single `c` with `d/dq (ab - ba)|_{q=1} = c·{a, b}` for all generator pairs.
pub fn semiclassical_compare(
    pres: &AlgebraPresentation,
    gq: &GradedQuotient,
    gc: &GradedQuotient,
    spec: &PoissonSpec,
) -> Result<SemiclassicalReport, PoissonError> {
    let paired = matches!(
        (pres.kind, spec.kind),
        (AlgebraKind::Frt, PoissonKind::Ds) | (AlgebraKind::Re, PoissonKind::Sts)
    );
    if !paired {
        return Err(PoissonError::Mismatch);
    }
    let alpha = &pres.alphabet;
    let n = alpha.n;
    let nv = n * n;
    let pairs: Vec<(usize, usize)> = (0..nv).flat_map(|u| (0..nv).map(move |v| (u, v))).collect();
    let basis = SortedBasis::new(gq, gc)?;
    let results: Vec<Result<(NCPoly, NCPoly), PoissonError>> = pairs
        .par_iter()
        .map(|&(u, v)| {
            let a = NCPoly::letter(alpha.gen(u / n, u % n));
            let b = NCPoly::letter(alpha.gen(v / n, v % n));
            let lhs = first_order_commutator(gq, gc, &basis, &a, &b)?;
            let rhs = gc.normal_form(&spec.entry(u, v).to_ncpoly(alpha)).map_err(|e| PoissonError::Other(e.to_string()))?;
            Ok((lhs, rhs))
        })
        .collect();
    let mut constant: Option<QFrac> = None;
    let mut consistent = true;
    for r in results {
        let (lhs, rhs) = r?;
        if rhs.is_zero() {
            consistent &= lhs.is_zero();
            continue;
        }
        let (w, c) = rhs.terms().next().unwrap();
        let ratio = &lhs.coeff(w) / c;
        if lhs != rhs.scale(&ratio) {
            consistent = false;
            continue;
        }
        match &constant {
            None => constant = Some(ratio),
            Some(k) if *k == ratio => {}
            Some(_) => consistent = false,
        }
    }
    let constant_str = constant.as_ref().map(|c| c.as_laurent().map_or_else(|| c.to_string(), |s| s.to_string()));
    let pass = consistent && constant.as_ref().map_or(false, |c| !c.is_zero());
    Ok(SemiclassicalReport {
        presentation: pres.kind.to_string(),
        bracket: spec.kind.to_string(),
        pairs: pairs.len(),
        constant: constant_str,
        consistent,
        pass,
    })
}

/// Whether `t` is invariant under the leg flip.
pub fn flip_invariant(m: &QMatrix, n: usize) -> bool {
    &conj_flip(m, n) == m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rmat::{build_r, SeriesId};

    fn rd(s: Series, r: usize) -> Arc<RMatrixData> {
        Arc::new(build_r(SeriesId::new(s, r).unwrap()).unwrap())
    }

    #[test]
    fn cpoly_leibniz() {
        let x = CPoly::var(2, 0);
        let y = CPoly::var(2, 1);
        let p = &(&x * &x) * &y;
        assert_eq!(p.derivative(0), (&x * &y).scale(&Rat::from_integer(2.into())));
        assert_eq!(p.evaluate(&[Rat::from_integer(2.into()), Rat::from_integer(3.into())]), Rat::from_integer(12.into()));
    }

    #[test]
    fn sl2_two_routes_agree() {
        let d = rd(Series::A, 1);
        let a = ds_bracket_table(&d);
        let b = ds_bracket_matrix_form(&d);
        assert_eq!(a.table, b.table);
        let a = sts_bracket_table(&d);
        let b = sts_bracket_matrix_form(&d);
        assert_eq!(a.table, b.table);
        assert!(a.is_antisymmetric());
    }

    #[test]
    fn central_shift_is_invisible() {
        let d = rd(Series::A, 1);
        let one = Rat::one();
        assert_eq!(shifted_table(&d, PoissonKind::Ds, &one).table, ds_bracket_table(&d).table);
        assert_eq!(shifted_table(&d, PoissonKind::Sts, &one).table, sts_bracket_table(&d).table);
    }

    #[test]
    fn sl2_jacobi_symbolic() {
        let d = rd(Series::A, 1);
        for kind in [PoissonKind::Ds, PoissonKind::Sts] {
            let rep = jacobi_check_on_variety(&bracket_table(&d, kind), 0, 1).unwrap();
            assert!(rep.pass, "{rep:?}");
        }
    }

    #[test]
    fn so3_sts_jacobi_on_points() {
        let d = rd(Series::B, 1);
        let rep = jacobi_check_on_variety(&sts_bracket_table(&d), 20, 7).unwrap();
        assert!(rep.pass, "{rep:?}");
    }

    #[test]
    fn omega_part_commutes_with_conjugation() {
        let a = rd(Series::A, 1);
        let g = QMatrix::from_rows(vec![
            vec![QScalar::from_int(2), QScalar::from_int(1)],
            vec![QScalar::from_int(1), QScalar::from_int(1)],
        ])
        .unwrap();
        let rep = conjugation_check(&a, &[g]).unwrap();
        assert!(rep.omega_part_invariant);
        assert!(!rep.full_table_invariant);
        let b = rd(Series::B, 1);
        let pts = cayley_points(&b, 2, 5).unwrap();
        assert!(conjugation_check(&b, &pts).unwrap().omega_part_invariant);
    }

    #[test]
    fn so3_off_variety_is_nonzero_and_sp2_vanishes_everywhere() {
        let b = jacobi_check_on_variety(&sts_bracket_table(&rd(Series::B, 1)), 20, 3).unwrap();
        assert_eq!(b.off_variety_nonzero, Some(true));
        assert!(!b.identically_zero);
        let c = jacobi_check_on_variety(&sts_bracket_table(&rd(Series::C, 1)), 20, 3).unwrap();
        assert_eq!(c.nonzero, 0);
        assert!(c.identically_zero);
    }

    #[test]
    fn constant_argument_has_zero_jacobiator() {
        let d = rd(Series::A, 1);
        let s = sts_bracket_table(&d);
        let c = CPoly::constant(4, Rat::one());
        assert!(s.jacobiator(&c, &CPoly::var(4, 0), &CPoly::var(4, 3)).is_zero());
    }

    fn semiclassical(s: Series, r: usize, kind: AlgebraKind) -> SemiclassicalReport {
        use crate::qfun::{presentation, GroupModel};
        let d = rd(s, r);
        let model = if s == Series::A { GroupModel::Free } else { GroupModel::Sharp };
        let pres = presentation(d.clone(), kind, model).unwrap();
        let cl = presentation(d.clone(), AlgebraKind::Classical, model).unwrap();
        let bk = if kind == AlgebraKind::Frt { PoissonKind::Ds } else { PoissonKind::Sts };
        semiclassical_compare(&pres, &pres.quotient(2), &cl.quotient(2), &bracket_table(&d, bk)).unwrap()
    }

    #[test]
    fn sl2_semiclassical_constant() {
        let a = semiclassical(Series::A, 1, AlgebraKind::Frt);
        let b = semiclassical(Series::A, 1, AlgebraKind::Re);
        assert!(a.pass && b.pass, "{a:?} {b:?}");
        assert_eq!(a.constant, b.constant);
        assert_eq!(a.constant.as_deref(), Some("2*q^0"));
    }

    #[test]
    fn so3_semiclassical_constant_matches() {
        let a = semiclassical(Series::B, 1, AlgebraKind::Frt);
        let b = semiclassical(Series::B, 1, AlgebraKind::Re);
        assert!(a.pass && b.pass);
        assert_eq!(a.constant.as_deref(), Some("2*q^0"));
        assert_eq!(b.constant.as_deref(), Some("2*q^0"));
    }
}
