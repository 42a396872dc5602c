use std::ops::{Add, Mul, Sub};

use super::elim::{Echelon, SparseVec};
use super::laurent::dense;
use super::{ExactError, QFrac, QScalar, Rat};

/// Dense rectangular matrix of Laurent polynomials.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<QScalar>,
}

/// Output of [`QMatrix::rref`].
#[derive(Clone, Debug)]
pub struct RrefResult {
    pub rank: usize,
    pub pivot_columns: Vec<usize>,
    /// Rows spanning the row space, denominators cleared.
    pub row_basis: QMatrix,
    /// Columns spanning the right kernel, denominators cleared.
    pub kernel_basis: QMatrix,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix { rows, cols, data: vec![QScalar::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, QScalar::one());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> QScalar) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        QMatrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<QScalar>>) -> Result<Self, ExactError> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return Err(ExactError::Shape("ragged rows".into()));
        }
        Ok(QMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &QScalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: QScalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn add_at(&mut self, i: usize, j: usize, v: &QScalar) {
        let e = &mut self.data[i * self.cols + j];
        *e += v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn nonzero_count(&self) -> usize {
        self.data.iter().filter(|x| !x.is_zero()).count()
    }

    /// Nonzero entries in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &QScalar)> {
        self.data
            .iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .map(move |(k, x)| (k / self.cols, k % self.cols, x))
    }

    pub fn map(&self, f: impl Fn(&QScalar) -> QScalar) -> Self {
        QMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn scale(&self, s: &QScalar) -> Self {
        self.map(|x| x * s)
    }

    pub fn try_mul(&self, o: &QMatrix) -> Result<QMatrix, ExactError> {
        if self.cols != o.rows {
            return Err(ExactError::Shape(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        let mut out = QMatrix::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if !b.is_zero() {
                        out.add_at(i, j, &(a * b));
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn kron(&self, o: &QMatrix) -> QMatrix {
        let mut out = QMatrix::zeros(self.rows * o.rows, self.cols * o.cols);
        for (i, j, a) in self.entries() {
            for (k, l, b) in o.entries() {
                out.set(i * o.rows + k, j * o.cols + l, a * b);
            }
        }
        out
    }

    pub fn evaluate_at(&self, q0: &Rat) -> Result<Vec<Vec<Rat>>, ExactError> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j).evaluate_at(q0)).collect())
            .collect()
    }

    pub fn derivative_at_one(&self) -> QMatrix {
        self.map(|x| QScalar::constant(x.derivative_at_one()))
    }

    fn sparse_rows(&self) -> Vec<SparseVec> {
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .filter(|&j| !self.get(i, j).is_zero())
                    .map(|j| (j, QFrac::from(self.get(i, j))))
                    .collect()
            })
            .collect()
    }

    pub fn rref(&self) -> RrefResult {
        let mut e = Echelon::new(self.cols);
        e.insert_many(self.sparse_rows());
        e.finish();
        let pivot_columns = e.pivot_columns();
        let row_basis: Vec<Vec<QScalar>> =
            e.rows().into_iter().map(|r| clear_denominators(&densify(r, self.cols))).collect();
        let kernel: Vec<Vec<QScalar>> =
            e.kernel().iter().map(|v| clear_denominators(&densify(v, self.cols))).collect();
        let rank = e.rank();
        let row_basis = if row_basis.is_empty() {
            QMatrix::zeros(0, self.cols)
        } else {
            QMatrix::from_rows(row_basis).unwrap()
        };
        let kernel_basis = if kernel.is_empty() {
            QMatrix::zeros(self.cols, 0)
        } else {
            QMatrix::from_rows(kernel).unwrap().transpose()
        };
        RrefResult { rank, pivot_columns, row_basis, kernel_basis }
    }

    pub fn rank(&self) -> usize {
        let mut e = Echelon::new(self.cols);
        e.insert_many(self.sparse_rows());
        e.rank()
    }

    /// Exact inverse; fails if singular or if the inverse leaves the Laurent ring.
    pub fn inverse(&self) -> Result<QMatrix, ExactError> {
        let inv = self.inverse_frac()?;
        let mut out = QMatrix::zeros(self.rows, self.cols);
        for (i, row) in inv.into_iter().enumerate() {
            for (j, x) in row.into_iter().enumerate() {
                match x.as_laurent() {
                    Some(s) => out.set(i, j, s.clone()),
                    None => return Err(ExactError::NotLaurent),
                }
            }
        }
        Ok(out)
    }

    /// Exact inverse over the fraction field.
    pub fn inverse_frac(&self) -> Result<Vec<Vec<QFrac>>, ExactError> {
        if !self.is_square() {
            return Err(ExactError::Shape("inverse of non-square matrix".into()));
        }
        let n = self.rows;
        let mut rows = self.sparse_rows();
        for (i, r) in rows.iter_mut().enumerate() {
            r.push((n + i, QFrac::one()));
        }
        let mut e = Echelon::new(2 * n);
        e.insert_many(rows);
        e.finish();
        if (0..n).any(|c| !e.is_pivot(c)) {
            return Err(ExactError::Singular);
        }
        let mut out = vec![vec![QFrac::zero(); n]; n];
        for (i, row) in out.iter_mut().enumerate() {
            for (c, x) in e.row_for(i).unwrap() {
                if *c >= n {
                    row[c - n] = x.clone();
                } else if *c != i {
                    return Err(ExactError::Singular);
                }
            }
        }
        Ok(out)
    }

    /// Determinant over the fraction field.
    pub fn det(&self) -> Result<QFrac, ExactError> {
        if !self.is_square() {
            return Err(ExactError::Shape("determinant of non-square matrix".into()));
        }
        let n = self.rows;
        let mut a: Vec<Vec<QFrac>> =
            (0..n).map(|i| (0..n).map(|j| QFrac::from(self.get(i, j))).collect()).collect();
        let mut det = QFrac::one();
        for c in 0..n {
            let p = (c..n)
                .filter(|&r| !a[r][c].is_zero())
                .min_by_key(|&r| a[r][c].weight());
            let Some(p) = p else { return Ok(QFrac::zero()) };
            if p != c {
                a.swap(p, c);
                det = -det;
            }
            let piv = a[c][c].clone();
            det = &det * &piv;
            for r in c + 1..n {
                if a[r][c].is_zero() {
                    continue;
                }
                let f = &a[r][c] / &piv;
                for k in c..n {
                    if !a[c][k].is_zero() {
                        let t = &f * &a[c][k];
                        a[r][k] = &a[r][k] - &t;
                    }
                }
            }
        }
        Ok(det)
    }
}

pub(crate) fn densify(v: &[(usize, QFrac)], n: usize) -> Vec<QFrac> {
    let mut out = vec![QFrac::zero(); n];
    for (c, x) in v {
        out[*c] = x.clone();
    }
    out
}

/// Multiplies by the least common denominator; result is Laurent.
pub fn clear_denominators(v: &[QFrac]) -> Vec<QScalar> {
    let mut l: dense::Poly = vec![Rat::from_integer(1.into())];
    for x in v {
        if x.is_laurent() {
            continue;
        }
        let (d, _) = dense::from_laurent(x.den());
        let g = dense::gcd(&l, &d);
        let (dq, _) = dense::divrem(&d, &g);
        l = poly_mul(&l, &dq);
    }
    let lq = QFrac::from(dense::to_laurent(&l, 0));
    v.iter()
        .map(|x| {
            let y = x * &lq;
            y.as_laurent().cloned().expect("common denominator clears all entries")
        })
        .collect()
}

fn poly_mul(a: &dense::Poly, b: &dense::Poly) -> dense::Poly {
    let mut out = vec![Rat::from_integer(0.into()); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

impl<'a> Mul<&'a QMatrix> for &'a QMatrix {
    type Output = QMatrix;
    fn mul(self, o: &QMatrix) -> QMatrix {
        self.try_mul(o).expect("matrix shape mismatch")
    }
}

impl<'a> Add<&'a QMatrix> for &'a QMatrix {
    type Output = QMatrix;
    fn add(self, o: &QMatrix) -> QMatrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols), "matrix shape mismatch");
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<'a> Sub<&'a QMatrix> for &'a QMatrix {
    type Output = QMatrix;
    fn sub(self, o: &QMatrix) -> QMatrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols), "matrix shape mismatch");
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect(),
        }
    }
}
