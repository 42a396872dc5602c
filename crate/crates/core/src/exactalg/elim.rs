use std::collections::BTreeMap;

use rayon::prelude::*;

use super::QFrac;

/// Sparse vector over the fraction field, sorted by column, no zeros stored.
pub type SparseVec = Vec<(usize, QFrac)>;

/// Incremental row echelon form over `Q(q)`.
///
/// Every stored row starts with its pivot column at coefficient one.
/// Pivots are leftmost nonzero columns, so after [`Echelon::finish`] the
/// row set is the unique reduced row echelon basis of the span.
#[derive(Clone, Debug)]
pub struct Echelon {
    ncols: usize,
    rows: Vec<SparseVec>,
    pivot_row: Vec<Option<usize>>,
    finished: bool,
}

impl Echelon {
    pub fn new(ncols: usize) -> Self {
        Echelon { ncols, rows: Vec::new(), pivot_row: vec![None; ncols], finished: true }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_pivot(&self, col: usize) -> bool {
        self.pivot_row[col].is_some()
    }

    /// Row with pivot at `col`, if any.
    pub fn row_for(&self, col: usize) -> Option<&SparseVec> {
        self.pivot_row[col].map(|r| &self.rows[r])
    }

    pub fn pivot_columns(&self) -> Vec<usize> {
        (0..self.ncols).filter(|&c| self.pivot_row[c].is_some()).collect()
    }

    pub fn free_columns(&self) -> Vec<usize> {
        (0..self.ncols).filter(|&c| self.pivot_row[c].is_none()).collect()
    }

    /// Rows ordered by pivot column.
    pub fn rows(&self) -> Vec<&SparseVec> {
        self.pivot_row.iter().flatten().map(|&r| &self.rows[r]).collect()
    }

    /// Eliminates every pivot column from `v`.
    pub fn reduce(&self, v: &[(usize, QFrac)]) -> SparseVec {
        let mut acc: BTreeMap<usize, QFrac> = v.iter().cloned().collect();
        let mut cursor = 0usize;
        loop {
            let next = acc.range(cursor..).next().map(|(c, _)| *c);
            let Some(c) = next else { break };
            cursor = c + 1;
            let Some(r) = self.pivot_row[c] else { continue };
            let coef = acc.remove(&c).unwrap();
            for (col, val) in &self.rows[r][1..] {
                let t = &coef * val;
                match acc.get_mut(col) {
                    Some(e) => {
                        *e = &*e - &t;
                        if e.is_zero() {
                            acc.remove(col);
                        }
                    }
                    None => {
                        acc.insert(*col, -t);
                    }
                }
            }
        }
        acc.into_iter().collect()
    }

    /// Adds an already-reduced nonzero vector as a new pivot row.
    fn push_reduced(&mut self, v: SparseVec) {
        let (p, lead) = (v[0].0, v[0].1.clone());
        let row: SparseVec = if lead.is_one() {
            v
        } else {
            v.into_iter().map(|(c, x)| (c, &x / &lead)).collect()
        };
        self.pivot_row[p] = Some(self.rows.len());
        self.rows.push(row);
        self.finished = false;
    }

    /// Adds a row whose leading column is not yet a pivot, without reducing it.
    pub fn push_echelon_row(&mut self, v: SparseVec) {
        assert!(!v.is_empty() && !self.is_pivot(v[0].0), "row must open a new pivot");
        self.push_reduced(v);
    }

    /// Inserts one vector; returns whether it enlarged the span.
    pub fn insert(&mut self, v: &[(usize, QFrac)]) -> bool {
        let r = self.reduce(v);
        if r.is_empty() {
            false
        } else {
            self.push_reduced(r);
            true
        }
    }

    /// Inserts many vectors, reducing chunks in parallel against the current rows.
    pub fn insert_many(&mut self, vs: Vec<SparseVec>) {
        const CHUNK: usize = 256;
        for chunk in vs.chunks(CHUNK) {
            let pre: Vec<SparseVec> = chunk.par_iter().map(|v| self.reduce(v)).collect();
            for v in pre {
                if v.is_empty() {
                    continue;
                }
                let r = self.reduce(&v);
                if !r.is_empty() {
                    self.push_reduced(r);
                }
            }
        }
    }

    /// Back-substitutes so that pivot columns vanish outside their own row.
    pub fn finish(&mut self) {
        if self.finished {
            return;
        }
        let order: Vec<usize> = (0..self.ncols).rev().filter(|&c| self.pivot_row[c].is_some()).collect();
        for p in order {
            let r = self.pivot_row[p].unwrap();
            let tail = &self.rows[r][1..];
            if tail.iter().all(|(c, _)| self.pivot_row[*c].is_none()) {
                continue;
            }
            let mut reduced = self.reduce(tail);
            reduced.insert(0, (p, QFrac::one()));
            self.rows[r] = reduced;
        }
        self.finished = true;
    }

    pub fn is_finished(&self) -> bool {
        self.finished
    }

    /// Basis of the right kernel of the row span, one vector per free column.
    pub fn kernel(&mut self) -> Vec<SparseVec> {
        self.finish();
        let mut cols: Vec<Vec<(usize, QFrac)>> = vec![Vec::new(); self.ncols];
        for row in self.rows() {
            let p = row[0].0;
            for (c, x) in &row[1..] {
                cols[*c].push((p, -x));
            }
        }
        let mut out = Vec::new();
        for j in self.free_columns() {
            let mut v = std::mem::take(&mut cols[j]);
            v.push((j, QFrac::one()));
            v.sort_by_key(|e| e.0);
            out.push(v);
        }
        out
    }
}

/// Span equality of two row sets with the given column count.
pub fn same_span(a: &[SparseVec], b: &[SparseVec], ncols: usize) -> bool {
    let mut ea = Echelon::new(ncols);
    ea.insert_many(a.to_vec());
    let mut eb = Echelon::new(ncols);
    eb.insert_many(b.to_vec());
    if ea.rank() != eb.rank() {
        return false;
    }
    ea.finish();
    eb.finish();
    ea.rows() == eb.rows()
}

/// Rank of a list of sparse vectors.
pub fn rank_of(vs: &[SparseVec], ncols: usize) -> usize {
    let mut e = Echelon::new(ncols);
    e.insert_many(vs.to_vec());
    e.rank()
}
