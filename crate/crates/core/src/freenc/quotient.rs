use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;

use crate::exactalg::{Echelon, QFrac, SparseVec};

use super::{Alphabet, FreeError, NCPoly, Word};

const NONE: usize = usize::MAX;

/// Homogeneous relations, stored per degree as a reduced row basis.
#[derive(Clone, Debug)]
pub struct RelationSet {
    pub alphabet: Alphabet,
    by_degree: BTreeMap<usize, Vec<SparseVec>>,
}

impl RelationSet {
    pub fn empty(alphabet: Alphabet) -> Self {
        RelationSet { alphabet, by_degree: BTreeMap::new() }
    }

    pub fn new(alphabet: Alphabet, rels: &[NCPoly]) -> Result<Self, FreeError> {
        let mut s = Self::empty(alphabet);
        s.extend(rels)?;
        Ok(s)
    }

    /// Adds relations and re-reduces the affected degrees.
    pub fn extend(&mut self, rels: &[NCPoly]) -> Result<(), FreeError> {
        let mut grouped: BTreeMap<usize, Vec<SparseVec>> = BTreeMap::new();
        for r in rels {
            if r.is_zero() {
                continue;
            }
            let d = r.degree().ok_or(FreeError::Inhomogeneous)?;
            if d == 0 {
                return Err(FreeError::Inhomogeneous);
            }
            grouped.entry(d).or_default().push(r.to_sparse(&self.alphabet, d)?);
        }
        for (d, mut rows) in grouped {
            let ncols = self.alphabet.word_count(d);
            if let Some(old) = self.by_degree.remove(&d) {
                rows.extend(old);
            }
            let mut e = Echelon::new(ncols);
            e.insert_many(rows);
            e.finish();
            self.by_degree.insert(d, e.rows().into_iter().cloned().collect());
        }
        Ok(())
    }

    pub fn degrees(&self) -> impl Iterator<Item = usize> + '_ {
        self.by_degree.keys().copied()
    }

    pub fn rows(&self, d: usize) -> &[SparseVec] {
        self.by_degree.get(&d).map_or(&[], |v| v.as_slice())
    }

    /// Span dimension in degree `d`.
    pub fn count(&self, d: usize) -> usize {
        self.rows(d).len()
    }

    pub fn min_degree(&self) -> Option<usize> {
        self.by_degree.keys().next().copied()
    }

    pub fn relations(&self) -> Vec<NCPoly> {
        self.by_degree
            .iter()
            .flat_map(|(d, rows)| rows.iter().map(move |r| NCPoly::from_sparse(&self.alphabet, *d, r)))
            .collect()
    }

    pub fn relations_of_degree(&self, d: usize) -> Vec<NCPoly> {
        self.rows(d).iter().map(|r| NCPoly::from_sparse(&self.alphabet, d, r)).collect()
    }

    /// Row-space equality degree by degree.
    pub fn same_span(&self, o: &RelationSet) -> bool {
        self.by_degree == o.by_degree
    }
}

/// One degree of a quotient.
#[derive(Clone, Debug)]
pub struct Level {
    pub degree: usize,
    pub word_count: usize,
    pub ideal: Echelon,
    complement: Vec<usize>,
    comp_pos: Vec<usize>,
}

impl Level {
    pub fn dim(&self) -> usize {
        self.complement.len()
    }

    pub fn ideal_dim(&self) -> usize {
        self.ideal.rank()
    }

    /// Word indices of the quotient basis.
    pub fn complement(&self) -> &[usize] {
        &self.complement
    }

    /// Reduces a word-basis vector to coordinates on the complement.
    pub fn reduce(&self, v: &[(usize, QFrac)]) -> SparseVec {
        let mut acc: BTreeMap<usize, QFrac> = BTreeMap::new();
        let mut add = |pos: usize, c: QFrac| {
            if c.is_zero() {
                return;
            }
            match acc.get_mut(&pos) {
                Some(e) => {
                    *e = &*e + &c;
                    if e.is_zero() {
                        acc.remove(&pos);
                    }
                }
                None => {
                    acc.insert(pos, c);
                }
            }
        };
        for (w, c) in v {
            let p = self.comp_pos[*w];
            if p != NONE {
                add(p, c.clone());
                continue;
            }
            let row = self.ideal.row_for(*w).expect("non-complement word has a pivot row");
            for (col, x) in &row[1..] {
                add(self.comp_pos[*col], -(c * x));
            }
        }
        acc.into_iter().collect()
    }
}

/// Degreewise quotient of the free algebra by a homogeneous ideal.
#[derive(Clone, Debug)]
pub struct GradedQuotient {
    pub alphabet: Alphabet,
    pub relations: RelationSet,
    pub max_degree: usize,
    levels: Vec<Level>,
}

fn append_letter(alpha: &Alphabet, d: usize, row: &SparseVec, x: &Word) -> SparseVec {
    let mut out: SparseVec = row
        .iter()
        .map(|(i, c)| (alpha.index_of(&alpha.word_at(d, *i).concat(x)), c.clone()))
        .collect();
    out.sort_by_key(|e| e.0);
    out
}

fn prepend_word(alpha: &Alphabet, d: usize, u: &Word, row: &SparseVec) -> SparseVec {
    let mut out: SparseVec = row
        .iter()
        .map(|(i, c)| (alpha.index_of(&u.concat(&alpha.word_at(d, *i))), c.clone()))
        .collect();
    out.sort_by_key(|e| e.0);
    out
}

fn make_level(degree: usize, word_count: usize, ideal: Echelon) -> Level {
    let mut comp_pos = vec![NONE; word_count];
    let complement = ideal.free_columns();
    for (p, &w) in complement.iter().enumerate() {
        comp_pos[w] = p;
    }
    Level { degree, word_count, ideal, complement, comp_pos }
}

/// Builds every degree up to `max_degree` incrementally:
/// `I_d = I_{d-1} V + V^{d-k} R_k`.
pub fn build_quotient(rels: &RelationSet, max_degree: usize) -> GradedQuotient {
    let alpha = rels.alphabet.clone();
    let mut levels: Vec<Level> = vec![make_level(0, 1, Echelon::new(1))];
    let letters: Vec<Word> = alpha.letters().into_iter().map(Word::letter).collect();
    let al = &alpha;
    for d in 1..=max_degree {
        let wc = alpha.word_count(d);
        let mut e = Echelon::new(wc);
        let prev = &levels[d - 1];
        let shifted: Vec<SparseVec> = letters
            .par_iter()
            .flat_map_iter(|x| prev.ideal.rows().into_iter().map(move |r| (x, r)).collect::<Vec<_>>())
            .map(|(x, r)| append_letter(al, d - 1, r, x))
            .collect();
        let mut rest: Vec<SparseVec> = Vec::new();
        for r in shifted {
            if e.is_pivot(r[0].0) {
                rest.push(r);
            } else {
                e.push_echelon_row(r);
            }
        }
        let mut new_rows: Vec<SparseVec> = Vec::new();
        for k in rels.degrees().filter(|&k| k <= d) {
            let rows = rels.rows(k);
            let prefixes: Vec<Word> = (0..alpha.word_count(d - k))
                .map(|i| alpha.word_at(d - k, i))
                .filter(|u| u.f_count() == 0 || k == d)
                .collect();
            let part: Vec<SparseVec> = prefixes
                .par_iter()
                .flat_map_iter(|u| rows.iter().map(move |r| prepend_word(al, k, u, r)))
                .collect();
            new_rows.extend(part);
        }
        rest.extend(new_rows);
        e.insert_many(rest);
        e.finish();
        levels.push(make_level(d, wc, e));
    }
    GradedQuotient { alphabet: alpha, relations: rels.clone(), max_degree, levels }
}

/// Degree-`d` slice of the ideal generated by `rels`, in reduced row echelon form.
pub fn ideal_slice(rels: &RelationSet, d: usize) -> Echelon {
    let gq = build_quotient(rels, d);
    gq.levels.into_iter().nth(d).unwrap().ideal
}

impl GradedQuotient {
    pub fn level(&self, d: usize) -> &Level {
        &self.levels[d]
    }

    pub fn dims(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.dim()).collect()
    }

    pub fn dim(&self, d: usize) -> usize {
        self.levels[d].dim()
    }

    fn check(&self, d: usize) -> Result<(), FreeError> {
        if d > self.max_degree {
            Err(FreeError::DegreeOverflow(d, self.max_degree))
        } else {
            Ok(())
        }
    }

    pub fn complement_words(&self, d: usize) -> Vec<Word> {
        self.levels[d].complement.iter().map(|&i| self.alphabet.word_at(d, i)).collect()
    }

    /// The `pos`-th quotient basis word of degree `d`.
    pub fn basis_word(&self, d: usize, pos: usize) -> Word {
        self.alphabet.word_at(d, self.levels[d].complement[pos])
    }

    /// Coordinates of the normal form of a homogeneous degree-`d` polynomial.
    pub fn coords(&self, p: &NCPoly, d: usize) -> Result<SparseVec, FreeError> {
        self.check(d)?;
        let v = p.to_sparse(&self.alphabet, d)?;
        Ok(self.levels[d].reduce(&v))
    }

    /// Polynomial on complement words from degree-`d` coordinates.
    pub fn from_coords(&self, d: usize, v: &[(usize, QFrac)]) -> NCPoly {
        NCPoly::from_terms(v.iter().map(|(p, c)| (self.basis_word(d, *p), c.clone())))
    }

    pub fn normal_form(&self, p: &NCPoly) -> Result<NCPoly, FreeError> {
        let mut out = NCPoly::zero();
        for (d, comp) in p.components() {
            let v = self.coords(&comp, d)?;
            out = &out + &self.from_coords(d, &v);
        }
        Ok(out)
    }

    pub fn nc_multiply(&self, a: &NCPoly, b: &NCPoly) -> Result<NCPoly, FreeError> {
        self.check(a.max_degree() + b.max_degree())?;
        self.normal_form(&(a * b))
    }

    /// Degree-`d` elements commuting with every generator modulo the ideal.
    pub fn centralizer_basis(&self, d: usize) -> Result<Vec<NCPoly>, FreeError> {
        self.check(d + 1)?;
        let dim = self.dim(d);
        let gens: Vec<NCPoly> = self.alphabet.matrix_letters().map(NCPoly::letter).collect();
        let basis: Vec<NCPoly> = (0..dim).map(|i| NCPoly::word(self.basis_word(d, i))).collect();
        let images: Vec<Vec<SparseVec>> = basis
            .par_iter()
            .map(|z| {
                gens.iter()
                    .map(|g| self.coords(&(&(z * g) - &(g * z)), d + 1).expect("degree checked"))
                    .collect()
            })
            .collect();
        let mut rows: HashMap<(usize, usize), SparseVec> = HashMap::new();
        for (i, per_gen) in images.iter().enumerate() {
            for (g, v) in per_gen.iter().enumerate() {
                for (j, c) in v {
                    rows.entry((g, *j)).or_default().push((i, c.clone()));
                }
            }
        }
        let mut keys: Vec<_> = rows.keys().copied().collect();
        keys.sort_unstable();
        let mut e = Echelon::new(dim);
        e.insert_many(keys.into_iter().map(|k| rows.remove(&k).unwrap()).collect());
        Ok(e.kernel().iter().map(|v| self.from_coords(d, v)).collect())
    }

    /// Whether `z` commutes with every generator modulo the ideal.
    pub fn is_central(&self, z: &NCPoly) -> Result<bool, FreeError> {
        for g in self.alphabet.matrix_letters().map(NCPoly::letter) {
            let c = &(z * &g) - &(&g * z);
            if !self.normal_form(&c)?.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}
