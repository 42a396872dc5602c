use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use crate::exactalg::{QFrac, SparseVec};

use super::{Alphabet, FreeError, Letter, Word};

/// Noncommutative polynomial: normalized words with fraction-field coefficients.
#[derive(Clone, PartialEq, Eq, Default, Debug)]
pub struct NCPoly {
    terms: BTreeMap<Word, QFrac>,
}

impl NCPoly {
    pub fn zero() -> Self {
        NCPoly { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::word(Word::empty())
    }

    pub fn word(w: Word) -> Self {
        Self::term(w, QFrac::one())
    }

    pub fn letter(l: Letter) -> Self {
        Self::word(Word::letter(l))
    }

    pub fn term(w: Word, c: QFrac) -> Self {
        let mut p = Self::zero();
        p.add_term(w, c);
        p
    }

    pub fn from_terms(ts: impl IntoIterator<Item = (Word, QFrac)>) -> Self {
        let mut p = Self::zero();
        for (w, c) in ts {
            p.add_term(w, c);
        }
        p
    }

    pub fn add_term(&mut self, w: Word, c: QFrac) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&w) {
            Some(e) => {
                *e = &*e + &c;
                if e.is_zero() {
                    self.terms.remove(&w);
                }
            }
            None => {
                self.terms.insert(w, c);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &QFrac)> {
        self.terms.iter()
    }

    pub fn coeff(&self, w: &Word) -> QFrac {
        self.terms.get(w).cloned().unwrap_or_else(QFrac::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Common degree of all terms, or `None` if empty or inhomogeneous.
    pub fn degree(&self) -> Option<usize> {
        let mut it = self.terms.keys().map(|w| w.len());
        let d = it.next()?;
        it.all(|e| e == d).then_some(d)
    }

    pub fn max_degree(&self) -> usize {
        self.terms.keys().map(|w| w.len()).max().unwrap_or(0)
    }

    /// Splits into homogeneous components keyed by degree.
    pub fn components(&self) -> BTreeMap<usize, NCPoly> {
        let mut out: BTreeMap<usize, NCPoly> = BTreeMap::new();
        for (w, c) in &self.terms {
            out.entry(w.len()).or_default().terms.insert(w.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, s: &QFrac) -> Self {
        if s.is_zero() {
            return Self::zero();
        }
        NCPoly { terms: self.terms.iter().map(|(w, c)| (w.clone(), c * s)).collect() }
    }

    pub fn map_coeffs(&self, f: impl Fn(&QFrac) -> QFrac) -> Self {
        Self::from_terms(self.terms.iter().map(|(w, c)| (w.clone(), f(c))))
    }

    /// Coordinates in the degree-`d` word basis.
    pub fn to_sparse(&self, alpha: &Alphabet, d: usize) -> Result<SparseVec, FreeError> {
        let mut v: SparseVec = Vec::with_capacity(self.terms.len());
        for (w, c) in &self.terms {
            if w.len() != d {
                return Err(FreeError::Inhomogeneous);
            }
            v.push((alpha.index_of(w), c.clone()));
        }
        v.sort_by_key(|e| e.0);
        Ok(v)
    }

    pub fn from_sparse(alpha: &Alphabet, d: usize, v: &[(usize, QFrac)]) -> Self {
        Self::from_terms(v.iter().map(|(i, c)| (alpha.word_at(d, *i), c.clone())))
    }

    /// Readable form, e.g. `1*q^0 T^1_1*T^2_2 + -1*q^1 T^1_2*T^2_1`.
    pub fn display(&self, alpha: &Alphabet) -> String {
        if self.is_zero() {
            return "0".into();
        }
        self.terms
            .iter()
            .map(|(w, c)| format!("({}) {}", c, alpha.word_name(w)))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

impl<'a> Add<&'a NCPoly> for &'a NCPoly {
    type Output = NCPoly;
    fn add(self, o: &NCPoly) -> NCPoly {
        let mut p = self.clone();
        for (w, c) in &o.terms {
            p.add_term(w.clone(), c.clone());
        }
        p
    }
}

impl<'a> Sub<&'a NCPoly> for &'a NCPoly {
    type Output = NCPoly;
    fn sub(self, o: &NCPoly) -> NCPoly {
        let mut p = self.clone();
        for (w, c) in &o.terms {
            p.add_term(w.clone(), -c);
        }
        p
    }
}

/// Free (concatenation) product.
impl<'a> Mul<&'a NCPoly> for &'a NCPoly {
    type Output = NCPoly;
    fn mul(self, o: &NCPoly) -> NCPoly {
        let mut p = NCPoly::zero();
        for (w1, c1) in &self.terms {
            for (w2, c2) in &o.terms {
                p.add_term(w1.concat(w2), c1 * c2);
            }
        }
        p
    }
}

impl Neg for &NCPoly {
    type Output = NCPoly;
    fn neg(self) -> NCPoly {
        self.map_coeffs(|c| -c)
    }
}
