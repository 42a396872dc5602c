//! Free graded algebra on matrix generators with an optional central
//! generator `f`, homogeneous ideals, and degreewise quotients.

mod poly;
mod quotient;

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use poly::NCPoly;
pub use quotient::{build_quotient, ideal_slice, GradedQuotient, Level, RelationSet};

/// Letter code: `0` is `f`, `1 + i*N + j` is the matrix generator `(i, j)`.
pub type Letter = u16;
pub const F_LETTER: Letter = 0;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FreeError {
    #[error("degree {0} exceeds the quotient cap {1}")]
    DegreeOverflow(usize, usize),
    #[error("relation is not homogeneous")]
    Inhomogeneous,
    #[error("letter {0} not in alphabet")]
    BadLetter(Letter),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Alphabet {
    pub n: usize,
    pub has_f: bool,
    pub symbol: char,
}

impl Alphabet {
    pub fn new(n: usize, has_f: bool, symbol: char) -> Self {
        Alphabet { n, has_f, symbol }
    }

    /// Number of matrix generators.
    pub fn m(&self) -> usize {
        self.n * self.n
    }

    pub fn gen(&self, i: usize, j: usize) -> Letter {
        (1 + i * self.n + j) as Letter
    }

    pub fn indices(&self, l: Letter) -> Option<(usize, usize)> {
        (l != F_LETTER).then(|| ((l as usize - 1) / self.n, (l as usize - 1) % self.n))
    }

    pub fn matrix_letters(&self) -> impl Iterator<Item = Letter> {
        1..=(self.m() as Letter)
    }

    pub fn letters(&self) -> Vec<Letter> {
        let mut v: Vec<Letter> = Vec::new();
        if self.has_f {
            v.push(F_LETTER);
        }
        v.extend(self.matrix_letters());
        v
    }

    pub fn letter_name(&self, l: Letter) -> String {
        match self.indices(l) {
            None => "f".to_string(),
            Some((i, j)) => format!("{}^{}_{}", self.symbol, i + 1, j + 1),
        }
    }

    pub fn word_name(&self, w: &Word) -> String {
        if w.is_empty() {
            return "1".into();
        }
        w.letters().iter().map(|&l| self.letter_name(l)).collect::<Vec<_>>().join("*")
    }

    /// Number of normalized words of degree `d`.
    pub fn word_count(&self, d: usize) -> usize {
        let m = self.m();
        if self.has_f {
            (0..=d).map(|k| m.pow((d - k) as u32)).sum()
        } else {
            m.pow(d as u32)
        }
    }

    /// Position of a normalized word in the degree-ordered basis.
    pub fn index_of(&self, w: &Word) -> usize {
        let d = w.len();
        let m = self.m();
        let k = w.f_count();
        let mut offset = 0;
        if self.has_f {
            for kk in (k + 1)..=d {
                offset += m.pow((d - kk) as u32);
            }
        }
        let mut rank = 0usize;
        for &l in &w.0[k..] {
            rank = rank * m + (l as usize - 1);
        }
        offset + rank
    }

    /// Inverse of [`Alphabet::index_of`].
    pub fn word_at(&self, d: usize, mut idx: usize) -> Word {
        let m = self.m();
        let mut k = 0;
        if self.has_f {
            k = d;
            loop {
                let block = m.pow((d - k) as u32);
                if idx < block {
                    break;
                }
                idx -= block;
                k -= 1;
            }
        }
        let mut tail = vec![0 as Letter; d - k];
        for t in (0..d - k).rev() {
            tail[t] = (idx % m + 1) as Letter;
            idx /= m;
        }
        let mut letters = vec![F_LETTER; k];
        letters.extend(tail);
        Word(letters)
    }
}

/// Normalized word: all `f` letters at the front.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn new(mut letters: Vec<Letter>) -> Self {
        let k = letters.iter().filter(|&&l| l == F_LETTER).count();
        if k > 0 {
            letters.retain(|&l| l != F_LETTER);
            let mut v = vec![F_LETTER; k];
            v.extend(letters);
            letters = v;
        }
        Word(letters)
    }

    pub fn letter(l: Letter) -> Self {
        Word(vec![l])
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn f_count(&self) -> usize {
        self.0.iter().take_while(|&&l| l == F_LETTER).count()
    }

    /// Matrix letters without the `f` prefix.
    pub fn matrix_part(&self) -> &[Letter] {
        &self.0[self.f_count()..]
    }

    pub fn concat(&self, o: &Word) -> Word {
        if o.f_count() == 0 {
            let mut v = self.0.clone();
            v.extend_from_slice(&o.0);
            return Word(v);
        }
        let mut v = self.0.clone();
        v.extend_from_slice(&o.0);
        Word::new(v)
    }

    /// Letters sorted: the commutative monomial the word specializes to.
    pub fn sorted(&self) -> Word {
        let mut v = self.0.clone();
        v.sort_unstable();
        Word(v)
    }
}

impl Ord for Word {
    fn cmp(&self, o: &Self) -> Ordering {
        self.0.len().cmp(&o.0.len()).then_with(|| self.0.cmp(&o.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indexing_roundtrip_and_order() {
        for has_f in [false, true] {
            let a = Alphabet::new(2, has_f, 'T');
            for d in 0..4 {
                let count = a.word_count(d);
                let words: Vec<Word> = (0..count).map(|i| a.word_at(d, i)).collect();
                for (i, w) in words.iter().enumerate() {
                    assert_eq!(a.index_of(w), i);
                }
                assert!(words.windows(2).all(|p| p[0] < p[1]), "index order is deg-lex");
            }
        }
    }

    #[test]
    fn f_moves_to_front() {
        let w = Word::new(vec![2, 0, 3, 0]);
        assert_eq!(w.letters(), &[0, 0, 2, 3]);
        assert_eq!(w.f_count(), 2);
    }

    #[test]
    fn counts_with_f() {
        let a = Alphabet::new(2, true, 'T');
        assert_eq!(a.word_count(2), 16 + 4 + 1);
    }
}
