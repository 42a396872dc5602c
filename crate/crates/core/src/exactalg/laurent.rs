use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{ExactError, Rat};

/// Laurent polynomial in `q` with rational coefficients.
///
/// Terms are kept sorted by exponent with no zero coefficients, so
/// structural equality is mathematical equality.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct QScalar {
    terms: Vec<(i32, Rat)>,
}

impl QScalar {
    pub fn zero() -> Self {
        QScalar { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        Self::monomial(c, 0)
    }

    pub fn from_int(c: i64) -> Self {
        Self::constant(Rat::from_integer(BigInt::from(c)))
    }

    pub fn monomial(c: Rat, k: i32) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            QScalar { terms: vec![(k, c)] }
        }
    }

    /// `q^k`
    pub fn q_pow(k: i32) -> Self {
        Self::monomial(Rat::one(), k)
    }

    pub fn q() -> Self {
        Self::q_pow(1)
    }

    /// `q - q^{-1}`
    pub fn q_minus_qinv() -> Self {
        Self::from_terms(vec![(1, Rat::one()), (-1, -Rat::one())])
    }

    /// Builds from arbitrary (exponent, coefficient) pairs, merging duplicates.
    pub fn from_terms(mut raw: Vec<(i32, Rat)>) -> Self {
        raw.sort_by_key(|t| t.0);
        let mut terms: Vec<(i32, Rat)> = Vec::with_capacity(raw.len());
        for (k, c) in raw {
            match terms.last_mut() {
                Some(last) if last.0 == k => last.1 += c,
                _ => terms.push((k, c)),
            }
        }
        terms.retain(|t| !t.1.is_zero());
        QScalar { terms }
    }

    pub fn terms(&self) -> &[(i32, Rat)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0 == 0 && self.terms[0].1.is_one()
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn min_exp(&self) -> Option<i32> {
        self.terms.first().map(|t| t.0)
    }

    pub fn max_exp(&self) -> Option<i32> {
        self.terms.last().map(|t| t.0)
    }

    /// Constant coefficient if the scalar has no `q` dependence.
    pub fn as_constant(&self) -> Option<Rat> {
        match self.terms.as_slice() {
            [] => Some(Rat::zero()),
            [(0, c)] => Some(c.clone()),
            _ => None,
        }
    }

    /// Multiplies by `q^k`.
    pub fn shift(&self, k: i32) -> Self {
        QScalar {
            terms: self.terms.iter().map(|(e, c)| (e + k, c.clone())).collect(),
        }
    }

    pub fn scale(&self, s: &Rat) -> Self {
        if s.is_zero() {
            return Self::zero();
        }
        QScalar {
            terms: self.terms.iter().map(|(e, c)| (*e, c * s)).collect(),
        }
    }

    /// Substitutes `q -> q^{-1}`.
    pub fn bar(&self) -> Self {
        let mut terms: Vec<_> = self.terms.iter().map(|(e, c)| (-e, c.clone())).collect();
        terms.reverse();
        QScalar { terms }
    }

    pub fn evaluate_at(&self, q0: &Rat) -> Result<Rat, ExactError> {
        if q0.is_zero() {
            return Err(ExactError::ZeroEvaluationPoint);
        }
        let mut acc = Rat::zero();
        for (e, c) in &self.terms {
            acc += c * pow_rat(q0, *e);
        }
        Ok(acc)
    }

    /// `d/dq` evaluated at `q = 1`.
    pub fn derivative_at_one(&self) -> Rat {
        let mut acc = Rat::zero();
        for (e, c) in &self.terms {
            acc += c * Rat::from_integer(BigInt::from(*e));
        }
        acc
    }

    /// Full derivative `d/dq`.
    pub fn derivative(&self) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .map(|(e, c)| (e - 1, c * Rat::from_integer(BigInt::from(*e))))
                .collect(),
        )
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }
}

pub(crate) fn pow_rat(x: &Rat, e: i32) -> Rat {
    let p = num_traits::pow(x.clone(), e.unsigned_abs() as usize);
    if e < 0 {
        p.recip()
    } else {
        p
    }
}

fn merge(a: &[(i32, Rat)], b: &[(i32, Rat)], negate_b: bool) -> Vec<(i32, Rat)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i].clone());
            i += 1;
        } else if i == a.len() || b[j].0 < a[i].0 {
            let c = if negate_b { -&b[j].1 } else { b[j].1.clone() };
            out.push((b[j].0, c));
            j += 1;
        } else {
            let c = if negate_b { &a[i].1 - &b[j].1 } else { &a[i].1 + &b[j].1 };
            if !c.is_zero() {
                out.push((a[i].0, c));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

impl<'a> Add<&'a QScalar> for &'a QScalar {
    type Output = QScalar;
    fn add(self, o: &QScalar) -> QScalar {
        QScalar { terms: merge(&self.terms, &o.terms, false) }
    }
}

impl<'a> Sub<&'a QScalar> for &'a QScalar {
    type Output = QScalar;
    fn sub(self, o: &QScalar) -> QScalar {
        QScalar { terms: merge(&self.terms, &o.terms, true) }
    }
}

impl<'a> Mul<&'a QScalar> for &'a QScalar {
    type Output = QScalar;
    fn mul(self, o: &QScalar) -> QScalar {
        if self.is_zero() || o.is_zero() {
            return QScalar::zero();
        }
        if o.is_monomial() {
            let (k, c) = &o.terms[0];
            return QScalar {
                terms: self.terms.iter().map(|(e, x)| (e + k, x * c)).collect(),
            };
        }
        if self.is_monomial() {
            return o * self;
        }
        let mut raw = Vec::with_capacity(self.terms.len() * o.terms.len());
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                raw.push((e1 + e2, c1 * c2));
            }
        }
        QScalar::from_terms(raw)
    }
}

impl Neg for &QScalar {
    type Output = QScalar;
    fn neg(self) -> QScalar {
        QScalar {
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }
}

impl Neg for QScalar {
    type Output = QScalar;
    fn neg(self) -> QScalar {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<QScalar> for QScalar {
            type Output = QScalar;
            fn $m(self, o: QScalar) -> QScalar {
                (&self).$m(&o)
            }
        }
        impl<'a> $tr<&'a QScalar> for QScalar {
            type Output = QScalar;
            fn $m(self, o: &QScalar) -> QScalar {
                (&self).$m(o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl AddAssign<&QScalar> for QScalar {
    fn add_assign(&mut self, o: &QScalar) {
        self.terms = merge(&self.terms, &o.terms, false);
    }
}

impl SubAssign<&QScalar> for QScalar {
    fn sub_assign(&mut self, o: &QScalar) {
        self.terms = merge(&self.terms, &o.terms, true);
    }
}

impl From<i64> for QScalar {
    fn from(c: i64) -> Self {
        QScalar::from_int(c)
    }
}

impl From<Rat> for QScalar {
    fn from(c: Rat) -> Self {
        QScalar::constant(c)
    }
}

/// Canonical text form: `c*q^k` terms joined by ` + `, exponents ascending.
impl fmt::Display for QScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (e, c)) in self.terms.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}*q^{}", c, e)?;
        }
        Ok(())
    }
}

impl fmt::Debug for QScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

/// Dense rational polynomial helpers (index = exponent) used by the fraction field.
pub(crate) mod dense {
    use super::*;

    pub type Poly = Vec<Rat>;

    pub fn trim(p: &mut Poly) {
        while p.last().map_or(false, |c| c.is_zero()) {
            p.pop();
        }
    }

    /// Shifts a Laurent polynomial to start at exponent 0; returns the shift.
    pub fn from_laurent(s: &QScalar) -> (Poly, i32) {
        let lo = s.min_exp().unwrap_or(0);
        let hi = s.max_exp().unwrap_or(-1);
        let mut p = vec![Rat::zero(); (hi - lo + 1).max(0) as usize];
        for (e, c) in s.terms() {
            p[(e - lo) as usize] = c.clone();
        }
        (p, lo)
    }

    pub fn to_laurent(p: &Poly, shift: i32) -> QScalar {
        QScalar::from_terms(
            p.iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| (i as i32 + shift, c.clone()))
                .collect(),
        )
    }

    pub fn divrem(a: &Poly, b: &Poly) -> (Poly, Poly) {
        let mut r = a.clone();
        trim(&mut r);
        let db = b.len() - 1;
        let lead = b[db].clone();
        if r.len() < b.len() {
            return (Vec::new(), r);
        }
        let mut quo = vec![Rat::zero(); r.len() - db];
        while r.len() >= b.len() {
            let k = r.len() - b.len();
            let c = &r[r.len() - 1] / &lead;
            for (i, bc) in b.iter().enumerate() {
                let t = &c * bc;
                r[k + i] -= t;
            }
            quo[k] = c;
            r.pop();
            trim(&mut r);
        }
        (quo, r)
    }

    /// Nontrivial polynomial gcd of two Laurent polynomials, ignoring monomial units.
    pub fn laurent_gcd(a: &QScalar, b: &QScalar) -> Option<QScalar> {
        if a.is_monomial() || b.is_monomial() {
            return None;
        }
        let g = gcd(&from_laurent(a).0, &from_laurent(b).0);
        (g.len() > 1).then(|| to_laurent(&g, 0))
    }

    /// `a / g` for a polynomial `g` known to divide `a`.
    pub fn exact_div(a: &QScalar, g: &QScalar) -> QScalar {
        let (ap, shift) = from_laurent(a);
        let (q, r) = divrem(&ap, &from_laurent(g).0);
        debug_assert!(r.is_empty());
        to_laurent(&q, shift)
    }

    pub fn monic(p: &Poly) -> Poly {
        let lead = p.last().expect("nonzero polynomial").clone();
        p.iter().map(|c| c / &lead).collect()
    }

    const PRIME: u64 = 0x1fff_ffff_ffff_ffff;

    fn fold(x: u128) -> u64 {
        let r = (x & PRIME as u128) as u64 + (x >> 61) as u64;
        let r = (r & PRIME) + (r >> 61);
        if r >= PRIME {
            r - PRIME
        } else {
            r
        }
    }

    fn mulmod(a: u64, b: u64) -> u64 {
        fold(a as u128 * b as u128)
    }

    fn powmod(mut a: u64, mut e: u64) -> u64 {
        let mut r = 1;
        while e > 0 {
            if e & 1 == 1 {
                r = mulmod(r, a);
            }
            a = mulmod(a, a);
            e >>= 1;
        }
        r
    }

    fn residue(x: &BigInt) -> u64 {
        let (sign, digits) = x.to_u64_digits();
        let r = digits.iter().rev().fold(0u64, |r, &d| fold(((r as u128) << 64) | d as u128));
        if sign == num_bigint::Sign::Minus && r != 0 {
            PRIME - r
        } else {
            r
        }
    }

    /// Image of a rational polynomial modulo the prime, with one shared inversion.
    fn image(p: &Poly) -> Option<Vec<u64>> {
        let nums: Vec<u64> = p.iter().map(|c| residue(c.numer())).collect();
        let dens: Vec<u64> = p.iter().map(|c| residue(c.denom())).collect();
        let mut prefix = Vec::with_capacity(dens.len());
        let mut acc = 1u64;
        for &d in &dens {
            if d == 0 {
                return None;
            }
            prefix.push(acc);
            acc = mulmod(acc, d);
        }
        let mut inv = powmod(acc, PRIME - 2);
        let mut out = vec![0; dens.len()];
        for i in (0..dens.len()).rev() {
            out[i] = mulmod(nums[i], mulmod(inv, prefix[i]));
            inv = mulmod(inv, dens[i]);
        }
        Some(out)
    }

    /// Monic `gcd(a mod p, b mod p)`, or `None` if the image is not faithful.
    fn gcd_mod(a: &Poly, b: &Poly) -> Option<Vec<u64>> {
        let (mut x, mut y) = (image(a)?, image(b)?);
        if *x.last()? == 0 || *y.last()? == 0 {
            return None;
        }
        let strip = |v: &mut Vec<u64>| {
            while v.last() == Some(&0) {
                v.pop();
            }
        };
        while !y.is_empty() {
            let inv = powmod(*y.last().unwrap(), PRIME - 2);
            while x.len() >= y.len() {
                let k = x.len() - y.len();
                let c = mulmod(*x.last().unwrap(), inv);
                for (i, yc) in y.iter().enumerate() {
                    x[k + i] = fold(x[k + i] as u128 + (PRIME - mulmod(c, *yc)) as u128);
                }
                strip(&mut x);
            }
            std::mem::swap(&mut x, &mut y);
        }
        let inv = powmod(*x.last()?, PRIME - 2);
        Some(x.iter().map(|c| mulmod(*c, inv)).collect())
    }

    /// Smallest `n/d` congruent to `u` modulo the prime.
    fn reconstruct(u: u64) -> Option<Rat> {
        let bound = (PRIME as f64 / 2.0).sqrt() as i128;
        let (mut r0, mut r1) = (PRIME as i128, u as i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 >= bound {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        (t1 != 0 && t1.abs() < bound).then(|| Rat::new(BigInt::from(r1), BigInt::from(t1)))
    }

    fn divides(g: &Poly, p: &Poly) -> bool {
        divrem(p, g).1.is_empty()
    }

    pub fn gcd(a: &Poly, b: &Poly) -> Poly {
        let mut x = a.clone();
        let mut y = b.clone();
        trim(&mut x);
        trim(&mut y);
        if x.len() == 1 || y.len() == 1 {
            return vec![Rat::one()];
        }
        if let Some(g) = gcd_mod(&x, &y) {
            if g.len() == 1 {
                return vec![Rat::one()];
            }
            let lifted: Option<Poly> = g.iter().map(|&c| reconstruct(c)).collect();
            if let Some(cand) = lifted {
                if divides(&cand, &x) && divides(&cand, &y) {
                    return cand;
                }
            }
        }
        while !y.is_empty() {
            let (_, r) = divrem(&x, &y);
            x = y;
            y = if r.is_empty() { r } else { monic(&r) };
        }
        if x.is_empty() {
            x
        } else {
            monic(&x)
        }
    }
}
