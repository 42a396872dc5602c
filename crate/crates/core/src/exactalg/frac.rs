use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::laurent::dense;
use super::{ExactError, QScalar, Rat};

/// Element of the fraction field of [`QScalar`].
///
/// The denominator is an ordinary polynomial with nonzero constant term,
/// monic, and coprime to the numerator. Monomial denominators are folded
/// into the numerator, so Laurent values always carry denominator one.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QFrac {
    num: QScalar,
    den: QScalar,
}

impl QFrac {
    pub fn zero() -> Self {
        QFrac { num: QScalar::zero(), den: QScalar::one() }
    }

    pub fn one() -> Self {
        QFrac { num: QScalar::one(), den: QScalar::one() }
    }

    pub fn from_int(c: i64) -> Self {
        QScalar::from_int(c).into()
    }

    pub fn num(&self) -> &QScalar {
        &self.num
    }

    pub fn den(&self) -> &QScalar {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_laurent(&self) -> bool {
        self.den.is_one()
    }

    pub fn as_laurent(&self) -> Option<&QScalar> {
        self.den.is_one().then_some(&self.num)
    }

    /// Total term count, used as a pivot cost.
    pub fn weight(&self) -> usize {
        self.num.term_count() + self.den.term_count() - 1
    }

    pub fn new(num: QScalar, den: QScalar) -> Result<Self, ExactError> {
        if den.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        Ok(Self::normalize(num, den))
    }

    fn normalize(num: QScalar, den: QScalar) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        if den.is_monomial() {
            let (k, c) = &den.terms()[0];
            return QFrac { num: num.shift(-k).scale(&c.recip()), den: QScalar::one() };
        }
        let (dp, dshift) = dense::from_laurent(&den);
        let (np, nshift) = dense::from_laurent(&num);
        let g = dense::gcd(&np, &dp);
        let (np, dp) = if g.len() > 1 {
            (dense::divrem(&np, &g).0, dense::divrem(&dp, &g).0)
        } else {
            (np, dp)
        };
        let lead = dp.last().unwrap().clone();
        let inv = lead.recip();
        let dp: Vec<Rat> = dp.iter().map(|c| c * &inv).collect();
        let np: Vec<Rat> = np.iter().map(|c| c * &inv).collect();
        let den = dense::to_laurent(&dp, 0);
        let num = dense::to_laurent(&np, nshift - dshift);
        if den.is_monomial() {
            return Self::normalize(num, den);
        }
        QFrac { num, den }
    }

    /// Builds a fraction already known to be in lowest terms.
    fn reduced(num: QScalar, den: QScalar) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        if den.is_monomial() {
            return Self::normalize(num, den);
        }
        let lead = den.terms().last().unwrap().1.clone();
        if lead.is_one() && den.min_exp() == Some(0) {
            return QFrac { num, den };
        }
        Self::normalize(num, den)
    }

    pub fn inv(&self) -> Result<Self, ExactError> {
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn scale(&self, s: &Rat) -> Self {
        if s.is_zero() {
            return Self::zero();
        }
        QFrac { num: self.num.scale(s), den: self.den.clone() }
    }

    pub fn evaluate_at(&self, q0: &Rat) -> Result<Rat, ExactError> {
        let d = self.den.evaluate_at(q0)?;
        if d.is_zero() {
            return Err(ExactError::PoleAt(q0.to_string()));
        }
        Ok(self.num.evaluate_at(q0)? / d)
    }

    /// `d/dq` at `q = 1`; fails when the denominator vanishes there.
    pub fn derivative_at_one(&self) -> Result<Rat, ExactError> {
        if self.den.is_one() {
            return Ok(self.num.derivative_at_one());
        }
        let one = Rat::one();
        let n = self.num.evaluate_at(&one)?;
        let d = self.den.evaluate_at(&one)?;
        if d.is_zero() {
            return Err(ExactError::PoleAt("1".into()));
        }
        let dn = self.num.derivative_at_one();
        let dd = self.den.derivative_at_one();
        Ok((dn * &d - n * dd) / (&d * &d))
    }
}

impl From<QScalar> for QFrac {
    fn from(s: QScalar) -> Self {
        QFrac { num: s, den: QScalar::one() }
    }
}

impl From<&QScalar> for QFrac {
    fn from(s: &QScalar) -> Self {
        QFrac { num: s.clone(), den: QScalar::one() }
    }
}

impl From<i64> for QFrac {
    fn from(c: i64) -> Self {
        QFrac::from_int(c)
    }
}

impl<'a> Add<&'a QFrac> for &'a QFrac {
    type Output = QFrac;
    fn add(self, o: &QFrac) -> QFrac {
        if self.den.is_one() && o.den.is_one() {
            return QFrac { num: &self.num + &o.num, den: QScalar::one() };
        }
        if self.den == o.den {
            return QFrac::normalize(&self.num + &o.num, self.den.clone());
        }
        match dense::laurent_gcd(&self.den, &o.den) {
            None => QFrac::reduced(&(&self.num * &o.den) + &(&o.num * &self.den), &self.den * &o.den),
            Some(g) => {
                let (d1, d2) = (dense::exact_div(&self.den, &g), dense::exact_div(&o.den, &g));
                QFrac::normalize(&(&self.num * &d2) + &(&o.num * &d1), &self.den * &d2)
            }
        }
    }
}

impl<'a> Sub<&'a QFrac> for &'a QFrac {
    type Output = QFrac;
    fn sub(self, o: &QFrac) -> QFrac {
        if self.den.is_one() && o.den.is_one() {
            return QFrac { num: &self.num - &o.num, den: QScalar::one() };
        }
        if self.den == o.den {
            return QFrac::normalize(&self.num - &o.num, self.den.clone());
        }
        match dense::laurent_gcd(&self.den, &o.den) {
            None => QFrac::reduced(&(&self.num * &o.den) - &(&o.num * &self.den), &self.den * &o.den),
            Some(g) => {
                let (d1, d2) = (dense::exact_div(&self.den, &g), dense::exact_div(&o.den, &g));
                QFrac::normalize(&(&self.num * &d2) - &(&o.num * &d1), &self.den * &d2)
            }
        }
    }
}

impl<'a> Mul<&'a QFrac> for &'a QFrac {
    type Output = QFrac;
    fn mul(self, o: &QFrac) -> QFrac {
        if self.is_zero() || o.is_zero() {
            return QFrac::zero();
        }
        if self.den.is_one() && o.den.is_one() {
            return QFrac { num: &self.num * &o.num, den: QScalar::one() };
        }
        let g1 = dense::laurent_gcd(&self.num, &o.den);
        let g2 = dense::laurent_gcd(&o.num, &self.den);
        if g1.is_none() && g2.is_none() {
            return QFrac::reduced(&self.num * &o.num, &self.den * &o.den);
        }
        let cut = |x: &QScalar, g: &Option<QScalar>| g.as_ref().map_or_else(|| x.clone(), |g| dense::exact_div(x, g));
        QFrac::normalize(&cut(&self.num, &g1) * &cut(&o.num, &g2), &cut(&self.den, &g2) * &cut(&o.den, &g1))
    }
}

impl<'a> Div<&'a QFrac> for &'a QFrac {
    type Output = QFrac;
    fn div(self, o: &QFrac) -> QFrac {
        assert!(!o.is_zero(), "division by zero in QFrac");
        if self.den.is_one() && o.den.is_one() && o.num.is_monomial() {
            let (k, c) = &o.num.terms()[0];
            return QFrac { num: self.num.shift(-k).scale(&c.recip()), den: QScalar::one() };
        }
        QFrac::normalize(&self.num * &o.den, &self.den * &o.num)
    }
}

impl Neg for &QFrac {
    type Output = QFrac;
    fn neg(self) -> QFrac {
        QFrac { num: -&self.num, den: self.den.clone() }
    }
}

impl Neg for QFrac {
    type Output = QFrac;
    fn neg(self) -> QFrac {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<QFrac> for QFrac {
            type Output = QFrac;
            fn $m(self, o: QFrac) -> QFrac {
                (&self).$m(&o)
            }
        }
        impl<'a> $tr<&'a QFrac> for QFrac {
            type Output = QFrac;
            fn $m(self, o: &QFrac) -> QFrac {
                (&self).$m(o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Zero for QFrac {
    fn zero() -> Self {
        QFrac::zero()
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl One for QFrac {
    fn one() -> Self {
        QFrac::one()
    }
}

impl fmt::Display for QFrac {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for QFrac {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}
