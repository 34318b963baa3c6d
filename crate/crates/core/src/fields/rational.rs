//! Exact rational numbers with 128-bit numerator and denominator.

use std::fmt;

use num_integer::Integer;

use crate::error::{Error, Result};

/// A rational number in lowest terms with positive denominator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rational {
    num: i128,
    den: i128,
}

impl Rational {
    pub const ZERO: Rational = Rational { num: 0, den: 1 };
    pub const ONE: Rational = Rational { num: 1, den: 1 };

    pub fn new(num: i128, den: i128) -> Result<Self> {
        if den == 0 {
            return Err(Error::parse(format!("{num}/0"), "zero denominator"));
        }
        if num == i128::MIN || den == i128::MIN {
            return Err(Error::Overflow("rational"));
        }
        let g = num.gcd(&den);
        let s = if den < 0 { -1 } else { 1 };
        Ok(Rational {
            num: s * num / g,
            den: s * den / g,
        })
    }

    pub fn integer(n: i128) -> Self {
        Rational { num: n, den: 1 }
    }

    pub fn numer(&self) -> i128 {
        self.num
    }

    pub fn denom(&self) -> i128 {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn signum(&self) -> i128 {
        self.num.signum()
    }

    pub fn checked_mul(&self, o: &Rational) -> Option<Rational> {
        let g1 = self.num.gcd(&o.den);
        let g2 = o.num.gcd(&self.den);
        let (g1, g2) = (g1.max(1), g2.max(1));
        let num = (self.num / g1).checked_mul(o.num / g2)?;
        let den = (self.den / g2).checked_mul(o.den / g1)?;
        Rational::new(num, den).ok()
    }

    pub fn checked_add(&self, o: &Rational) -> Option<Rational> {
        let g = self.den.gcd(&o.den);
        let l = (self.den / g).checked_mul(o.den)?;
        let a = self.num.checked_mul(l / self.den)?;
        let b = o.num.checked_mul(l / o.den)?;
        Rational::new(a.checked_add(b)?, l).ok()
    }

    pub fn checked_neg(&self) -> Option<Rational> {
        Some(Rational {
            num: self.num.checked_neg()?,
            den: self.den,
        })
    }

    pub fn checked_sub(&self, o: &Rational) -> Option<Rational> {
        self.checked_add(&o.checked_neg()?)
    }

    pub fn checked_inv(&self) -> Option<Rational> {
        if self.num == 0 {
            return None;
        }
        Rational::new(self.den, self.num).ok()
    }

    pub fn checked_div(&self, o: &Rational) -> Option<Rational> {
        self.checked_mul(&o.checked_inv()?)
    }

    pub fn checked_pow(&self, e: i64) -> Option<Rational> {
        let base = if e < 0 { self.checked_inv()? } else { *self };
        let e = u32::try_from(e.unsigned_abs()).ok()?;
        Some(Rational {
            num: base.num.checked_pow(e)?,
            den: base.den.checked_pow(e)?,
        })
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}
