//! Finite residue fields `F_p[t]/(π)` and their elements.

use std::fmt;

use super::arith;
use super::poly::{fp_inv, Poly};

/// The finite field `F_p[t]/(π)` for a monic irreducible `π`.
///
/// Prime fields use the modulus `π = t`, so their elements are constants.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ResidueField {
    modulus: Poly,
}

impl ResidueField {
    pub fn new(modulus: Poly) -> Self {
        debug_assert!(modulus.is_monic() && modulus.deg() >= 1);
        ResidueField { modulus }
    }

    pub fn prime(p: u64) -> Self {
        ResidueField { modulus: Poly::t(p) }
    }

    /// The field of order `p^d` with the lexicographically least monic
    /// irreducible modulus of degree `d`.
    pub fn of_degree(p: u64, d: usize) -> Self {
        assert!(d >= 1);
        if d == 1 {
            return ResidueField::prime(p);
        }
        let mut digits = vec![0u64; d];
        loop {
            let mut c = digits.clone();
            c.push(1);
            let f = Poly::new(p, c);
            if f.is_irreducible() {
                return ResidueField::new(f);
            }
            let mut i = 0;
            while i < d {
                digits[i] += 1;
                if digits[i] < p {
                    break;
                }
                digits[i] = 0;
                i += 1;
            }
            assert!(i < d, "irreducible polynomials exist in every degree");
        }
    }

    pub fn characteristic(&self) -> u64 {
        self.modulus.characteristic()
    }

    pub fn degree(&self) -> usize {
        self.modulus.deg()
    }

    pub fn modulus(&self) -> &Poly {
        &self.modulus
    }

    /// `|f|`, if it fits in 64 bits.
    pub fn size(&self) -> Option<u64> {
        self.characteristic().checked_pow(u32::try_from(self.degree()).ok()?)
    }

    pub fn one(&self) -> ResidueElement {
        self.constant(1)
    }

    pub fn constant(&self, c: u64) -> ResidueElement {
        let p = self.characteristic();
        self.element(Poly::constant(p, c % p))
    }

    pub fn element(&self, value: Poly) -> ResidueElement {
        ResidueElement {
            field: self.clone(),
            value: value.rem(&self.modulus),
        }
    }

    /// A generator of `f^×`, found by search.
    pub fn generator(&self) -> Option<ResidueElement> {
        let n = self.size()? - 1;
        let p = self.characteristic();
        let d = self.degree();
        let fs = arith::factor_u64(n);
        let mut digits = vec![0u64; d];
        loop {
            let g = self.element(Poly::new(p, digits.clone()));
            if !g.value.is_zero() && fs.iter().all(|&(q, _)| !g.pow_u(n / q).is_one()) {
                return Some(g);
            }
            let mut i = 0;
            while i < d {
                digits[i] += 1;
                if digits[i] < p {
                    break;
                }
                digits[i] = 0;
                i += 1;
            }
            if i == d {
                return None;
            }
        }
    }
}

/// An element of a residue field, stored as a reduced polynomial.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ResidueElement {
    field: ResidueField,
    value: Poly,
}

impl ResidueElement {
    pub fn field(&self) -> &ResidueField {
        &self.field
    }

    pub fn value(&self) -> &Poly {
        &self.value
    }

    /// The value as an integer in `[0, p)` for prime residue fields.
    pub fn as_constant(&self) -> Option<u64> {
        self.value.is_constant().then(|| self.value.coeff(0))
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.value.is_one()
    }

    pub fn mul(&self, o: &ResidueElement) -> ResidueElement {
        assert_eq!(self.field, o.field, "residue field mismatch");
        ResidueElement {
            field: self.field.clone(),
            value: self.value.mul_mod(&o.value, &self.field.modulus),
        }
    }

    pub fn inv(&self) -> ResidueElement {
        let value = if self.field.degree() == 1 {
            let p = self.field.characteristic();
            Poly::constant(p, fp_inv(self.value.coeff(0), p))
        } else {
            self.value
                .inv_mod(&self.field.modulus)
                .expect("nonzero residue is invertible")
        };
        ResidueElement {
            field: self.field.clone(),
            value,
        }
    }

    fn pow_u(&self, e: u64) -> ResidueElement {
        ResidueElement {
            field: self.field.clone(),
            value: self.value.pow_mod(e, &self.field.modulus),
        }
    }

    pub fn pow(&self, e: i64) -> ResidueElement {
        let base = if e < 0 { self.inv() } else { self.clone() };
        base.pow_u(e.unsigned_abs())
    }

    /// Norm down to the prime field.
    pub fn norm(&self) -> u64 {
        self.value.norm_mod(&self.field.modulus)
    }

    /// Multiplicative order, when `|f| - 1` fits in 64 bits.
    pub fn order(&self) -> Option<u64> {
        assert!(!self.is_zero(), "order of zero");
        let n = self.field.size()? - 1;
        let mut ord = n;
        for (q, _) in arith::factor_u64(n) {
            while ord % q == 0 && self.pow_u(ord / q).is_one() {
                ord /= q;
            }
        }
        Some(ord)
    }
}

impl fmt::Display for ResidueElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.field.degree() == 1 {
            write!(f, "{}", self.value.coeff(0))
        } else {
            write!(f, "{}", self.value)
        }
    }
}
