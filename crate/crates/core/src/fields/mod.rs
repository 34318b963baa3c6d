//! Ground fields, their places, valuations, and residue fields.
//!
//! Two kinds of global field are supported: the rationals `Q` and rational
//! function fields `F_p(t)`. Elements are kept in canonical form so that
//! structural equality is field equality.

pub mod arith;
mod parse;
mod poly;
mod rational;
mod residue;

use std::fmt;

pub use poly::Poly;
pub use rational::Rational;
pub use residue::{ResidueElement, ResidueField};

use crate::error::{Error, Result};

pub(crate) use poly::fp_inv;

/// Largest characteristic accepted by [`Field::function`].
pub const DEFAULT_MAX_CHARACTERISTIC: u64 = 97;

/// A ground field: `Q` or `F_p(t)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Field {
    Rational,
    Function { p: u64 },
}

impl Field {
    /// `F_p(t)` with `p` prime and at most [`DEFAULT_MAX_CHARACTERISTIC`].
    pub fn function(p: u64) -> Result<Field> {
        Field::function_bounded(p, DEFAULT_MAX_CHARACTERISTIC)
    }

    pub fn function_bounded(p: u64, max: u64) -> Result<Field> {
        if !arith::is_prime(p) {
            return Err(Error::parse(p.to_string(), "characteristic must be prime"));
        }
        if p > max {
            return Err(Error::parse(
                p.to_string(),
                format!("characteristic exceeds the configured bound {max}"),
            ));
        }
        Ok(Field::Function { p })
    }

    /// Parses `Q` or `F<p>t`.
    pub fn parse(s: &str) -> Result<Field> {
        let s = s.trim();
        if s == "Q" {
            return Ok(Field::Rational);
        }
        let digits = s
            .strip_prefix('F')
            .and_then(|r| r.strip_suffix('t'))
            .ok_or_else(|| Error::parse(s, "expected `Q` or `F<p>t`"))?;
        let p: u64 = digits
            .parse()
            .map_err(|_| Error::parse(digits, "expected a prime characteristic"))?;
        Field::function(p)
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            Field::Rational => 0,
            Field::Function { p } => *p,
        }
    }

    pub fn is_function(&self) -> bool {
        matches!(self, Field::Function { .. })
    }

    pub fn one(&self) -> FieldElement {
        self.integer(1)
    }

    pub fn integer(&self, n: i64) -> FieldElement {
        match *self {
            Field::Rational => FieldElement::Rational(Rational::integer(n as i128)),
            Field::Function { p } => FieldElement::Function(RationalFunction::from_poly(Poly::from_signed(p, &[n]))),
        }
    }

    pub fn minus_one(&self) -> FieldElement {
        self.integer(-1)
    }

    /// The variable `t` of a function field.
    pub fn t(&self) -> Result<FieldElement> {
        match *self {
            Field::Rational => Err(Error::FieldMismatch("Q has no variable t".into())),
            Field::Function { p } => Ok(FieldElement::Function(RationalFunction::from_poly(Poly::t(p)))),
        }
    }

    pub fn from_poly(&self, f: Poly) -> Result<FieldElement> {
        match *self {
            Field::Function { p } if f.characteristic() == p => {
                Ok(FieldElement::Function(RationalFunction::from_poly(f)))
            }
            _ => Err(Error::FieldMismatch(format!("{f} is not in {self}"))),
        }
    }

    pub fn contains(&self, u: &FieldElement) -> bool {
        u.field() == *self
    }

    pub fn check(&self, u: &FieldElement) -> Result<()> {
        if self.contains(u) {
            Ok(())
        } else {
            Err(Error::FieldMismatch(format!("{u} is not in {self}")))
        }
    }

    pub fn check_place(&self, place: &Place) -> Result<()> {
        let ok = match (self, place) {
            (Field::Rational, Place::Prime(_) | Place::Real) => true,
            (Field::Function { p }, Place::Finite(pi)) => pi.characteristic() == *p,
            (Field::Function { .. }, Place::Infinity) => true,
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::FieldMismatch(format!("place {place} is not a place of {self}")))
        }
    }

    pub fn parse_element(&self, s: &str) -> Result<FieldElement> {
        parse::parse_element(*self, s)
    }

    pub fn parse_place(&self, s: &str) -> Result<Place> {
        parse::parse_place(*self, s)
    }

    /// A generator of the torsion subgroup of `F^×`: `-1` over `Q`, a
    /// primitive root of `F_p` for `F_p(t)`.
    pub fn torsion_generator(&self) -> FieldElement {
        match *self {
            Field::Rational => self.minus_one(),
            Field::Function { p } => self.integer(arith::primitive_root(p) as i64),
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rational => write!(f, "Q"),
            Field::Function { p } => write!(f, "F{p}t"),
        }
    }
}

/// A rational function `num/den` over `F_p`, with `den` monic and coprime
/// to `num`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalFunction {
    num: Poly,
    den: Poly,
}

impl RationalFunction {
    pub fn from_poly(f: Poly) -> Self {
        let p = f.characteristic();
        RationalFunction {
            num: f,
            den: Poly::one(p),
        }
    }

    /// Returns `None` when the denominator is zero.
    pub fn new(num: Poly, den: Poly) -> Option<Self> {
        if den.is_zero() {
            return None;
        }
        let p = num.characteristic();
        if num.is_zero() {
            return Some(RationalFunction { num, den: Poly::one(p) });
        }
        let g = num.gcd(&den);
        let (n, d) = (num.exact_div(&g), den.exact_div(&g));
        let c = fp_inv(d.lc(), p);
        Some(RationalFunction {
            num: n.scale(c),
            den: d.scale(c),
        })
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    pub fn denom(&self) -> &Poly {
        &self.den
    }

    pub fn characteristic(&self) -> u64 {
        self.num.characteristic()
    }

    fn mul(&self, o: &Self) -> Self {
        RationalFunction::new(self.num.mul(&o.num), self.den.mul(&o.den)).expect("nonzero")
    }

    fn add(&self, o: &Self) -> Self {
        let num = self.num.mul(&o.den).add(&o.num.mul(&self.den));
        RationalFunction::new(num, self.den.mul(&o.den)).expect("nonzero")
    }

    fn inv(&self) -> Option<Self> {
        RationalFunction::new(self.den.clone(), self.num.clone())
    }

    fn neg(&self) -> Self {
        RationalFunction {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    /// Total degree `deg num + deg den`, used to bound parser output.
    pub fn size(&self) -> usize {
        self.num.deg() + self.den.deg()
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        let wrap = |p: &Poly| {
            if p.is_compound() {
                format!("({p})")
            } else {
                p.to_string()
            }
        };
        write!(f, "{}/{}", wrap(&self.num), wrap(&self.den))
    }
}

/// An element of a configured ground field.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FieldElement {
    Rational(Rational),
    Function(RationalFunction),
}

impl FieldElement {
    pub fn field(&self) -> Field {
        match self {
            FieldElement::Rational(_) => Field::Rational,
            FieldElement::Function(f) => Field::Function { p: f.characteristic() },
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            FieldElement::Rational(r) => r.is_zero(),
            FieldElement::Function(f) => f.num.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        *self == self.field().one()
    }

    pub fn try_mul(&self, o: &Self) -> Result<Self> {
        match (self, o) {
            (FieldElement::Rational(a), FieldElement::Rational(b)) => a
                .checked_mul(b)
                .map(FieldElement::Rational)
                .ok_or(Error::Overflow("rational product")),
            (FieldElement::Function(a), FieldElement::Function(b)) if a.characteristic() == b.characteristic() => {
                Ok(FieldElement::Function(a.mul(b)))
            }
            _ => Err(Error::FieldMismatch(format!("{self} * {o}"))),
        }
    }

    pub fn try_add(&self, o: &Self) -> Result<Self> {
        match (self, o) {
            (FieldElement::Rational(a), FieldElement::Rational(b)) => a
                .checked_add(b)
                .map(FieldElement::Rational)
                .ok_or(Error::Overflow("rational sum")),
            (FieldElement::Function(a), FieldElement::Function(b)) if a.characteristic() == b.characteristic() => {
                Ok(FieldElement::Function(a.add(b)))
            }
            _ => Err(Error::FieldMismatch(format!("{self} + {o}"))),
        }
    }

    pub fn try_inv(&self) -> Result<Self> {
        match self {
            FieldElement::Rational(a) => a.checked_inv().map(FieldElement::Rational).ok_or(Error::ZeroElement),
            FieldElement::Function(a) => a.inv().map(FieldElement::Function).ok_or(Error::ZeroElement),
        }
    }

    pub fn try_pow(&self, e: i64) -> Result<Self> {
        match self {
            FieldElement::Rational(a) => {
                if a.is_zero() && e < 0 {
                    return Err(Error::ZeroElement);
                }
                a.checked_pow(e)
                    .map(FieldElement::Rational)
                    .ok_or(Error::Overflow("rational power"))
            }
            FieldElement::Function(a) => {
                let base = if e < 0 {
                    a.inv().ok_or(Error::ZeroElement)?
                } else {
                    a.clone()
                };
                let k = e.unsigned_abs();
                Ok(FieldElement::Function(RationalFunction {
                    num: base.num.pow(k),
                    den: base.den.pow(k),
                }))
            }
        }
    }

    /// Product; panics on overflow or mixed fields.
    pub fn mul(&self, o: &Self) -> Self {
        self.try_mul(o).expect("field multiplication")
    }

    pub fn add(&self, o: &Self) -> Self {
        self.try_add(o).expect("field addition")
    }

    pub fn neg(&self) -> Self {
        match self {
            FieldElement::Rational(a) => FieldElement::Rational(a.checked_neg().expect("rational negation")),
            FieldElement::Function(a) => FieldElement::Function(a.neg()),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    /// Inverse; panics on zero.
    pub fn inv(&self) -> Self {
        self.try_inv().expect("inverse of zero")
    }

    pub fn div(&self, o: &Self) -> Self {
        self.mul(&o.inv())
    }

    pub fn pow(&self, e: i64) -> Self {
        self.try_pow(e).expect("field power")
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldElement::Rational(r) => write!(f, "{r}"),
            FieldElement::Function(r) => write!(f, "{r}"),
        }
    }
}

/// A place of a configured field.
///
/// Over `Q`: a prime `p:ℓ` (including `p:2`) or the real place. Over
/// `F_p(t)`: a monic irreducible polynomial or the degree place `inf`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Place {
    Prime(u64),
    Real,
    Finite(Poly),
    Infinity,
}

impl Place {
    pub fn is_archimedean(&self) -> bool {
        matches!(self, Place::Real)
    }

    /// Degree of the residue field over the prime field.
    pub fn degree(&self) -> usize {
        match self {
            Place::Finite(pi) => pi.deg(),
            _ => 1,
        }
    }

    pub fn residue_field(&self, field: Field) -> Result<ResidueField> {
        match (self, field) {
            (Place::Prime(l), Field::Rational) => Ok(ResidueField::prime(*l)),
            (Place::Finite(pi), Field::Function { p }) if pi.deg() == 1 => Ok(ResidueField::prime(p)),
            (Place::Finite(pi), Field::Function { .. }) => Ok(ResidueField::new(pi.clone())),
            (Place::Infinity, Field::Function { p }) => Ok(ResidueField::prime(p)),
            (Place::Real, _) => Err(Error::Archimedean(self.to_string())),
            _ => Err(Error::FieldMismatch(format!("place {self} is not a place of {field}"))),
        }
    }

    /// A uniformizer at a finite place (for `inf`, the element `1/t`).
    pub fn uniformizer(&self, field: Field) -> Result<FieldElement> {
        field.check_place(self)?;
        match self {
            Place::Prime(l) => Ok(field.integer(*l as i64)),
            Place::Finite(pi) => field.from_poly(pi.clone()),
            Place::Infinity => Ok(field.t()?.inv()),
            Place::Real => Err(Error::Archimedean(self.to_string())),
        }
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Prime(l) => write!(f, "p:{l}"),
            Place::Real => write!(f, "real"),
            Place::Finite(pi) => write!(f, "{pi}"),
            Place::Infinity => write!(f, "inf"),
        }
    }
}

fn multiplicity_int(mut n: i128, l: u64) -> (i64, i128) {
    let l = l as i128;
    let mut k = 0;
    while n != 0 && n % l == 0 {
        n /= l;
        k += 1;
    }
    (k, n)
}

/// Normalized discrete valuation of a nonzero element at a place.
pub fn valuation(u: &FieldElement, place: &Place) -> Result<i64> {
    if u.is_zero() {
        return Err(Error::ZeroElement);
    }
    u.field().check_place(place)?;
    match (u, place) {
        (FieldElement::Rational(r), Place::Prime(l)) => {
            Ok(multiplicity_int(r.numer(), *l).0 - multiplicity_int(r.denom(), *l).0)
        }
        (FieldElement::Function(f), Place::Finite(pi)) => {
            Ok(f.num.multiplicity(pi) as i64 - f.den.multiplicity(pi) as i64)
        }
        (FieldElement::Function(f), Place::Infinity) => Ok(f.den.deg() as i64 - f.num.deg() as i64),
        _ => Err(Error::Archimedean(place.to_string())),
    }
}

/// Residue of `u · ϖ^{-val(u)}` for the standard uniformizer `ϖ` of the place
/// (`ℓ`, `π`, or `1/t`).
pub fn unit_part_residue(u: &FieldElement, place: &Place) -> Result<ResidueElement> {
    if u.is_zero() {
        return Err(Error::ZeroElement);
    }
    let k = place.residue_field(u.field())?;
    match (u, place) {
        (FieldElement::Rational(r), Place::Prime(l)) => {
            let (_, n) = multiplicity_int(r.numer(), *l);
            let (_, d) = multiplicity_int(r.denom(), *l);
            let n = arith::reduce(n, *l);
            let d = arith::reduce(d, *l);
            Ok(k.constant(arith::mul_mod(n, fp_inv(d, *l), *l)))
        }
        (FieldElement::Function(f), Place::Finite(pi)) => {
            let strip = |g: &Poly| {
                let mut g = g.clone();
                loop {
                    let (q, r) = g.divrem(pi);
                    if !r.is_zero() {
                        return g;
                    }
                    g = q;
                }
            };
            let n = strip(&f.num).rem(pi);
            let d = strip(&f.den).rem(pi);
            let di = d.inv_mod(pi).expect("unit part is invertible");
            Ok(k.element(n.mul_mod(&di, pi)))
        }
        (FieldElement::Function(f), Place::Infinity) => {
            let p = f.characteristic();
            Ok(k.constant(arith::mul_mod(f.num.lc(), fp_inv(f.den.lc(), p), p)))
        }
        _ => Err(Error::Archimedean(place.to_string())),
    }
}

/// Image of a unit in the residue field of the place.
pub fn residue(u: &FieldElement, place: &Place) -> Result<ResidueElement> {
    let v = valuation(u, place)?;
    if v != 0 {
        return Err(Error::NotAUnit {
            element: u.to_string(),
            place: place.to_string(),
            valuation: v,
        });
    }
    unit_part_residue(u, place)
}

fn int_primes(n: i128) -> Result<Vec<(u64, u32)>> {
    let m =
        u64::try_from(n.unsigned_abs()).map_err(|_| Error::Unsupported(format!("factoring {n} exceeds 64 bits")))?;
    Ok(arith::factor_u64(m))
}

/// All places where `u` has nonzero valuation, sorted by place.
///
/// Over `Q` the real place is omitted (the sign is carried separately);
/// over `F_p(t)` the place at infinity is included.
pub fn places_of(u: &FieldElement) -> Result<Vec<(Place, i64)>> {
    if u.is_zero() {
        return Err(Error::ZeroElement);
    }
    let mut out = Vec::new();
    match u {
        FieldElement::Rational(r) => {
            for (l, e) in int_primes(r.numer())? {
                out.push((Place::Prime(l), e as i64));
            }
            for (l, e) in int_primes(r.denom())? {
                out.push((Place::Prime(l), -(e as i64)));
            }
        }
        FieldElement::Function(f) => {
            for (pi, e) in f.num.factor().1 {
                out.push((Place::Finite(pi), e as i64));
            }
            for (pi, e) in f.den.factor().1 {
                out.push((Place::Finite(pi), -(e as i64)));
            }
            let vinf = f.den.deg() as i64 - f.num.deg() as i64;
            if vinf != 0 {
                out.push((Place::Infinity, vinf));
            }
        }
    }
    out.sort();
    Ok(out)
}
