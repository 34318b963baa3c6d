//! `K₂` of the ground fields through tame-symbol coordinates.
//!
//! A class in `K₂(F)` is presented by a [`SymbolExpression`] and compared
//! through its [`K2Coordinates`]: the tame symbols at all finite places
//! (odd primes over `Q`), plus the 2-adic and real Hilbert symbols over `Q`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::fields::{places_of, unit_part_residue, valuation, Field, FieldElement, Place, ResidueElement};

/// A finite product `Π {u, v}^e` of Steinberg symbols.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolExpression {
    field: Field,
    terms: Vec<(FieldElement, FieldElement, i64)>,
}

impl SymbolExpression {
    /// The identity class.
    pub fn identity(field: Field) -> Self {
        SymbolExpression {
            field,
            terms: Vec::new(),
        }
    }

    pub fn symbol(u: &FieldElement, v: &FieldElement) -> Result<Self> {
        let mut s = SymbolExpression::identity(u.field());
        s.push(u, v, 1)?;
        Ok(s)
    }

    pub fn push(&mut self, u: &FieldElement, v: &FieldElement, e: i64) -> Result<()> {
        self.field.check(u)?;
        self.field.check(v)?;
        if u.is_zero() || v.is_zero() {
            return Err(Error::ZeroElement);
        }
        if e != 0 {
            self.terms.push((u.clone(), v.clone(), e));
        }
        Ok(())
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn terms(&self) -> &[(FieldElement, FieldElement, i64)] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn mul(&self, o: &SymbolExpression) -> Result<Self> {
        if self.field != o.field {
            return Err(Error::FieldMismatch(format!("{} vs {}", self.field, o.field)));
        }
        let mut terms = self.terms.clone();
        terms.extend(o.terms.iter().cloned());
        Ok(SymbolExpression {
            field: self.field,
            terms,
        })
    }

    pub fn pow(&self, k: i64) -> Self {
        let terms = if k == 0 {
            Vec::new()
        } else {
            self.terms
                .iter()
                .map(|(u, v, e)| (u.clone(), v.clone(), e * k))
                .collect()
        };
        SymbolExpression {
            field: self.field,
            terms,
        }
    }

    pub fn inv(&self) -> Self {
        self.pow(-1)
    }
}

impl fmt::Display for SymbolExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "1");
        }
        for (i, (u, v, e)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, "·")?;
            }
            write!(f, "{{{u}, {v}}}")?;
            if *e != 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

/// Coordinates of a `K₂` class.
///
/// `tame` never stores the identity. Over `F_p(t)` the sign slots are
/// always `+1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct K2Coordinates {
    field: Field,
    tame: BTreeMap<Place, ResidueElement>,
    sign2: i8,
    sign_real: i8,
}

impl K2Coordinates {
    pub fn identity(field: Field) -> Self {
        K2Coordinates {
            field,
            tame: BTreeMap::new(),
            sign2: 1,
            sign_real: 1,
        }
    }

    /// Builds coordinates from explicit tame values; identities are dropped.
    pub fn from_tame(field: Field, values: impl IntoIterator<Item = (Place, ResidueElement)>) -> Result<Self> {
        let mut c = K2Coordinates::identity(field);
        for (place, r) in values {
            field.check_place(&place)?;
            if place.residue_field(field)? != *r.field() {
                return Err(Error::FieldMismatch(format!("{r} is not a residue at {place}")));
            }
            if r.is_zero() {
                return Err(Error::ZeroElement);
            }
            c.scale(place, &r);
        }
        Ok(c)
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn tame(&self) -> &BTreeMap<Place, ResidueElement> {
        &self.tame
    }

    /// The tame coordinate at a place (the identity off the support).
    pub fn at(&self, place: &Place) -> Result<ResidueElement> {
        match self.tame.get(place) {
            Some(r) => Ok(r.clone()),
            None => Ok(place.residue_field(self.field)?.one()),
        }
    }

    pub fn sign2(&self) -> i8 {
        self.sign2
    }

    pub fn sign_real(&self) -> i8 {
        self.sign_real
    }

    pub fn is_trivial(&self) -> bool {
        self.tame.is_empty() && self.sign2 == 1 && self.sign_real == 1
    }

    fn scale(&mut self, place: Place, r: &ResidueElement) {
        if r.is_one() {
            return;
        }
        let next = match self.tame.remove(&place) {
            Some(old) => old.mul(r),
            None => r.clone(),
        };
        if !next.is_one() {
            self.tame.insert(place, next);
        }
    }

    pub fn mul(&self, o: &K2Coordinates) -> K2Coordinates {
        assert_eq!(self.field, o.field, "coordinate field mismatch");
        let mut out = self.clone();
        for (place, r) in &o.tame {
            out.scale(place.clone(), r);
        }
        out.sign2 *= o.sign2;
        out.sign_real *= o.sign_real;
        out
    }

    pub fn inv(&self) -> K2Coordinates {
        K2Coordinates {
            field: self.field,
            tame: self.tame.iter().map(|(p, r)| (p.clone(), r.inv())).collect(),
            sign2: self.sign2,
            sign_real: self.sign_real,
        }
    }

    pub fn pow(&self, k: i64) -> K2Coordinates {
        let mut out = K2Coordinates::identity(self.field);
        for (place, r) in &self.tame {
            out.scale(place.clone(), &r.pow(k));
        }
        if k % 2 != 0 {
            out.sign2 = self.sign2;
            out.sign_real = self.sign_real;
        }
        out
    }
}

fn neg_one_pow(k: i64) -> i64 {
    if k.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// The tame symbol `∂_P{u, v} = (-1)^{ab} · (u^b v^{-a})(P)` with
/// `a = val_P(u)` and `b = val_P(v)`.
///
/// For a unit `u` this gives `∂{u, v} = ū^{val(v)}`.
pub fn tame_symbol(u: &FieldElement, v: &FieldElement, place: &Place) -> Result<ResidueElement> {
    if u.field() != v.field() {
        return Err(Error::FieldMismatch(format!("{u} and {v}")));
    }
    if place.is_archimedean() {
        return Err(Error::Archimedean(place.to_string()));
    }
    let a = valuation(u, place)?;
    let b = valuation(v, place)?;
    let u0 = unit_part_residue(u, place)?;
    let v0 = unit_part_residue(v, place)?;
    let mut r = u0.pow(b).mul(&v0.pow(-a));
    if a & b & 1 == 1 {
        r = r.mul(&r.field().constant(r.field().characteristic() - 1));
    }
    Ok(r)
}

fn odd_unit_mod8(r: &crate::fields::Rational) -> i64 {
    let n = r.numer().rem_euclid(8);
    let d = r.denom().rem_euclid(8);
    ((n * d) % 8) as i64
}

/// Hilbert symbol `(u, v)_P ∈ {±1}` over `Q` at a prime or the real place.
pub fn hilbert_symbol(u: &FieldElement, v: &FieldElement, place: &Place) -> Result<i8> {
    let (FieldElement::Rational(x), FieldElement::Rational(y)) = (u, v) else {
        return Err(Error::FieldMismatch("Hilbert symbols are defined over Q".into()));
    };
    if x.is_zero() || y.is_zero() {
        return Err(Error::ZeroElement);
    }
    match place {
        Place::Real => Ok(if x.signum() < 0 && y.signum() < 0 { -1 } else { 1 }),
        Place::Prime(2) => {
            let alpha = valuation(u, place)?;
            let beta = valuation(v, place)?;
            let two = FieldElement::Rational(crate::fields::Rational::integer(2));
            let xu = u.mul(&two.pow(-alpha));
            let yv = v.mul(&two.pow(-beta));
            let (FieldElement::Rational(xu), FieldElement::Rational(yv)) = (xu, yv) else {
                unreachable!()
            };
            let a = odd_unit_mod8(&xu);
            let b = odd_unit_mod8(&yv);
            let eps = |z: i64| ((z - 1) / 2) & 1;
            let omega = |z: i64| ((z * z - 1) / 8) & 1;
            let e = eps(a) * eps(b) + alpha * omega(b) + beta * omega(a);
            Ok(neg_one_pow(e) as i8)
        }
        Place::Prime(l) => {
            let t = tame_symbol(u, v, place)?;
            let c = t.as_constant().expect("prime residue field");
            let legendre = crate::fields::arith::pow_mod(c, (l - 1) / 2, *l);
            Ok(if legendre == 1 { 1 } else { -1 })
        }
        _ => Err(Error::FieldMismatch(format!("{place} is not a place of Q"))),
    }
}

fn support(u: &FieldElement, v: &FieldElement) -> Result<BTreeSet<Place>> {
    let mut s: BTreeSet<Place> = places_of(u)?.into_iter().map(|(p, _)| p).collect();
    s.extend(places_of(v)?.into_iter().map(|(p, _)| p));
    Ok(s)
}

/// Coordinates of a single symbol `{u, v}`.
pub fn symbol_coordinates(u: &FieldElement, v: &FieldElement) -> Result<K2Coordinates> {
    let field = u.field();
    field.check(v)?;
    let mut c = K2Coordinates::identity(field);
    for place in support(u, v)? {
        if place == Place::Prime(2) {
            continue;
        }
        let r = tame_symbol(u, v, &place)?;
        c.scale(place, &r);
    }
    if field == Field::Rational {
        c.sign2 = hilbert_symbol(u, v, &Place::Prime(2))?;
        c.sign_real = hilbert_symbol(u, v, &Place::Real)?;
    }
    Ok(c)
}

pub fn k2_coordinates(sym: &SymbolExpression) -> Result<K2Coordinates> {
    let mut c = K2Coordinates::identity(sym.field);
    for (u, v, e) in &sym.terms {
        c = c.mul(&symbol_coordinates(u, v)?.pow(*e));
    }
    Ok(c)
}

pub fn is_trivial(sym: &SymbolExpression) -> Result<bool> {
    Ok(k2_coordinates(sym)?.is_trivial())
}

/// Whether every tame coordinate outside `s` is trivial, i.e. the class
/// comes from `K₂` of the ring of `S`-integers.
pub fn is_integral(sym: &SymbolExpression, s: &BTreeSet<Place>) -> Result<bool> {
    Ok(k2_coordinates(sym)?.tame.keys().all(|p| s.contains(p)))
}

fn lift_unit(field: Field, place: &Place, r: &ResidueElement) -> Result<FieldElement> {
    let w = r.inv();
    match place {
        Place::Prime(_) => Ok(field.integer(w.as_constant().expect("prime residue") as i64)),
        Place::Finite(_) => field.from_poly(w.value().clone()),
        _ => Err(Error::Internal(format!("cannot lift at {place}"))),
    }
}

/// Finds a symbol expression whose tame coordinates outside `s` equal
/// `target`.
///
/// Places are corrected from the largest residue degree (or prime) down:
/// the symbol `{ϖ, u}` with `u` the reduced lift of `r⁻¹` has coordinate `r`
/// at `ϖ` and only disturbs places of smaller size.
pub fn lift_residues(target: &K2Coordinates, s: &BTreeSet<Place>) -> Result<SymbolExpression> {
    let field = target.field;
    if field.is_function() && !s.contains(&Place::Infinity) {
        return Err(Error::Unsupported("lifting over F_p(t) requires inf in S".into()));
    }
    if let Some(p) = target.tame.keys().find(|p| s.contains(p)) {
        return Err(Error::Unsupported(format!(
            "target is supported at {p}, which lies in S"
        )));
    }
    let size = |p: &Place| match p {
        Place::Prime(l) => *l,
        Place::Finite(pi) => pi.deg() as u64,
        _ => 0,
    };
    let mut expr = SymbolExpression::identity(field);
    let mut current = K2Coordinates::identity(field);
    loop {
        let mut worst: Option<(Place, ResidueElement)> = None;
        let mut places: BTreeSet<&Place> = target.tame.keys().collect();
        places.extend(current.tame.keys());
        for place in places {
            if s.contains(place) || *place == Place::Prime(2) {
                continue;
            }
            let want = target.at(place)?;
            let have = current.at(place)?;
            let gap = want.mul(&have.inv());
            if gap.is_one() {
                continue;
            }
            if worst.as_ref().is_none_or(|(w, _)| size(place) > size(w)) {
                worst = Some((place.clone(), gap));
            }
        }
        let Some((place, gap)) = worst else {
            return Ok(expr);
        };
        let pi = place.uniformizer(field)?;
        let u = lift_unit(field, &place, &gap)?;
        current = current.mul(&symbol_coordinates(&pi, &u)?);
        expr.push(&pi, &u, 1)?;
    }
}

/// Global reciprocity for `{u, v}`: the product over all places of the
/// norms of tame symbols (function fields) or of Hilbert symbols (`Q`) is 1.
pub fn reciprocity_check(u: &FieldElement, v: &FieldElement) -> Result<bool> {
    let field = u.field();
    field.check(v)?;
    match field {
        Field::Function { p } => {
            let mut prod = 1u64;
            for place in support(u, v)? {
                let n = tame_symbol(u, v, &place)?.norm();
                prod = crate::fields::arith::mul_mod(prod, n, p);
            }
            Ok(prod == 1)
        }
        Field::Rational => {
            let mut places = support(u, v)?;
            places.insert(Place::Prime(2));
            places.insert(Place::Real);
            let mut prod = 1i8;
            for place in places {
                prod *= hilbert_symbol(u, v, &place)?;
            }
            Ok(prod == 1)
        }
    }
}
