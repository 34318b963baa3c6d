//! Abelian coefficient groups for central extensions, and the
//! homomorphisms between them used for pushouts.

use std::fmt;

use crate::error::{Error, Result};
use crate::fields::{arith, places_of, residue, valuation, Field, FieldElement, Place, ResidueElement, ResidueField};
use crate::ktheory::tame_symbol;

/// Largest cyclic group in which discrete logarithms are found by search.
const DLOG_LIMIT: u64 = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum CoefficientGroup {
    /// The multiplicative group `F^×`.
    Units(Field),
    /// The additive integers.
    Integers,
    /// The residue multiplicative group `f(P)^×`.
    ResidueUnits { field: Field, place: Place },
    /// `μ₂ = {±1}`.
    Mu2,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Coefficient {
    Unit(FieldElement),
    Int(i64),
    Residue(ResidueElement),
    Sign(i8),
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficient::Unit(u) => write!(f, "{u}"),
            Coefficient::Int(n) => write!(f, "{n}"),
            Coefficient::Residue(r) => write!(f, "{r}"),
            Coefficient::Sign(s) => write!(f, "{s}"),
        }
    }
}

impl fmt::Display for CoefficientGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoefficientGroup::Units(field) => write!(f, "{field}^×"),
            CoefficientGroup::Integers => write!(f, "Z"),
            CoefficientGroup::ResidueUnits { place, .. } => write!(f, "f({place})^×"),
            CoefficientGroup::Mu2 => write!(f, "μ2"),
        }
    }
}

fn dlog_constant(c: u64, g: u64, p: u64) -> Result<i64> {
    if p > DLOG_LIMIT {
        return Err(Error::Unsupported(format!("discrete logarithm in F_{p}")));
    }
    let mut x = 1u64;
    for k in 0..p - 1 {
        if x == c {
            return Ok(k as i64);
        }
        x = arith::mul_mod(x, g, p);
    }
    Err(Error::Internal(format!("{c} is not a power of {g} mod {p}")))
}

impl CoefficientGroup {
    pub fn residue_field(&self) -> Result<ResidueField> {
        match self {
            CoefficientGroup::ResidueUnits { field, place } => place.residue_field(*field),
            _ => Err(Error::CoefficientMismatch(format!("{self} is not a residue group"))),
        }
    }

    pub fn contains(&self, a: &Coefficient) -> bool {
        match (self, a) {
            (CoefficientGroup::Units(f), Coefficient::Unit(u)) => f.contains(u) && !u.is_zero(),
            (CoefficientGroup::Integers, Coefficient::Int(_)) => true,
            (CoefficientGroup::ResidueUnits { .. }, Coefficient::Residue(r)) => {
                self.residue_field().is_ok_and(|k| k == *r.field()) && !r.is_zero()
            }
            (CoefficientGroup::Mu2, Coefficient::Sign(s)) => *s == 1 || *s == -1,
            _ => false,
        }
    }

    pub fn check(&self, a: &Coefficient) -> Result<()> {
        if self.contains(a) {
            Ok(())
        } else {
            Err(Error::CoefficientMismatch(format!("{a} is not an element of {self}")))
        }
    }

    pub fn identity(&self) -> Coefficient {
        match self {
            CoefficientGroup::Units(f) => Coefficient::Unit(f.one()),
            CoefficientGroup::Integers => Coefficient::Int(0),
            CoefficientGroup::ResidueUnits { .. } => {
                Coefficient::Residue(self.residue_field().expect("valid residue group").one())
            }
            CoefficientGroup::Mu2 => Coefficient::Sign(1),
        }
    }

    pub fn is_identity(&self, a: &Coefficient) -> bool {
        *a == self.identity()
    }

    pub fn op(&self, a: &Coefficient, b: &Coefficient) -> Result<Coefficient> {
        match (a, b) {
            (Coefficient::Unit(x), Coefficient::Unit(y)) => Ok(Coefficient::Unit(x.try_mul(y)?)),
            (Coefficient::Int(x), Coefficient::Int(y)) => x
                .checked_add(*y)
                .map(Coefficient::Int)
                .ok_or(Error::Overflow("integer coefficient")),
            (Coefficient::Residue(x), Coefficient::Residue(y)) if x.field() == y.field() => {
                Ok(Coefficient::Residue(x.mul(y)))
            }
            (Coefficient::Sign(x), Coefficient::Sign(y)) => Ok(Coefficient::Sign(x * y)),
            _ => Err(Error::CoefficientMismatch(format!("{a} and {b}"))),
        }
    }

    pub fn inverse(&self, a: &Coefficient) -> Result<Coefficient> {
        self.pow(a, -1)
    }

    pub fn pow(&self, a: &Coefficient, k: i64) -> Result<Coefficient> {
        match a {
            Coefficient::Unit(x) => {
                if let Some(ord) = self.order(a) {
                    return Ok(Coefficient::Unit(x.try_pow(k.rem_euclid(ord as i64))?));
                }
                Ok(Coefficient::Unit(x.try_pow(k)?))
            }
            Coefficient::Int(x) => x
                .checked_mul(k)
                .map(Coefficient::Int)
                .ok_or(Error::Overflow("integer coefficient")),
            Coefficient::Residue(x) => Ok(Coefficient::Residue(x.pow(k))),
            Coefficient::Sign(s) => Ok(Coefficient::Sign(if k % 2 == 0 { 1 } else { *s })),
        }
    }

    /// Product `Π aᵢ^{kᵢ}`.
    pub fn product<'a>(&self, factors: impl IntoIterator<Item = (&'a Coefficient, i64)>) -> Result<Coefficient> {
        let mut acc = self.identity();
        for (a, k) in factors {
            if k != 0 {
                acc = self.op(&acc, &self.pow(a, k)?)?;
            }
        }
        Ok(acc)
    }

    /// Multiplicative order, `None` for elements of infinite order.
    pub fn order(&self, a: &Coefficient) -> Option<u64> {
        match a {
            Coefficient::Unit(FieldElement::Rational(r)) => match (r.numer(), r.denom()) {
                (1, 1) => Some(1),
                (-1, 1) => Some(2),
                _ => None,
            },
            Coefficient::Unit(FieldElement::Function(f)) => {
                if f.numer().is_constant() && f.denom().is_one() {
                    let p = f.characteristic();
                    Some(arith::order_mod_prime(f.numer().coeff(0), p))
                } else {
                    None
                }
            }
            Coefficient::Int(0) => Some(1),
            Coefficient::Int(_) => None,
            Coefficient::Residue(r) => r.order(),
            Coefficient::Sign(s) => Some(if *s == 1 { 1 } else { 2 }),
        }
    }

    /// The fixed generator of the torsion (or cyclic) part of the group, with
    /// its order. `None` when that part is trivial.
    pub fn torsion_generator(&self) -> Result<Option<(Coefficient, u64)>> {
        Ok(match self {
            CoefficientGroup::Units(Field::Rational) => Some((Coefficient::Unit(Field::Rational.minus_one()), 2)),
            CoefficientGroup::Units(f @ Field::Function { p }) => {
                (*p > 2).then(|| (Coefficient::Unit(f.torsion_generator()), p - 1))
            }
            CoefficientGroup::Integers => None,
            CoefficientGroup::ResidueUnits { .. } => {
                let k = self.residue_field()?;
                let n = k
                    .size()
                    .ok_or_else(|| Error::Unsupported("residue field too large".into()))?
                    - 1;
                if n > DLOG_LIMIT {
                    return Err(Error::Unsupported(format!(
                        "discrete logarithm in a group of order {n}"
                    )));
                }
                (n > 1).then(|| (Coefficient::Residue(k.generator().expect("finite field")), n))
            }
            CoefficientGroup::Mu2 => Some((Coefficient::Sign(-1), 2)),
        })
    }

    /// Writes `a` as a product of canonical, independent generators:
    /// the torsion generator (exponent reduced modulo its order) and, for
    /// `F^×` and `Z`, free generators (primes, monic irreducibles, or `1`).
    pub fn decompose(&self, a: &Coefficient) -> Result<Vec<(Coefficient, i64)>> {
        self.check(a)?;
        let mut out = Vec::new();
        match (self, a) {
            (CoefficientGroup::Integers, Coefficient::Int(n)) => {
                if *n != 0 {
                    out.push((Coefficient::Int(1), *n));
                }
            }
            (CoefficientGroup::Mu2, Coefficient::Sign(s)) => {
                if *s == -1 {
                    out.push((Coefficient::Sign(-1), 1));
                }
            }
            (CoefficientGroup::ResidueUnits { .. }, Coefficient::Residue(r)) => {
                if let Some((Coefficient::Residue(g), n)) = self.torsion_generator()? {
                    let mut x = g.field().one();
                    for k in 0..n {
                        if x == *r {
                            if k > 0 {
                                out.push((Coefficient::Residue(g.clone()), k as i64));
                            }
                            break;
                        }
                        x = x.mul(&g);
                    }
                }
            }
            (CoefficientGroup::Units(field), Coefficient::Unit(u)) => {
                let mut rest = u.clone();
                for (place, e) in places_of(u)? {
                    let pi = match &place {
                        Place::Infinity => continue,
                        _ => place.uniformizer(*field)?,
                    };
                    rest = rest.mul(&pi.pow(-e));
                    out.push((Coefficient::Unit(pi), e));
                }
                if let Some((g, n)) = self.torsion_generator()? {
                    let k = match (&rest, &g) {
                        (FieldElement::Rational(r), _) => i64::from(r.signum() < 0),
                        (FieldElement::Function(f), Coefficient::Unit(FieldElement::Function(gf))) => {
                            let p = f.characteristic();
                            dlog_constant(f.numer().coeff(0), gf.numer().coeff(0), p)?
                        }
                        _ => unreachable!(),
                    };
                    if k.rem_euclid(n as i64) != 0 {
                        out.push((g, k));
                    }
                }
                out.sort();
            }
            _ => unreachable!("checked above"),
        }
        Ok(out)
    }
}

/// A homomorphism between coefficient groups along which extensions are
/// pushed out.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoefficientHom {
    /// `val_P : F^× → Z`.
    Valuation(Place),
    /// Reduction of units `O_P^× → f(P)^×`; undefined on non-units.
    Residue(Place),
    /// `μ₂ → F^×`.
    IncludeSign(Field),
    /// `a ↦ ∂_P{a, partner}` from `F^×` to `f(P)^×`.
    Tame { place: Place, partner: FieldElement },
}

impl CoefficientHom {
    pub fn source(&self, current: &CoefficientGroup) -> Result<()> {
        let ok = match (self, current) {
            (CoefficientHom::IncludeSign(_), CoefficientGroup::Mu2) => true,
            (CoefficientHom::IncludeSign(_), _) => false,
            (_, CoefficientGroup::Units(f)) => f.check_place(self.place().expect("place")).is_ok(),
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::CoefficientMismatch(format!(
                "cannot push {current} along {self:?}"
            )))
        }
    }

    fn place(&self) -> Option<&Place> {
        match self {
            CoefficientHom::Valuation(p) | CoefficientHom::Residue(p) => Some(p),
            CoefficientHom::Tame { place, .. } => Some(place),
            CoefficientHom::IncludeSign(_) => None,
        }
    }

    pub fn target(&self, source: &CoefficientGroup) -> Result<CoefficientGroup> {
        self.source(source)?;
        Ok(match (self, source) {
            (CoefficientHom::Valuation(_), _) => CoefficientGroup::Integers,
            (CoefficientHom::Residue(place) | CoefficientHom::Tame { place, .. }, CoefficientGroup::Units(f)) => {
                CoefficientGroup::ResidueUnits {
                    field: *f,
                    place: place.clone(),
                }
            }
            (CoefficientHom::IncludeSign(f), _) => CoefficientGroup::Units(*f),
            _ => unreachable!(),
        })
    }

    pub fn apply(&self, a: &Coefficient) -> Result<Coefficient> {
        match (self, a) {
            (CoefficientHom::Valuation(place), Coefficient::Unit(u)) => {
                if place.is_archimedean() {
                    return Err(Error::Archimedean(place.to_string()));
                }
                Ok(Coefficient::Int(valuation(u, place)?))
            }
            (CoefficientHom::Residue(place), Coefficient::Unit(u)) => {
                residue(u, place).map(Coefficient::Residue).map_err(|e| match e {
                    Error::NotAUnit { .. } => Error::UndefinedHom(format!("residue of {u} at {place}")),
                    other => other,
                })
            }
            (CoefficientHom::Tame { place, partner }, Coefficient::Unit(u)) => {
                Ok(Coefficient::Residue(tame_symbol(u, partner, place)?))
            }
            (CoefficientHom::IncludeSign(f), Coefficient::Sign(s)) => Ok(Coefficient::Unit(f.integer(*s as i64))),
            _ => Err(Error::CoefficientMismatch(format!("{self:?} applied to {a}"))),
        }
    }
}
