use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::extensions::{Coefficient, CoefficientGroup, MonomialCochain, QuadraticFunction};
use crate::fields::{Field, FieldElement};
use crate::ktheory::{k2_coordinates, SymbolExpression};
use crate::lattice::{pairing, BilinearIncarnation, IntMatrix};

/// A point `(t, κ)` of an incarnated torus extension: `t ∈ Y ⊗ F^× = (F^×)ⁿ`
/// in the coordinates `x_i(t)`, and `κ ∈ K₂(F)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorusPoint {
    pub coords: Vec<FieldElement>,
    pub kappa: SymbolExpression,
}

fn product_symbol(m: &IntMatrix, s: &[FieldElement], t: &[FieldElement], field: Field) -> Result<SymbolExpression> {
    let mut acc = SymbolExpression::identity(field);
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if m[(i, j)] != 0 {
                acc.push(&s[i], &t[j], m[(i, j)])?;
            }
        }
    }
    Ok(acc)
}

/// The extension `T′_C` of the split torus with character lattice `X` by
/// `K₂`, with group law
/// `(s, α)(t, β) = (st, αβ · Π {x_i(s), x_j(t)}^{c_ij})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IncarnatedTorusExtension {
    c: BilinearIncarnation,
    field: Field,
}

pub fn incarnate(c: &BilinearIncarnation, field: Field) -> IncarnatedTorusExtension {
    IncarnatedTorusExtension { c: c.clone(), field }
}

impl IncarnatedTorusExtension {
    pub fn incarnation(&self) -> &BilinearIncarnation {
        &self.c
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn rank(&self) -> usize {
        self.c.rank()
    }

    pub fn point(&self, coords: Vec<FieldElement>, kappa: SymbolExpression) -> Result<TorusPoint> {
        if coords.len() != self.rank() {
            return Err(Error::DimensionMismatch(format!(
                "{} torus coordinates for rank {}",
                coords.len(),
                self.rank()
            )));
        }
        for u in &coords {
            self.field.check(u)?;
            if u.is_zero() {
                return Err(Error::ZeroElement);
            }
        }
        if kappa.field() != self.field {
            return Err(Error::FieldMismatch(format!(
                "symbol over {} in {}",
                kappa.field(),
                self.field
            )));
        }
        Ok(TorusPoint { coords, kappa })
    }

    pub fn identity(&self) -> TorusPoint {
        TorusPoint {
            coords: vec![self.field.one(); self.rank()],
            kappa: SymbolExpression::identity(self.field),
        }
    }

    /// The image `u^y = y(u)` of `u` under the cocharacter `y`, with `κ = 1`.
    pub fn cocharacter_point(&self, u: &FieldElement, y: &[i64]) -> Result<TorusPoint> {
        if y.len() != self.rank() {
            return Err(Error::DimensionMismatch(format!("cocharacter of length {}", y.len())));
        }
        let coords = y.iter().map(|&k| u.try_pow(k)).collect::<Result<_>>()?;
        self.point(coords, SymbolExpression::identity(self.field))
    }

    /// `Π {x_i(s), x_j(t)}^{c_ij}`.
    pub fn cocycle(&self, s: &[FieldElement], t: &[FieldElement]) -> Result<SymbolExpression> {
        product_symbol(self.c.matrix(), s, t, self.field)
    }

    pub fn multiply(&self, a: &TorusPoint, b: &TorusPoint) -> Result<TorusPoint> {
        let coords = a
            .coords
            .iter()
            .zip(&b.coords)
            .map(|(x, y)| x.try_mul(y))
            .collect::<Result<_>>()?;
        let kappa = a.kappa.mul(&b.kappa)?.mul(&self.cocycle(&a.coords, &b.coords)?)?;
        Ok(TorusPoint { coords, kappa })
    }

    pub fn inverse(&self, a: &TorusPoint) -> Result<TorusPoint> {
        let coords = a.coords.iter().map(|x| x.try_inv()).collect::<Result<_>>()?;
        let kappa = a.kappa.inv().mul(&self.cocycle(&a.coords, &a.coords)?)?;
        Ok(TorusPoint { coords, kappa })
    }

    /// `a b a⁻¹ b⁻¹`.
    pub fn commutator(&self, a: &TorusPoint, b: &TorusPoint) -> Result<TorusPoint> {
        let ab = self.multiply(a, b)?;
        let ab_ai = self.multiply(&ab, &self.inverse(a)?)?;
        self.multiply(&ab_ai, &self.inverse(b)?)
    }

    /// Equality of points, deciding the `K₂` parts by their coordinates.
    pub fn points_equal(&self, a: &TorusPoint, b: &TorusPoint) -> Result<bool> {
        if a.coords != b.coords {
            return Ok(false);
        }
        Ok(k2_coordinates(&a.kappa.mul(&b.kappa.inv())?)?.is_trivial())
    }
}

/// Checks `[u₁^{y₁}, u₂^{y₂}] = {u₁, u₂}^{B_Q(y₁, y₂)}` with `Q(y) = C(y, y)`.
pub fn torus_commutator_check(
    c: &BilinearIncarnation,
    field: Field,
    y1: &[i64],
    y2: &[i64],
    u1: &FieldElement,
    u2: &FieldElement,
) -> Result<bool> {
    let t = incarnate(c, field);
    let a = t.cocharacter_point(u1, y1)?;
    let b = t.cocharacter_point(u2, y2)?;
    let comm = t.commutator(&a, &b)?;
    if comm.coords.iter().any(|x| !x.is_one()) {
        return Ok(false);
    }
    let b_q = c.eval(y1, y2) + c.eval(y2, y1);
    let expected = SymbolExpression::symbol(u1, u2)?.pow(b_q);
    Ok(k2_coordinates(&comm.kappa)? == k2_coordinates(&expected)?)
}

/// The automorphism `α_{x⊗s}` attached to a character `x` and `s ∈ F^×`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorusAutomorphism {
    x: Vec<i64>,
    s: FieldElement,
}

pub fn torus_automorphism(x: Vec<i64>, s: FieldElement) -> Result<TorusAutomorphism> {
    if s.is_zero() {
        return Err(Error::ZeroElement);
    }
    Ok(TorusAutomorphism { x, s })
}

impl TorusAutomorphism {
    pub fn character(&self) -> &[i64] {
        &self.x
    }

    pub fn scalar(&self) -> &FieldElement {
        &self.s
    }

    /// `x(t) = Π x_i(t)^{x_i}`.
    fn evaluate_character(&self, t: &[FieldElement]) -> Result<FieldElement> {
        let mut acc = self.s.field().one();
        for (u, &k) in t.iter().zip(&self.x) {
            acc = acc.try_mul(&u.try_pow(k)?)?;
        }
        Ok(acc)
    }

    /// `(t, κ) ↦ (t, κ · {x(t), s})`.
    pub fn apply_point(&self, p: &TorusPoint) -> Result<TorusPoint> {
        if p.coords.len() != self.x.len() {
            return Err(Error::DimensionMismatch("character and point of different rank".into()));
        }
        let xt = self.evaluate_character(&p.coords)?;
        Ok(TorusPoint {
            coords: p.coords.clone(),
            kappa: p.kappa.mul(&SymbolExpression::symbol(&xt, &self.s)?)?,
        })
    }

    /// The cochain `y ↦ s^{⟨x, y⟩}` by which the automorphism acts on `D_C`.
    pub fn on_d(&self) -> Result<MonomialCochain> {
        let field = self.s.field();
        MonomialCochain::new(
            crate::lattice::Lattice::new(self.x.len(), "Y"),
            CoefficientGroup::Units(field),
            vec![(
                Coefficient::Unit(self.s.clone()),
                QuadraticFunction::linear(self.x.clone()),
            )],
        )
    }

    /// `(y, u) ↦ (y, u · s^{⟨x, y⟩})`.
    pub fn apply_d(&self, y: &[i64], u: &FieldElement) -> Result<FieldElement> {
        u.try_mul(&self.s.try_pow(pairing(&self.x, y))?)
    }
}

/// An isomorphism `T′_{C₀} → T′_C` when `A = C − C₀` is alternating.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IncarnationIso {
    upper: IntMatrix,
    field: Field,
}

/// `(t, κ) ↦ (t, κ · Π_{i<j} {x_i(t), x_j(t)}^{a_ij})`, defined when
/// `A(y, y) = 0` for all `y`.
pub fn incarnation_iso(
    c: &BilinearIncarnation,
    c0: &BilinearIncarnation,
    field: Field,
) -> Result<Option<IncarnationIso>> {
    let a = c.sub(c0)?;
    if !a.is_alternating() {
        return Ok(None);
    }
    let n = a.rank();
    let upper = DMatrix::from_fn(n, n, |i, j| if i < j { a.entry(i, j) } else { 0 });
    Ok(Some(IncarnationIso { upper, field }))
}

impl IncarnationIso {
    /// The strictly upper part of `A`.
    pub fn exponents(&self) -> &IntMatrix {
        &self.upper
    }

    pub fn apply(&self, p: &TorusPoint) -> Result<TorusPoint> {
        let twist = product_symbol(&self.upper, &p.coords, &p.coords, self.field)?;
        Ok(TorusPoint {
            coords: p.coords.clone(),
            kappa: p.kappa.mul(&twist)?,
        })
    }

    /// The induced isomorphism `D_{C₀} → D_C`, `ψ(y) = (−1)^{Σ_{i<j} a_ij y_i y_j}`.
    pub fn on_d(&self) -> Result<MonomialCochain> {
        let n = self.upper.nrows();
        let sym = DMatrix::from_fn(n, n, |i, j| self.upper[(i.min(j), i.max(j))]);
        MonomialCochain::new(
            crate::lattice::Lattice::new(n, "Y"),
            CoefficientGroup::Units(self.field),
            vec![(
                Coefficient::Unit(self.field.minus_one()),
                QuadraticFunction::new(sym, vec![0; n])?,
            )],
        )
    }
}
