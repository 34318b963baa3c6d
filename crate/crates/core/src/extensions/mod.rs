//! Central extensions of a lattice by an abelian group, presented by
//! monomial 2-cocycles `σ(y₁, y₂) = Π a^{B(y₁, y₂)}`.

mod coeff;
mod quadratic;

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;

pub use coeff::{Coefficient, CoefficientGroup, CoefficientHom};
pub use quadratic::QuadraticFunction;

use crate::error::{Error, Result};
use crate::lattice::{IntMatrix, Lattice, LatticeMap};

fn bilinear(b: &IntMatrix, y1: &[i64], y2: &[i64]) -> i64 {
    let n = b.nrows();
    let mut acc = 0;
    for i in 0..n {
        if y1[i] == 0 {
            continue;
        }
        for j in 0..n {
            acc += y1[i] * b[(i, j)] * y2[j];
        }
    }
    acc
}

/// A central extension `1 → A → E → Y → 1` with group law
/// `(y₁, a₁)(y₂, a₂) = (y₁ + y₂, a₁a₂σ(y₁, y₂))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialCocycleExtension {
    base: Lattice,
    coeff: CoefficientGroup,
    terms: Vec<(Coefficient, IntMatrix)>,
}

/// Result of trying to split an extension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Splitting {
    /// A cochain `φ` with `dφ = σ⁻¹`.
    Split(MonomialCochain),
    /// The commutator of the basis vectors `e_i`, `e_j` is nontrivial.
    Obstructed {
        i: usize,
        j: usize,
        commutator: Coefficient,
    },
}

impl Splitting {
    pub fn cochain(self) -> Option<MonomialCochain> {
        match self {
            Splitting::Split(c) => Some(c),
            Splitting::Obstructed { .. } => None,
        }
    }
}

impl MonomialCocycleExtension {
    pub fn new(base: Lattice, coeff: CoefficientGroup, terms: Vec<(Coefficient, IntMatrix)>) -> Result<Self> {
        let n = base.rank();
        for (a, b) in &terms {
            coeff.check(a)?;
            if b.nrows() != n || b.ncols() != n {
                return Err(Error::DimensionMismatch(format!(
                    "{}×{} cocycle form on {base}",
                    b.nrows(),
                    b.ncols()
                )));
            }
        }
        Ok(MonomialCocycleExtension { base, coeff, terms })
    }

    /// The split extension `Y × A`.
    pub fn trivial(base: &Lattice, coeff: &CoefficientGroup) -> Self {
        MonomialCocycleExtension {
            base: base.clone(),
            coeff: coeff.clone(),
            terms: Vec::new(),
        }
    }

    pub fn base(&self) -> &Lattice {
        &self.base
    }

    pub fn coeff(&self) -> &CoefficientGroup {
        &self.coeff
    }

    pub fn terms(&self) -> &[(Coefficient, IntMatrix)] {
        &self.terms
    }

    pub fn rank(&self) -> usize {
        self.base.rank()
    }

    fn check_vec(&self, y: &[i64]) -> Result<()> {
        self.base.check(y)
    }

    pub fn sigma(&self, y1: &[i64], y2: &[i64]) -> Result<Coefficient> {
        self.check_vec(y1)?;
        self.check_vec(y2)?;
        self.coeff
            .product(self.terms.iter().map(|(a, b)| (a, bilinear(b, y1, y2))))
    }

    pub fn multiply(
        &self,
        x: &(Vec<i64>, Coefficient),
        y: &(Vec<i64>, Coefficient),
    ) -> Result<(Vec<i64>, Coefficient)> {
        self.coeff.check(&x.1)?;
        self.coeff.check(&y.1)?;
        let s = self.sigma(&x.0, &y.0)?;
        let sum = x.0.iter().zip(&y.0).map(|(a, b)| a + b).collect();
        Ok((sum, self.coeff.op(&self.coeff.op(&x.1, &y.1)?, &s)?))
    }

    fn compatible(&self, o: &MonomialCocycleExtension) -> Result<()> {
        if self.base.rank() != o.base.rank() {
            return Err(Error::DimensionMismatch(format!(
                "extensions of {} and {}",
                self.base, o.base
            )));
        }
        if self.coeff != o.coeff {
            return Err(Error::CoefficientMismatch(format!("{} vs {}", self.coeff, o.coeff)));
        }
        Ok(())
    }

    /// Baer sum: cocycles multiply.
    pub fn baer_sum(&self, o: &MonomialCocycleExtension) -> Result<Self> {
        self.compatible(o)?;
        let mut terms = self.terms.clone();
        terms.extend(o.terms.iter().cloned());
        Ok(MonomialCocycleExtension {
            base: self.base.clone(),
            coeff: self.coeff.clone(),
            terms,
        })
    }

    /// The inverse `E⁻` for the Baer sum.
    pub fn inverse(&self) -> Result<Self> {
        let terms = self
            .terms
            .iter()
            .map(|(a, b)| Ok((self.coeff.inverse(a)?, b.clone())))
            .collect::<Result<_>>()?;
        Ok(MonomialCocycleExtension {
            base: self.base.clone(),
            coeff: self.coeff.clone(),
            terms,
        })
    }

    /// `σ(y₁, y₂) σ(y₂, y₁)⁻¹`.
    pub fn commutator(&self, y1: &[i64], y2: &[i64]) -> Result<Coefficient> {
        self.check_vec(y1)?;
        self.check_vec(y2)?;
        self.coeff.product(
            self.terms
                .iter()
                .map(|(a, b)| (a, bilinear(b, y1, y2) - bilinear(b, y2, y1))),
        )
    }

    pub fn pushout(&self, h: &CoefficientHom) -> Result<Self> {
        let coeff = h.target(&self.coeff)?;
        let terms = self
            .terms
            .iter()
            .map(|(a, b)| Ok((h.apply(a)?, b.clone())))
            .collect::<Result<_>>()?;
        Ok(MonomialCocycleExtension {
            base: self.base.clone(),
            coeff,
            terms,
        })
    }

    /// Pullback along `m: Y′ → Y`.
    pub fn pullback(&self, m: &LatticeMap) -> Result<Self> {
        if m.target().rank() != self.rank() {
            return Err(Error::DimensionMismatch(format!(
                "pullback along a map into {}",
                m.target()
            )));
        }
        let mm = m.matrix();
        let terms = self
            .terms
            .iter()
            .map(|(a, b)| (a.clone(), mm.transpose() * b * mm))
            .collect();
        Ok(MonomialCocycleExtension {
            base: m.source().clone(),
            coeff: self.coeff.clone(),
            terms,
        })
    }

    /// The canonical presentation: bases are independent generators, forms
    /// are reduced modulo generator orders, and trivial terms are dropped.
    /// Two extensions have the same cocycle iff their simplifications agree.
    pub fn simplify(&self) -> Result<Self> {
        let n = self.rank();
        let mut acc: BTreeMap<Coefficient, IntMatrix> = BTreeMap::new();
        for (a, b) in &self.terms {
            for (g, k) in self.coeff.decompose(a)? {
                let entry = acc.entry(g).or_insert_with(|| DMatrix::zeros(n, n));
                *entry += b * k;
            }
        }
        let mut terms = Vec::new();
        for (g, mut b) in acc {
            if let Some(m) = self.coeff.order(&g) {
                b = b.map(|x| x.rem_euclid(m as i64));
            }
            if b.iter().any(|&x| x != 0) {
                terms.push((g, b));
            }
        }
        Ok(MonomialCocycleExtension {
            base: self.base.clone(),
            coeff: self.coeff.clone(),
            terms,
        })
    }

    pub fn is_split_presentation(&self) -> Result<bool> {
        Ok(self.simplify()?.terms.is_empty())
    }

    /// Equality of cocycles as functions, decided on basis pairs.
    pub fn cocycle_equals(&self, o: &MonomialCocycleExtension) -> Result<bool> {
        self.compatible(o)?;
        let n = self.rank();
        for i in 0..n {
            for j in 0..n {
                let (ei, ej) = (self.base.basis(i), self.base.basis(j));
                if self.sigma(&ei, &ej)? != o.sigma(&ei, &ej)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Finds `φ` with `dφ = σ⁻¹` when the commutator is trivial.
    ///
    /// Per generator `g` with form `B = D + U + L` (diagonal, strictly upper,
    /// strictly lower), `σ` differs from `g^{U − Lᵀ}` by the coboundary of
    /// `q(y) = Σ_{i>j} L_ij y_i y_j + Σ_i D_ii y_i(y_i − 1)/2`; the remaining
    /// strictly upper cocycle is the commutator on basis pairs.
    pub fn split(&self) -> Result<Splitting> {
        let s = self.simplify()?;
        let n = self.rank();
        let mut bad: Option<(usize, usize)> = None;
        let mut phi = Vec::new();
        for (g, b) in &s.terms {
            let ord = self.coeff.order(g);
            for i in 0..n {
                for j in i + 1..n {
                    let mut t = b[(i, j)] - b[(j, i)];
                    if let Some(m) = ord {
                        t = t.rem_euclid(m as i64);
                    }
                    if t != 0 && bad.is_none_or(|w| (i, j) < w) {
                        bad = Some((i, j));
                    }
                }
            }
            let sym = DMatrix::from_fn(n, n, |i, j| b[(i.max(j), i.min(j))]);
            let q = QuadraticFunction::polarization(&sym)?;
            phi.push((g.clone(), q.neg()));
        }
        if let Some((i, j)) = bad {
            let commutator = self.commutator(&self.base.basis(i), &self.base.basis(j))?;
            return Ok(Splitting::Obstructed { i, j, commutator });
        }
        let phi = MonomialCochain::new(self.base.clone(), self.coeff.clone(), phi)?.simplify()?;
        Ok(Splitting::Split(phi))
    }

    /// An isomorphism `(y, a) ↦ (y, a·ψ(y))` from `self` to `o`, i.e. `ψ` with
    /// `dψ = σ_o σ_self⁻¹`, when one exists.
    pub fn is_isomorphic(&self, o: &MonomialCocycleExtension) -> Result<Option<MonomialCochain>> {
        self.compatible(o)?;
        Ok(self.baer_sum(&o.inverse()?)?.split()?.cochain())
    }
}

impl fmt::Display for MonomialCocycleExtension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "extension of {} by {}: σ = ", self.base, self.coeff)?;
        if self.terms.is_empty() {
            return write!(f, "1");
        }
        for (k, (a, b)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " · ")?;
            }
            let rows: Vec<String> = (0..b.nrows())
                .map(|i| format!("{:?}", b.row(i).iter().collect::<Vec<_>>()))
                .collect();
            write!(f, "({a})^[{}]", rows.join(","))?;
        }
        Ok(())
    }
}

/// A cochain `φ(y) = Π a^{q(y)}` with quadratic exponents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialCochain {
    base: Lattice,
    coeff: CoefficientGroup,
    terms: Vec<(Coefficient, QuadraticFunction)>,
}

impl MonomialCochain {
    pub fn new(base: Lattice, coeff: CoefficientGroup, terms: Vec<(Coefficient, QuadraticFunction)>) -> Result<Self> {
        for (a, q) in &terms {
            coeff.check(a)?;
            if q.rank() != base.rank() {
                return Err(Error::DimensionMismatch(format!(
                    "cochain exponent of rank {} on {base}",
                    q.rank()
                )));
            }
        }
        Ok(MonomialCochain { base, coeff, terms })
    }

    pub fn zero(base: &Lattice, coeff: &CoefficientGroup) -> Self {
        MonomialCochain {
            base: base.clone(),
            coeff: coeff.clone(),
            terms: Vec::new(),
        }
    }

    pub fn base(&self) -> &Lattice {
        &self.base
    }

    pub fn coeff(&self) -> &CoefficientGroup {
        &self.coeff
    }

    pub fn terms(&self) -> &[(Coefficient, QuadraticFunction)] {
        &self.terms
    }

    pub fn eval(&self, y: &[i64]) -> Result<Coefficient> {
        self.base.check(y)?;
        self.coeff.product(self.terms.iter().map(|(a, q)| (a, q.eval(y))))
    }

    /// `dφ(y₁, y₂) = φ(y₁ + y₂) φ(y₁)⁻¹ φ(y₂)⁻¹`.
    pub fn coboundary(&self) -> MonomialCocycleExtension {
        MonomialCocycleExtension {
            base: self.base.clone(),
            coeff: self.coeff.clone(),
            terms: self.terms.iter().map(|(a, q)| (a.clone(), q.form().clone())).collect(),
        }
    }

    pub fn mul(&self, o: &MonomialCochain) -> Result<Self> {
        if self.base.rank() != o.base.rank() || self.coeff != o.coeff {
            return Err(Error::CoefficientMismatch("cochains on different data".into()));
        }
        let mut terms = self.terms.clone();
        terms.extend(o.terms.iter().cloned());
        Ok(MonomialCochain {
            base: self.base.clone(),
            coeff: self.coeff.clone(),
            terms,
        })
    }

    pub fn inverse(&self) -> Self {
        MonomialCochain {
            base: self.base.clone(),
            coeff: self.coeff.clone(),
            terms: self.terms.iter().map(|(a, q)| (a.clone(), q.neg())).collect(),
        }
    }

    pub fn pushout(&self, h: &CoefficientHom) -> Result<Self> {
        let coeff = h.target(&self.coeff)?;
        let terms = self
            .terms
            .iter()
            .map(|(a, q)| Ok((h.apply(a)?, q.clone())))
            .collect::<Result<_>>()?;
        Ok(MonomialCochain {
            base: self.base.clone(),
            coeff,
            terms,
        })
    }

    /// `φ ∘ m` for `m: Y′ → Y`.
    pub fn pullback(&self, m: &LatticeMap) -> Result<Self> {
        if m.target().rank() != self.base.rank() {
            return Err(Error::DimensionMismatch(format!(
                "pullback along a map into {}",
                m.target()
            )));
        }
        Ok(MonomialCochain {
            base: m.source().clone(),
            coeff: self.coeff.clone(),
            terms: self
                .terms
                .iter()
                .map(|(a, q)| (a.clone(), q.pullback(m.matrix())))
                .collect(),
        })
    }

    /// Canonical presentation over independent generators.
    pub fn simplify(&self) -> Result<Self> {
        let n = self.base.rank();
        let mut acc: BTreeMap<Coefficient, QuadraticFunction> = BTreeMap::new();
        for (a, q) in &self.terms {
            for (g, k) in self.coeff.decompose(a)? {
                let entry = acc.entry(g).or_insert_with(|| QuadraticFunction::zero(n));
                *entry = entry.add(&q.scale(k));
            }
        }
        let mut terms = Vec::new();
        for (g, mut q) in acc {
            if let Some(m) = self.coeff.order(&g) {
                q = q.reduce_mod(m);
            }
            if !q.is_zero() {
                terms.push((g, q));
            }
        }
        Ok(MonomialCochain {
            base: self.base.clone(),
            coeff: self.coeff.clone(),
            terms,
        })
    }

    pub fn is_trivial(&self) -> Result<bool> {
        Ok(self.simplify()?.terms.is_empty())
    }

    /// Equality as functions on the lattice.
    pub fn equals(&self, o: &MonomialCochain) -> Result<bool> {
        self.mul(&o.inverse())?.is_trivial()
    }

    /// Whether every exponent is linear, i.e. `φ` is a character.
    pub fn is_character(&self) -> Result<bool> {
        Ok(self.simplify()?.terms.iter().all(|(_, q)| q.is_linear()))
    }
}

impl fmt::Display for MonomialCochain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "1");
        }
        for (k, (a, q)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " · ")?;
            }
            write!(f, "({a})^({q})")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests;
