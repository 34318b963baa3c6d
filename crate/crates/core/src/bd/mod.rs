//! Brylinski–Deligne data `(Q, D, f)` for split reductive groups, the
//! incarnated torus extensions they come from, and their morphisms.

mod torus;


use std::fmt;

pub use torus::{
    incarnate, incarnation_iso, torus_automorphism, torus_commutator_check, IncarnatedTorusExtension, IncarnationIso,
    TorusAutomorphism, TorusPoint,
};

use crate::error::{Error, Result};
use crate::extensions::{Coefficient, CoefficientGroup, MonomialCochain, MonomialCocycleExtension, Splitting};
use crate::fields::Field;
use crate::lattice::{
    extend_hom, is_weyl_invariant, matrix_from_rows, BilinearIncarnation, Lattice, LatticeMap, Obstruction,
    QuadraticForm, RootDatum,
};

/// `Q(y) = C(y, y)`.
pub fn first_invariant(c: &BilinearIncarnation) -> QuadraticForm {
    QuadraticForm::from_matrix(c.lattice().clone(), c.matrix()).expect("square incarnation")
}

/// `D_C`: the extension of `Y` by `F^×` with cocycle `(−1)^{C(y₁, y₂)}`.
pub fn second_invariant(c: &BilinearIncarnation, field: Field) -> MonomialCocycleExtension {
    MonomialCocycleExtension::new(
        c.lattice().clone(),
        CoefficientGroup::Units(field),
        vec![(Coefficient::Unit(field.minus_one()), c.matrix().clone())],
    )
    .expect("valid single term")
}

/// The canonical `D_Q` on a lattice carrying `Q` (normally `Y_SC` with the
/// simple coroot basis): cocycle `(−1)^{C_Q}` with `C_Q` the upper
/// triangular matrix of coefficients of `Q`.
pub fn canonical_dq(q: &QuadraticForm, field: Field) -> MonomialCocycleExtension {
    MonomialCocycleExtension::new(
        q.lattice().clone(),
        CoefficientGroup::Units(field),
        vec![(Coefficient::Unit(field.minus_one()), q.upper().clone())],
    )
    .expect("valid single term")
}

/// A triple `(Q, D, f)` with `f = (p, φ)` a morphism `D_Q → p*D` given by
/// `(y, a) ↦ (p(y), a·φ(y))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BDTriple {
    rd: RootDatum,
    field: Field,
    q: QuadraticForm,
    d: MonomialCocycleExtension,
    p: LatticeMap,
    phi: MonomialCochain,
}

fn check_weyl(q: &QuadraticForm, rd: &RootDatum) -> Result<()> {
    if is_weyl_invariant(q, rd)? {
        return Ok(());
    }
    for i in 0..rd.num_simple() {
        let s = crate::lattice::weyl_reflection(rd, i)?;
        if q.pullback(&s)?.upper() != q.upper() {
            return Err(Error::NotWeylInvariant { reflection: i });
        }
    }
    Err(Error::Internal("Weyl invariance checks disagree".into()))
}

fn sign_power(field: Field, k: i64) -> Coefficient {
    Coefficient::Unit(if k.rem_euclid(2) == 0 {
        field.one()
    } else {
        field.minus_one()
    })
}

impl BDTriple {
    /// Validates Weyl invariance of `Q`, the commutator of `D`, and that
    /// `dφ = (σ_D ∘ (p × p)) · σ_{D_Q}⁻¹`.
    pub fn new(rd: RootDatum, q: QuadraticForm, d: MonomialCocycleExtension, phi: MonomialCochain) -> Result<Self> {
        let field = match d.coeff() {
            CoefficientGroup::Units(f) => *f,
            other => {
                return Err(Error::InvalidTriple(format!(
                    "D has coefficients in {other}, expected F^×"
                )))
            }
        };
        let n = rd.rank();
        if q.lattice().rank() != n || d.rank() != n {
            return Err(Error::InvalidTriple(format!("Q or D not on a lattice of rank {n}")));
        }
        if phi.base().rank() != rd.num_simple() || phi.coeff() != d.coeff() {
            return Err(Error::InvalidTriple("φ must be an F^×-valued cochain on Y_SC".into()));
        }
        check_weyl(&q, &rd)?;
        for i in 0..n {
            for j in i + 1..n {
                let (ei, ej) = (rd.y_lattice().basis(i), rd.y_lattice().basis(j));
                let got = d.commutator(&ei, &ej)?;
                let want = sign_power(field, q.bilinear(&ei, &ej));
                if got != want {
                    return Err(Error::InvalidTriple(format!(
                        "commutator of e{} and e{} is {got}, expected {want}",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        let p = rd.coroot_inclusion();
        let ratio = d
            .pullback(&p)?
            .baer_sum(&canonical_dq(&q.pullback(&p)?, field).inverse()?)?;
        if !phi.coboundary().cocycle_equals(&ratio)? {
            return Err(Error::InvalidTriple("dφ differs from σ_D∘(p×p)·σ_{D_Q}⁻¹".into()));
        }
        let phi = MonomialCochain::new(p.source().clone(), phi.coeff().clone(), phi.terms().to_vec())?;
        Ok(BDTriple {
            rd,
            field,
            q,
            d,
            p,
            phi,
        })
    }

    pub fn root_datum(&self) -> &RootDatum {
        &self.rd
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn q(&self) -> &QuadraticForm {
        &self.q
    }

    pub fn d(&self) -> &MonomialCocycleExtension {
        &self.d
    }

    pub fn p(&self) -> &LatticeMap {
        &self.p
    }

    pub fn phi(&self) -> &MonomialCochain {
        &self.phi
    }

    /// `D_Q` for the restriction of `Q` to `Y_SC`.
    pub fn dq(&self) -> Result<MonomialCocycleExtension> {
        Ok(canonical_dq(&self.q.pullback(&self.p)?, self.field))
    }

    /// The triple with `Q = 0`, `D` split and `φ = 1`.
    pub fn zero(rd: &RootDatum, field: Field) -> Self {
        let coeff = CoefficientGroup::Units(field);
        BDTriple {
            rd: rd.clone(),
            field,
            q: QuadraticForm::zero(rd.y_lattice()),
            d: MonomialCocycleExtension::trivial(rd.y_lattice(), &coeff),
            p: rd.coroot_inclusion(),
            phi: MonomialCochain::zero(&rd.y_sc(), &coeff),
        }
    }
}

impl fmt::Display for BDTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "root datum {}", self.rd.label())?;
        writeln!(f, "Q = {}", self.q)?;
        writeln!(f, "D: {}", self.d)?;
        write!(f, "φ = {}", self.phi)
    }
}

/// The triple `(Q, D_C, f)` of the incarnation `C`, with `φ` found by the
/// splitting solver.
pub fn third_invariant_solve(rd: &RootDatum, c: &BilinearIncarnation, field: Field) -> Result<BDTriple> {
    if c.rank() != rd.rank() {
        return Err(Error::DimensionMismatch(format!(
            "incarnation of rank {} for root datum of rank {}",
            c.rank(),
            rd.rank()
        )));
    }
    let q = QuadraticForm::new(rd.y_lattice().clone(), first_invariant(c).upper().clone())?;
    let d = MonomialCocycleExtension::new(
        rd.y_lattice().clone(),
        CoefficientGroup::Units(field),
        second_invariant(c, field).terms().to_vec(),
    )?;
    check_weyl(&q, rd)?;
    let p = rd.coroot_inclusion();
    let dq = canonical_dq(&q.pullback(&p)?, field);
    let phi = match dq.baer_sum(&d.pullback(&p)?.inverse()?)?.split()? {
        Splitting::Split(phi) => phi,
        Splitting::Obstructed { i, j, commutator } => {
            return Err(Error::Internal(format!(
                "ratio of D_C and D_Q has commutator {commutator} on coroots {i}, {j}"
            )))
        }
    };
    BDTriple::new(rd.clone(), q, d, phi)
}

/// Why two triples have no morphism (or none was found).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MorphismFailure {
    QuadraticFormsDiffer,
    CommutatorsDiffer {
        i: usize,
        j: usize,
    },
    /// No monomial character corrects `ψ` on `Y_SC`; the obstruction is
    /// stated for the exponents of one generator.
    ObstructedInMonomialClass {
        generator: Coefficient,
        obstructions: Vec<Obstruction>,
    },
}

impl fmt::Display for MorphismFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MorphismFailure::QuadraticFormsDiffer => write!(f, "quadratic forms differ"),
            MorphismFailure::CommutatorsDiffer { i, j } => write!(f, "commutators differ on e{}, e{}", i + 1, j + 1),
            MorphismFailure::ObstructedInMonomialClass {
                generator,
                obstructions,
            } => {
                let obs: Vec<String> = obstructions.iter().map(|o| o.to_string()).collect();
                write!(
                    f,
                    "obstructed within monomial class at generator {generator}: {}",
                    obs.join(", ")
                )
            }
        }
    }
}

fn check_same(t1: &BDTriple, t2: &BDTriple) -> Result<()> {
    if t1.rd != t2.rd {
        return Err(Error::InvalidTriple(format!(
            "triples on root data {} and {}",
            t1.rd.label(),
            t2.rd.label()
        )));
    }
    if t1.field != t2.field {
        return Err(Error::FieldMismatch(format!("{} vs {}", t1.field, t2.field)));
    }
    Ok(())
}

/// A morphism `T₁ → T₂`: a cochain `ψ` on `Y` with `dψ = σ₂σ₁⁻¹` and
/// `(ψ ∘ p) · φ₁ = φ₂`.
pub fn bd_morphisms(t1: &BDTriple, t2: &BDTriple) -> Result<std::result::Result<MonomialCochain, MorphismFailure>> {
    check_same(t1, t2)?;
    if t1.q != t2.q {
        return Ok(Err(MorphismFailure::QuadraticFormsDiffer));
    }
    let psi0 = match t1.d.baer_sum(&t2.d.inverse()?)?.split()? {
        Splitting::Split(c) => c,
        Splitting::Obstructed { i, j, .. } => return Ok(Err(MorphismFailure::CommutatorsDiffer { i, j })),
    };
    let eps = t2
        .phi
        .mul(&t1.phi.inverse())?
        .mul(&psi0.pullback(&t1.p)?.inverse())?
        .simplify()?;
    let coeff = t1.d.coeff().clone();
    let (n, k) = (t1.rd.rank(), t1.rd.num_simple());
    let mut chi = Vec::new();
    for (g, q) in eps.terms() {
        if !q.is_linear() {
            return Err(Error::Internal(format!("correction exponent {q} is not linear")));
        }
        let order = coeff.order(g);
        let pm = t1.p.matrix();
        let (p_ext, src) = match order {
            None => (pm.clone(), k),
            Some(m) => {
                let mut big = nalgebra::DMatrix::zeros(n + k, k);
                big.view_mut((0, 0), (n, k)).copy_from(pm);
                for j in 0..k {
                    big[(n + j, j)] = m as i64;
                }
                (big, k)
            }
        };
        let sc = Lattice::new(src, "Y_SC");
        let p_ext = LatticeMap::new(sc.clone(), Lattice::new(p_ext.nrows(), "Y"), p_ext)?;
        let target = LatticeMap::new(
            sc,
            Lattice::new(1, "Z"),
            matrix_from_rows(&[q.linear_part().to_vec()], k)?,
        )?;
        match extend_hom(&p_ext, &target)? {
            crate::lattice::Extension::Solved(h) => {
                let row: Vec<i64> = (0..n).map(|i| h.particular.matrix()[(0, i)]).collect();
                chi.push((g.clone(), crate::extensions::QuadraticFunction::linear(row)));
            }
            crate::lattice::Extension::Unsolvable { obstructions, .. } => {
                return Ok(Err(MorphismFailure::ObstructedInMonomialClass {
                    generator: g.clone(),
                    obstructions,
                }))
            }
        }
    }
    let chi = MonomialCochain::new(t1.rd.y_lattice().clone(), coeff, chi)?;
    let psi = psi0.mul(&chi)?.simplify()?;
    let lhs = psi.pullback(&t1.p)?.mul(&t1.phi)?;
    if !lhs.equals(&t2.phi)? {
        return Err(Error::Internal("character correction failed to match φ₂".into()));
    }
    Ok(Ok(psi))
}

/// `(Q₁ + Q₂, D₁ ∔ D₂, f₁ · f₂)`, transported along the identification
/// `D_{Q₁+Q₂} ≅ D_{Q₁} ∔ D_{Q₂}`.
pub fn bd_baer_sum(t1: &BDTriple, t2: &BDTriple) -> Result<BDTriple> {
    check_same(t1, t2)?;
    let q = t1.q.add(&t2.q)?;
    let d = t1.d.baer_sum(&t2.d)?;
    let sum_dq = canonical_dq(&q.pullback(&t1.p)?, t1.field);
    let kappa = sum_dq
        .is_isomorphic(&t1.dq()?.baer_sum(&t2.dq()?)?)?
        .ok_or_else(|| Error::Internal("D_Q is not additive in Q".into()))?;
    let phi = kappa.mul(&t1.phi)?.mul(&t2.phi)?.simplify()?;
    BDTriple::new(t1.rd.clone(), q, d, phi)
}
