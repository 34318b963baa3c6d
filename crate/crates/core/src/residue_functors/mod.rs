//! Residual extensions at a place, the valuation functor, and the decision
//! procedure for integral models.


use std::collections::BTreeSet;

use crate::bd::{incarnation_iso, second_invariant, torus_automorphism, BDTriple};
use crate::error::{Error, Result};
use crate::extensions::{
    Coefficient, CoefficientGroup, CoefficientHom, MonomialCochain, MonomialCocycleExtension, QuadraticFunction,
    Splitting,
};
use crate::fields::{valuation, Field, FieldElement, Place};
use crate::ktheory::tame_symbol;
use crate::lattice::{
    extend_hom, matrix_from_rows, pairing, smith_normal_form, solve_integer, BilinearIncarnation, Extension, Lattice,
    LatticeMap, Obstruction, RootDatum,
};

fn check_finite(place: &Place) -> Result<()> {
    if place.is_archimedean() {
        Err(Error::Archimedean(place.to_string()))
    } else {
        Ok(())
    }
}

/// `val_*`: pushout along the valuation at `place`.
pub fn val_functor(d: &MonomialCocycleExtension, place: &Place) -> Result<MonomialCocycleExtension> {
    check_finite(place)?;
    d.pushout(&CoefficientHom::Valuation(place.clone()))
}

fn split_or_bug(e: &MonomialCocycleExtension, what: &str) -> Result<MonomialCochain> {
    match e.split()? {
        Splitting::Split(c) => Ok(c),
        Splitting::Obstructed { i, j, commutator } => Err(Error::Internal(format!(
            "{what} has commutator {commutator} on e{}, e{}",
            i + 1,
            j + 1
        ))),
    }
}

/// `δ_Q`: the trivialization of `val_*(D_Q)`.
pub fn delta_q(dq: &MonomialCocycleExtension, place: &Place) -> Result<MonomialCochain> {
    split_or_bug(&val_functor(dq, place)?, "val_*(D_Q)")
}

/// A few units at `place`, used to probe residual cocycles.
pub fn sample_units(field: Field, place: &Place) -> Result<Vec<FieldElement>> {
    check_finite(place)?;
    field.check_place(place)?;
    let candidates: &[&str] = match field {
        Field::Rational => &["-1", "2", "3", "5", "7", "3/5", "11", "13"],
        Field::Function { .. } => &["t", "t+1", "t^2+t+1", "(t+2)/(t^2+3)", "t/(t+1)", "(t^3+2)/(t^3+t+1)"],
    };
    let mut out = Vec::new();
    let g = field.torsion_generator();
    if !g.is_one() {
        out.push(g);
    }
    for s in candidates {
        let u = field.parse_element(s)?;
        if !u.is_one() && valuation(&u, place)? == 0 && !out.contains(&u) {
            out.push(u);
        }
        if out.len() == 4 {
            break;
        }
    }
    Ok(out)
}

/// The residual extension of `T′_C` at a place, probed on unit points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidualExtension {
    pub place: Place,
    /// Terms `(∂{u_a, u_b}, C)` for the probe units.
    pub cocycle: MonomialCocycleExtension,
    pub splitting: Option<MonomialCochain>,
}

impl ResidualExtension {
    pub fn is_split(&self) -> Result<bool> {
        self.cocycle.is_split_presentation()
    }
}

pub fn residual_extension(c: &BilinearIncarnation, field: Field, place: &Place) -> Result<ResidualExtension> {
    residual_extension_with(c, field, place, &sample_units(field, place)?)
}

/// The Steinberg cocycle `Π {x_i(s), x_j(t)}^{c_ij}` on unit points
/// `s = u_a^{y₁}`, `t = u_b^{y₂}`, pushed along the tame symbol.
pub fn residual_extension_with(
    c: &BilinearIncarnation,
    field: Field,
    place: &Place,
    units: &[FieldElement],
) -> Result<ResidualExtension> {
    check_finite(place)?;
    field.check_place(place)?;
    let coeff = CoefficientGroup::ResidueUnits {
        field,
        place: place.clone(),
    };
    let mut terms = Vec::new();
    for a in units {
        if valuation(a, place)? != 0 {
            return Err(Error::NotAUnit {
                element: a.to_string(),
                place: place.to_string(),
                valuation: valuation(a, place)?,
            });
        }
        for b in units {
            let hom = CoefficientHom::Tame {
                place: place.clone(),
                partner: b.clone(),
            };
            terms.push((hom.apply(&Coefficient::Unit(a.clone()))?, c.matrix().clone()));
        }
    }
    let cocycle = MonomialCocycleExtension::new(c.lattice().clone(), coeff, terms)?;
    let splitting = cocycle.split()?.cochain();
    Ok(ResidualExtension {
        place: place.clone(),
        cocycle,
        splitting,
    })
}

/// `(y, a) ↦ (y, a + ⟨shift, y⟩)` on `Y ⊕ Z`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EzAutomorphism {
    pub shift: Vec<i64>,
}

impl EzAutomorphism {
    pub fn apply(&self, y: &[i64], a: i64) -> (Vec<i64>, i64) {
        (y.to_vec(), a + pairing(&self.shift, y))
    }

    pub fn is_identity(&self) -> bool {
        self.shift.iter().all(|&x| x == 0)
    }
}

/// The automorphism of the residual data induced by `α_{x⊗s}`:
/// `(y, a) ↦ (y, a + val(s)·⟨x, y⟩)`.
pub fn residual_automorphism(x: &[i64], s: &FieldElement, place: &Place) -> Result<EzAutomorphism> {
    check_finite(place)?;
    if s.is_zero() {
        return Err(Error::ZeroElement);
    }
    let v = valuation(s, place)?;
    Ok(EzAutomorphism {
        shift: x.iter().map(|xi| v * xi).collect(),
    })
}

/// The `D_C`-automorphism `(y, u) ↦ (y, u·s^{⟨x, y⟩})` pushed along `val`.
pub fn bd_automorphism_val(
    x: &[i64],
    s: &FieldElement,
    c: &BilinearIncarnation,
    place: &Place,
) -> Result<EzAutomorphism> {
    if x.len() != c.rank() {
        return Err(Error::DimensionMismatch(format!(
            "character of length {} on rank {}",
            x.len(),
            c.rank()
        )));
    }
    let field = s.field();
    let aut = torus_automorphism(x.to_vec(), s.clone())?;
    let d = second_invariant(c, field);
    let psi = aut.on_d()?;
    if !d.baer_sum(&psi.coboundary())?.cocycle_equals(&d)? {
        return Err(Error::Internal("torus automorphism does not preserve D_C".into()));
    }
    let pushed = psi.pushout(&CoefficientHom::Valuation(place.clone()))?.simplify()?;
    let mut shift = vec![0; x.len()];
    for (g, q) in pushed.terms() {
        let (Coefficient::Int(1), true) = (g, q.is_linear()) else {
            return Err(Error::Internal(format!("val pushout {pushed} is not a character")));
        };
        for (acc, l) in shift.iter_mut().zip(q.linear_part()) {
            *acc += l;
        }
    }
    Ok(EzAutomorphism { shift })
}

/// Checks that the identity `N_C` of `Y ⊕ Z` intertwines the residual and
/// valuation images of each sampled `α_{x⊗s}`, and, given `C₀` with
/// `(C − C₀)(y, y) = 0`, that both transported comparison maps are the
/// identity.
pub fn natural_iso_check(
    c: &BilinearIncarnation,
    c0: Option<&BilinearIncarnation>,
    field: Field,
    place: &Place,
    samples: &[(Vec<i64>, FieldElement)],
) -> Result<bool> {
    let n = c.rank();
    for (x, s) in samples {
        let e = residual_automorphism(x, s, place)?;
        let b = bd_automorphism_val(x, s, c, place)?;
        for i in 0..n {
            let y = c.lattice().basis(i);
            if e.apply(&y, 0) != b.apply(&y, 0) {
                return Ok(false);
            }
        }
        if e != b {
            return Ok(false);
        }
    }
    if let Some(c0) = c0 {
        let Some(iso) = incarnation_iso(c, c0, field)? else {
            return Ok(false);
        };
        let units = sample_units(field, place)?;
        let a = iso.exponents();
        for u in &units {
            for v in &units {
                for i in 0..n {
                    for j in 0..n {
                        if a[(i, j)] != 0 && !tame_symbol(u, v, place)?.pow(a[(i, j)]).is_one() {
                            return Ok(false);
                        }
                    }
                }
            }
        }
        if !iso
            .on_d()?
            .pushout(&CoefficientHom::Valuation(place.clone()))?
            .is_trivial()?
        {
            return Ok(false);
        }
    }
    Ok(true)
}

/// An extension `Y′` of `Y` by `Z` with a map `f: Y_SC ⊕ Z → Y′` over `p`.
///
/// `nu0` is the canonical splitting of `Y′`; in the resulting coordinates
/// `Y′ ≅ Y ⊕ Z` the map is `f(y, a) = (p(y), a + ψ(y))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EZObject {
    pub yprime: MonomialCocycleExtension,
    pub nu0: MonomialCochain,
    pub p: LatticeMap,
    pub psi: Vec<i64>,
}

impl EZObject {
    /// The object obtained by composing with an automorphism of `Y ⊕ Z`.
    pub fn transport(&self, aut: &EzAutomorphism) -> EZObject {
        let mut out = self.clone();
        for (j, psi) in out.psi.iter_mut().enumerate() {
            let col: Vec<i64> = self.p.matrix().column(j).iter().copied().collect();
            *psi += pairing(&aut.shift, &col);
        }
        out
    }

    pub fn is_split(&self) -> Result<bool> {
        Ok(self.yprime.is_split_presentation()? && self.psi.iter().all(|&x| x == 0))
    }
}

/// The EZ object of the residual extension of `T′_C`: split, with `ψ = 0`.
pub fn ez_of_residual(rd: &RootDatum, c: &BilinearIncarnation, field: Field, place: &Place) -> Result<EZObject> {
    let res = residual_extension(c, field, place)?;
    if res.splitting.is_none() {
        return Err(Error::Internal(format!("residual extension at {place} does not split")));
    }
    let z = CoefficientGroup::Integers;
    Ok(EZObject {
        yprime: MonomialCocycleExtension::trivial(rd.y_lattice(), &z),
        nu0: MonomialCochain::zero(rd.y_lattice(), &z),
        p: rd.coroot_inclusion(),
        psi: vec![0; rd.num_simple()],
    })
}

/// `(Q, D, f) ↦ (Y_SC ⊕ Z → val_*(D))`, with `f` read through `δ_Q⁻¹`.
pub fn val_bd(t: &BDTriple, place: &Place) -> Result<EZObject> {
    let yprime = val_functor(t.d(), place)?;
    let nu0 = split_or_bug(&yprime, "val_*(D)")?;
    let delta = delta_q(&t.dq()?, place)?;
    let val = CoefficientHom::Valuation(place.clone());
    let total = t
        .phi()
        .pushout(&val)?
        .mul(&delta.inverse())?
        .mul(&nu0.pullback(t.p())?)?
        .simplify()?;
    let mut psi = vec![0; t.root_datum().num_simple()];
    for (g, q) in total.terms() {
        let (Coefficient::Int(1), true) = (g, q.is_linear()) else {
            return Err(Error::Internal(format!(
                "f is not additive in split coordinates: {total}"
            )));
        };
        for (acc, l) in psi.iter_mut().zip(q.linear_part()) {
            *acc += l;
        }
    }
    Ok(EZObject {
        yprime,
        nu0,
        p: t.p().clone(),
        psi,
    })
}

/// SNF data certifying that no model exists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelObstruction {
    pub obstructions: Vec<Obstruction>,
    pub invariants: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegralModelReport {
    pub exists: bool,
    /// `ν` with `Y′ ≅ Y ⊕ Z`, `(y, a) ↦ (y, a + ν(y))`, carrying `f` to the
    /// standard inclusion.
    pub witness: Option<MonomialCochain>,
    /// `h` with `h ∘ p = ψ` and `ν = ν₀ − h`, vanishing on `complement`.
    pub h: Option<Vec<i64>>,
    pub obstruction: Option<ModelObstruction>,
    /// Free rank of `{h : h ∘ p = 0}`.
    pub torsor_rank: usize,
    /// Basis of `{h : h ∘ p = 0}`.
    pub kernel: Vec<Vec<i64>>,
    pub complement: Vec<Vec<i64>>,
    /// Orders of the torsion of `Y / p(Y_SC)`.
    pub torsion: Vec<i64>,
    pub psi: Vec<i64>,
}

pub fn decide_integral_model(t: &BDTriple, place: &Place) -> Result<IntegralModelReport> {
    let ez = val_bd(t, place)?;
    let (n, k) = (t.root_datum().rank(), t.root_datum().num_simple());
    let sc = ez.p.source().clone();
    let psi_map = LatticeMap::new(
        sc,
        Lattice::new(1, "Z"),
        matrix_from_rows(std::slice::from_ref(&ez.psi), k)?,
    )?;
    let torsor_rank = n - k;
    let torsion = |inv: &[i64]| inv.iter().copied().filter(|&d| d > 1).collect::<Vec<_>>();
    Ok(match extend_hom(&ez.p, &psi_map)? {
        Extension::Solved(sol) => {
            let h: Vec<i64> = (0..n).map(|i| sol.particular.matrix()[(0, i)]).collect();
            let witness = ez
                .nu0
                .mul(&MonomialCochain::new(
                    ez.nu0.base().clone(),
                    CoefficientGroup::Integers,
                    vec![(
                        Coefficient::Int(1),
                        QuadraticFunction::linear(h.iter().map(|x| -x).collect()),
                    )],
                )?)?
                .simplify()?;
            IntegralModelReport {
                exists: true,
                witness: Some(witness),
                h: Some(h),
                obstruction: None,
                torsor_rank,
                kernel: sol.kernel,
                complement: sol.complement,
                torsion: torsion(&sol.invariants),
                psi: ez.psi,
            }
        }
        Extension::Unsolvable {
            obstructions,
            invariants,
        } => IntegralModelReport {
            exists: false,
            witness: None,
            h: None,
            obstruction: Some(ModelObstruction {
                obstructions,
                invariants: invariants.clone(),
            }),
            torsor_rank,
            kernel: Vec::new(),
            complement: Vec::new(),
            torsion: torsion(&invariants),
            psi: ez.psi,
        },
    })
}

const WINDOW: i64 = 3;

fn window(n: usize) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|v| {
                (-WINDOW..=WINDOW).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out
}

/// Compares, in the window `|h_i| ≤ 3`, the models found by brute force
/// with the torsor predicted by [`decide_integral_model`], and the torsor
/// action with the compatible trivializations of the residual side.
pub fn kernel_category_check(t: &BDTriple, place: &Place) -> Result<bool> {
    let report = decide_integral_model(t, place)?;
    let p = t.p().matrix();
    let (n, k) = (p.nrows(), p.ncols());
    let compose = |h: &[i64]| -> Vec<i64> { (0..k).map(|j| (0..n).map(|i| h[i] * p[(i, j)]).sum()).collect() };
    let models: BTreeSet<Vec<i64>> = window(n).into_iter().filter(|h| compose(h) == report.psi).collect();
    let group: Vec<Vec<i64>> = window(n)
        .into_iter()
        .filter(|h| compose(h).iter().all(|&x| x == 0))
        .collect();
    let Some(h0) = &report.h else {
        return Ok(models.is_empty());
    };
    if compose(h0) != report.psi || report.kernel.len() != report.torsor_rank {
        return Ok(false);
    }
    let kmat = if report.kernel.is_empty() {
        nalgebra::DMatrix::zeros(n, 0)
    } else {
        matrix_from_rows(&report.kernel, n)?.transpose()
    };
    let in_span = |v: &[i64]| -> Result<bool> { Ok(solve_integer(&kmat, v)?.is_some()) };
    for w in &models {
        let diff: Vec<i64> = w.iter().zip(h0).map(|(a, b)| a - b).collect();
        if !in_span(&diff)? {
            return Ok(false);
        }
    }
    let residual = ez_of_residual_for(t, place)?;
    for g in &group {
        if !in_span(g)? {
            return Ok(false);
        }
        let moved = residual.transport(&EzAutomorphism { shift: g.clone() });
        if moved.psi != residual.psi {
            return Ok(false);
        }
        for w in &models {
            let shifted: Vec<i64> = w.iter().zip(g).map(|(a, b)| a + b).collect();
            if shifted.iter().all(|x| x.abs() <= WINDOW) && !models.contains(&shifted) {
                return Ok(false);
            }
        }
    }
    let group_rank = if group.is_empty() {
        0
    } else {
        smith_normal_form(&matrix_from_rows(&group, n)?)?.rank
    };
    Ok(group_rank == report.torsor_rank)
}

/// The incarnation read off the `(−1)`-terms of `D`.
pub fn sign_incarnation(t: &BDTriple) -> Result<BilinearIncarnation> {
    let n = t.root_datum().rank();
    let minus = Coefficient::Unit(t.field().minus_one());
    let mut m = nalgebra::DMatrix::zeros(n, n);
    for (a, b) in t.d().terms() {
        if *a == minus {
            m += b;
        }
    }
    BilinearIncarnation::new(t.root_datum().y_lattice().clone(), m)
}

fn ez_of_residual_for(t: &BDTriple, place: &Place) -> Result<EZObject> {
    ez_of_residual(t.root_datum(), &sign_incarnation(t)?, t.field(), place)
}
