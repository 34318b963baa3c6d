use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::fields::{Field, Place};
use crate::sample;

fn f5() -> Field {
    Field::function(5).unwrap()
}

fn units(f: Field) -> CoefficientGroup {
    CoefficientGroup::Units(f)
}

fn unit(f: Field, s: &str) -> Coefficient {
    Coefficient::Unit(f.parse_element(s).unwrap())
}

fn mat(n: usize, v: &[i64]) -> IntMatrix {
    DMatrix::from_row_slice(n, n, v)
}

fn d_c(f: Field, c: i64) -> MonomialCocycleExtension {
    MonomialCocycleExtension::new(Lattice::new(1, "Y"), units(f), vec![(unit(f, "-1"), mat(1, &[c]))]).unwrap()
}

fn grid(n: usize, r: i64) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|v| {
                (-r..=r).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out
}

fn random_extension(rng: &mut ChaCha8Rng, f: Field, n: usize) -> MonomialCocycleExtension {
    let k = rng.random_range(0..=3);
    let terms = (0..k)
        .map(|_| {
            let (a, bound) = match f {
                Field::Rational => (f.integer([-1, 2, 3][rng.random_range(0..3)]), 1),
                _ if rng.random_bool(0.3) => (f.minus_one(), 2),
                _ => (sample::unit(rng, f, 2), 2),
            };
            let b = sample::matrix(rng, n, n, bound);
            (Coefficient::Unit(a), crate::lattice::matrix_from_rows(&b, n).unwrap())
        })
        .collect();
    MonomialCocycleExtension::new(Lattice::new(n, "Y"), units(f), terms).unwrap()
}

/// `dφ · σ = 1` on a grid of lattice points.
fn splits_on_grid(e: &MonomialCocycleExtension, phi: &MonomialCochain, r: i64) -> bool {
    let d = phi.coboundary().baer_sum(e).unwrap();
    let id = e.coeff().identity();
    let pts = grid(e.rank(), r);
    pts.iter().all(|a| pts.iter().all(|b| d.sigma(a, b).unwrap() == id))
}

#[test]
fn multiply_examples() {
    for f in [f5(), Field::Rational] {
        let u = Coefficient::Unit(f.integer(2));
        let v = Coefficient::Unit(f.integer(3));
        let split = MonomialCocycleExtension::trivial(&Lattice::new(1, "Y"), &units(f));
        assert_eq!(
            split.multiply(&(vec![1], u.clone()), &(vec![1], v.clone())).unwrap(),
            (vec![2], Coefficient::Unit(f.integer(6)))
        );
        assert_eq!(
            d_c(f, 1)
                .multiply(&(vec![1], u.clone()), &(vec![1], v.clone()))
                .unwrap(),
            (vec![2], Coefficient::Unit(f.integer(-6)))
        );
        assert_eq!(
            d_c(f, 2).multiply(&(vec![1], u), &(vec![1], v)).unwrap(),
            (vec![2], Coefficient::Unit(f.integer(6)))
        );
    }
}

#[test]
fn baer_sum_examples() {
    let f = f5();
    for (c1, c2) in [(1, 2), (3, 3), (1, 0)] {
        let s = d_c(f, c1).baer_sum(&d_c(f, c2)).unwrap();
        assert!(s.cocycle_equals(&d_c(f, c1 + c2)).unwrap());
        assert!(s.is_isomorphic(&d_c(f, c1 + c2)).unwrap().is_some());
    }
    let e = d_c(f, 1);
    let split = MonomialCocycleExtension::trivial(e.base(), e.coeff());
    assert!(e.baer_sum(&split).unwrap().is_isomorphic(&e).unwrap().is_some());
    assert!(e
        .baer_sum(&e.inverse().unwrap())
        .unwrap()
        .split()
        .unwrap()
        .cochain()
        .is_some());
}

#[test]
fn commutator_examples() {
    let f = f5();
    let c = mat(2, &[1, 3, 2, 5]);
    let e = MonomialCocycleExtension::new(Lattice::new(2, "Y"), units(f), vec![(unit(f, "-1"), c)]).unwrap();
    assert_eq!(e.commutator(&[1, 0], &[0, 1]).unwrap(), unit(f, "-1"));
    assert_eq!(e.commutator(&[2, 1], &[2, 1]).unwrap(), unit(f, "1"));
    let split = MonomialCocycleExtension::trivial(e.base(), e.coeff());
    assert_eq!(split.commutator(&[1, 0], &[0, 1]).unwrap(), unit(f, "1"));
}

#[test]
fn pushout_examples() {
    let f = f5();
    let at_t = f.parse_place("t").unwrap();
    let dc = MonomialCocycleExtension::new(
        Lattice::new(2, "Y"),
        units(f),
        vec![(unit(f, "-1"), mat(2, &[1, 1, 0, 2]))],
    )
    .unwrap();
    let v = dc.pushout(&CoefficientHom::Valuation(at_t.clone())).unwrap();
    assert_eq!(v.coeff(), &CoefficientGroup::Integers);
    assert!(v.is_split_presentation().unwrap());
    let b = mat(1, &[3]);
    let e = MonomialCocycleExtension::new(Lattice::new(1, "Y"), units(f), vec![(unit(f, "t"), b.clone())]).unwrap();
    let v = e.pushout(&CoefficientHom::Valuation(at_t.clone())).unwrap();
    assert_eq!(v.terms(), &[(Coefficient::Int(1), b)]);
    assert_eq!(v.sigma(&[2], &[5]).unwrap(), Coefficient::Int(30));
    assert!(matches!(
        e.pushout(&CoefficientHom::Residue(at_t)),
        Err(Error::UndefinedHom(_))
    ));
}

#[test]
fn pullback_examples() {
    let f = f5();
    let e = d_c(f, 3);
    let y = e.base().clone();
    assert_eq!(e.pullback(&LatticeMap::identity(&y)).unwrap(), e);
    let two = LatticeMap::new(y.clone(), y.clone(), mat(1, &[2])).unwrap();
    assert!(e.pullback(&two).unwrap().is_split_presentation().unwrap());
    let zero = LatticeMap::zero(&y, &y);
    assert!(e.pullback(&zero).unwrap().is_split_presentation().unwrap());
}

#[test]
fn split_examples() {
    let f = f5();
    let split = MonomialCocycleExtension::trivial(&Lattice::new(2, "Y"), &units(f));
    assert!(split.split().unwrap().cochain().unwrap().terms().is_empty());
    for c in -3..=3 {
        let e = d_c(f, c);
        let phi = e.split().unwrap().cochain().unwrap();
        assert!(splits_on_grid(&e, &phi, 5));
        let expect = |m: i64| {
            if (c * m * (m - 1) / 2) % 2 == 0 {
                unit(f, "1")
            } else {
                unit(f, "-1")
            }
        };
        for m in -5..=5 {
            assert_eq!(phi.eval(&[m]).unwrap(), expect(m));
        }
    }
    let e = MonomialCocycleExtension::new(
        Lattice::new(2, "Y"),
        units(f),
        vec![(unit(f, "-1"), mat(2, &[0, 1, 0, 0]))],
    )
    .unwrap();
    assert_eq!(
        e.split().unwrap(),
        Splitting::Obstructed {
            i: 0,
            j: 1,
            commutator: unit(f, "-1")
        }
    );
}

#[test]
fn split_with_dependent_bases() {
    let f = f5();
    let y = Lattice::new(2, "Y");
    let e = MonomialCocycleExtension::new(
        y,
        units(f),
        vec![
            (unit(f, "t"), mat(2, &[0, 2, 0, 0])),
            (unit(f, "t^2"), mat(2, &[0, 0, 1, 0])),
            (unit(f, "4"), mat(2, &[1, 1, 1, 0])),
        ],
    )
    .unwrap();
    let phi = e.split().unwrap().cochain().expect("commutator is trivial");
    assert!(splits_on_grid(&e, &phi, 3));
}

#[test]
fn isomorphism_examples() {
    let f = f5();
    let y = Lattice::new(2, "Y");
    let c = mat(2, &[1, 3, 0, -2]);
    let dc = MonomialCocycleExtension::new(y.clone(), units(f), vec![(unit(f, "-1"), c.clone())]).unwrap();
    let dct = MonomialCocycleExtension::new(y.clone(), units(f), vec![(unit(f, "-1"), c.transpose())]).unwrap();
    assert!(dc.is_isomorphic(&dc).unwrap().is_some());
    let psi = dc.is_isomorphic(&dct).unwrap().unwrap();
    let lhs = psi.coboundary().baer_sum(&dc).unwrap();
    assert!(lhs.cocycle_equals(&dct).unwrap());
    let odd = MonomialCocycleExtension::new(y.clone(), units(f), vec![(unit(f, "-1"), mat(2, &[0, 1, 0, 0]))]).unwrap();
    assert!(odd
        .is_isomorphic(&MonomialCocycleExtension::trivial(&y, &units(f)))
        .unwrap()
        .is_none());
}

#[test]
fn cochain_pushout_and_equality() {
    let f = f5();
    let y = Lattice::new(1, "Y");
    let phi = MonomialCochain::new(
        y.clone(),
        units(f),
        vec![
            (unit(f, "t^2"), QuadraticFunction::linear(vec![1])),
            (unit(f, "t"), QuadraticFunction::linear(vec![-2])),
        ],
    )
    .unwrap();
    assert!(phi.is_trivial().unwrap());
    let v = phi.pushout(&CoefficientHom::Valuation(Place::Infinity)).unwrap();
    assert_eq!(v.eval(&[3]).unwrap(), Coefficient::Int(0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn group_law_is_associative(seed in any::<u64>(), rational in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = if rational { Field::Rational } else { f5() };
        let n = rng.random_range(1..=3);
        let e = random_extension(&mut rng, f, n);
        let r = if rational { 1 } else { 2 };
        let pt = |rng: &mut ChaCha8Rng| (sample::vector(rng, n, r), Coefficient::Unit(sample::unit(rng, f, 2)));
        let (x, y, z) = (pt(&mut rng), pt(&mut rng), pt(&mut rng));
        let l = e.multiply(&e.multiply(&x, &y).unwrap(), &z).unwrap();
        let r = e.multiply(&x, &e.multiply(&y, &z).unwrap()).unwrap();
        prop_assert_eq!(l, r);
    }

    #[test]
    fn commutators_multiply_under_baer_sum(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = f5();
        let n = rng.random_range(1..=3);
        let e1 = random_extension(&mut rng, f, n);
        let e2 = random_extension(&mut rng, f, n);
        let s = e1.baer_sum(&e2).unwrap();
        let y1 = sample::vector(&mut rng, n, 3);
        let y2 = sample::vector(&mut rng, n, 3);
        let prod = f5_units().op(&e1.commutator(&y1, &y2).unwrap(), &e2.commutator(&y1, &y2).unwrap()).unwrap();
        prop_assert_eq!(s.commutator(&y1, &y2).unwrap(), prod);
    }

    #[test]
    fn pushout_and_pullback_commute_with_sums(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = f5();
        let n = rng.random_range(1..=3);
        let e1 = random_extension(&mut rng, f, n);
        let e2 = random_extension(&mut rng, f, n);
        let val = CoefficientHom::Valuation(f.parse_place("t").unwrap());
        let lhs = e1.baer_sum(&e2).unwrap().pushout(&val).unwrap();
        let rhs = e1.pushout(&val).unwrap().baer_sum(&e2.pushout(&val).unwrap()).unwrap();
        prop_assert!(lhs.cocycle_equals(&rhs).unwrap());
        let y1 = sample::vector(&mut rng, n, 3);
        let y2 = sample::vector(&mut rng, n, 3);
        let c = e1.commutator(&y1, &y2).unwrap();
        prop_assert_eq!(e1.pushout(&val).unwrap().commutator(&y1, &y2).unwrap(), val.apply(&c).unwrap());
        let k = rng.random_range(1..=3);
        let m = crate::lattice::matrix_from_rows(&sample::matrix(&mut rng, n, k, 2), k).unwrap();
        let m = LatticeMap::new(Lattice::new(k, "Y'"), e1.base().clone(), m).unwrap();
        let lhs = e1.baer_sum(&e2).unwrap().pullback(&m).unwrap();
        let rhs = e1.pullback(&m).unwrap().baer_sum(&e2.pullback(&m).unwrap()).unwrap();
        prop_assert!(lhs.cocycle_equals(&rhs).unwrap());
        let z1 = sample::vector(&mut rng, k, 3);
        let z2 = sample::vector(&mut rng, k, 3);
        prop_assert_eq!(e1.pullback(&m).unwrap().commutator(&z1, &z2).unwrap(), e1.commutator(&m.apply(&z1), &m.apply(&z2)).unwrap());
    }

    #[test]
    fn splittings_trivialize_on_grid(seed in any::<u64>(), rational in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = if rational { Field::Rational } else { f5() };
        let n = rng.random_range(1..=2);
        let e = random_extension(&mut rng, f, n);
        let sym = e.baer_sum(&e.pullback(&LatticeMap::identity(e.base())).unwrap()).unwrap();
        let sym = MonomialCocycleExtension::new(
            sym.base().clone(),
            sym.coeff().clone(),
            sym.terms().iter().map(|(a, b)| (a.clone(), b + b.transpose())).collect(),
        ).unwrap();
        let r = if rational { 1 } else { 3 };
        for cand in [e, sym] {
            match cand.split().unwrap() {
                Splitting::Split(phi) => prop_assert!(splits_on_grid(&cand, &phi, r)),
                Splitting::Obstructed { i, j, commutator } => {
                    prop_assert!(!cand.coeff().is_identity(&commutator));
                    prop_assert_eq!(commutator, cand.commutator(&cand.base().basis(i), &cand.base().basis(j)).unwrap());
                }
            }
        }
    }
}

fn f5_units() -> CoefficientGroup {
    units(f5())
}

#[test]
fn isomorphism_is_an_equivalence_relation() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let f = f5();
    let pool: Vec<MonomialCocycleExtension> = (0..50)
        .map(|_| {
            let c = sample::matrix(&mut rng, 2, 2, 2);
            let c = crate::lattice::matrix_from_rows(&c, 2).unwrap();
            let base = if rng.random_bool(0.5) {
                f.minus_one()
            } else {
                f.integer(2)
            };
            MonomialCocycleExtension::new(Lattice::new(2, "Y"), units(f), vec![(Coefficient::Unit(base), c)]).unwrap()
        })
        .collect();
    for a in &pool {
        assert!(a.is_isomorphic(a).unwrap().is_some());
    }
    for a in pool.iter().take(20) {
        for b in pool.iter().take(20) {
            let ab = a.is_isomorphic(b).unwrap();
            let ba = b.is_isomorphic(a).unwrap();
            assert_eq!(ab.is_some(), ba.is_some());
            if let (Some(x), Some(y)) = (&ab, &ba) {
                assert!(x.mul(y).unwrap().coboundary().is_split_presentation().unwrap());
            }
            for c in pool.iter().take(20) {
                if let (Some(x), Some(y)) = (&ab, b.is_isomorphic(c).unwrap()) {
                    let z = x.mul(&y).unwrap();
                    assert!(z.coboundary().baer_sum(a).unwrap().cocycle_equals(c).unwrap());
                }
            }
        }
    }
}
