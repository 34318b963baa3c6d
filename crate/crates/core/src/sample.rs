//! Seeded random instances shared by the verification suites and tests.

use rand::Rng;

use nalgebra::DMatrix;

use crate::fields::{Field, FieldElement, Poly, Rational};
use crate::lattice::{weyl_group, BilinearIncarnation, RootDatum};

/// Bound on numerator and denominator size of random rationals.
pub const RATIONAL_BOUND: i128 = 60;

pub fn poly<R: Rng>(rng: &mut R, p: u64, max_deg: usize) -> Poly {
    let d = rng.random_range(0..=max_deg);
    let coeffs = (0..=d).map(|_| rng.random_range(0..p)).collect();
    Poly::new(p, coeffs)
}

pub fn monic_poly<R: Rng>(rng: &mut R, p: u64, max_deg: usize) -> Poly {
    let d = rng.random_range(0..=max_deg);
    let mut coeffs: Vec<u64> = (0..d).map(|_| rng.random_range(0..p)).collect();
    coeffs.push(1);
    Poly::new(p, coeffs)
}

/// A random nonzero element. Function-field elements have numerator and
/// denominator of degree at most `max_deg`.
pub fn unit<R: Rng>(rng: &mut R, field: Field, max_deg: usize) -> FieldElement {
    match field {
        Field::Rational => loop {
            let n = rng.random_range(-RATIONAL_BOUND..=RATIONAL_BOUND);
            let d = if rng.random_bool(0.5) {
                1
            } else {
                rng.random_range(1..=RATIONAL_BOUND)
            };
            if n != 0 {
                return FieldElement::Rational(Rational::new(n, d).expect("nonzero denominator"));
            }
        },
        Field::Function { p } => loop {
            let num = poly(rng, p, max_deg);
            if num.is_zero() {
                continue;
            }
            let den = if rng.random_bool(0.5) {
                Poly::one(p)
            } else {
                monic_poly(rng, p, max_deg)
            };
            let x = field.from_poly(num).expect("same field");
            let y = field.from_poly(den).expect("same field");
            return x.div(&y);
        },
    }
}

/// A random element different from `0` and `1`, so that `1 - a` is a unit.
pub fn non_unit_one<R: Rng>(rng: &mut R, field: Field, max_deg: usize) -> FieldElement {
    loop {
        let a = unit(rng, field, max_deg);
        if !a.is_one() {
            return a;
        }
    }
}

/// A random integer matrix with entries in `[-bound, bound]`.
pub fn matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize, bound: i64) -> Vec<Vec<i64>> {
    (0..rows)
        .map(|_| (0..cols).map(|_| rng.random_range(-bound..=bound)).collect())
        .collect()
}

pub fn vector<R: Rng>(rng: &mut R, n: usize, bound: i64) -> Vec<i64> {
    (0..n).map(|_| rng.random_range(-bound..=bound)).collect()
}

/// A random incarnation whose form `C(y, y)` is Weyl-invariant: the Weyl
/// average of a random upper-triangular form plus a random alternating part.
pub fn weyl_invariant_incarnation<R: Rng>(rng: &mut R, rd: &RootDatum, bound: i64) -> BilinearIncarnation {
    let n = rd.rank();
    let c = DMatrix::from_fn(n, n, |i, j| if i <= j { rng.random_range(-bound..=bound) } else { 0 });
    let sym = &c + c.transpose();
    let mut avg = DMatrix::<i64>::zeros(n, n);
    for w in weyl_group(rd).expect("finite Weyl group") {
        avg += w.transpose() * &sym * &w;
    }
    let a = DMatrix::from_fn(n, n, |i, j| if i < j { rng.random_range(-bound..=bound) } else { 0 });
    let upper = DMatrix::from_fn(n, n, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Less => avg[(i, j)],
        std::cmp::Ordering::Equal => avg[(i, i)] / 2,
        std::cmp::Ordering::Greater => 0,
    });
    BilinearIncarnation::new(rd.y_lattice().clone(), upper + &a - a.transpose()).expect("square")
}
