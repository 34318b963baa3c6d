//! Acceptance run: ten criteria, one PASS/FAIL line each.
//!
//! Run with `cargo test -p bdk2-core --test acceptance`.

use std::collections::BTreeSet;
use std::error::Error as StdError;
use std::process::ExitCode;
use std::time::Instant;

use bdk2::bd::{
    bd_baer_sum, bd_morphisms, canonical_dq, incarnate, third_invariant_solve, torus_commutator_check, BDTriple,
};
use bdk2::extensions::{Coefficient, CoefficientGroup, MonomialCochain, QuadraticFunction};
use bdk2::fields::{Field, FieldElement, Place, Poly, RationalFunction};
use bdk2::ktheory::{
    hilbert_symbol, is_integral, k2_coordinates, lift_residues, reciprocity_check, symbol_coordinates, tame_symbol,
    K2Coordinates, SymbolExpression,
};
use bdk2::lattice::{extend_hom, matrix_from_rows, pairing, solve_integer, BilinearIncarnation, Lattice, LatticeMap};
use bdk2::presets::{names, preset};
use bdk2::residue_functors::{
    decide_integral_model, delta_q, kernel_category_check, natural_iso_check, residual_automorphism,
    residual_extension, val_bd,
};
use bdk2::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<usize, Box<dyn StdError>>;
type Criterion = (&'static str, fn(&mut ChaCha8Rng) -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+).into());
        }
    };
}

/// Reference implementations of the local symbols, written against raw
/// numerators, denominators and coefficient vectors.
mod oracle {
    use super::*;

    fn pow_mod(mut b: i128, mut e: u64, m: i128) -> i128 {
        let mut r = 1i128;
        b = b.rem_euclid(m);
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % m;
            }
            b = b * b % m;
            e >>= 1;
        }
        r
    }

    fn inv_mod(a: i128, m: i128) -> i128 {
        pow_mod(a, (m - 2) as u64, m)
    }

    fn strip(mut n: i128, p: i128) -> (i64, i128) {
        let mut k = 0;
        while n % p == 0 {
            n /= p;
            k += 1;
        }
        (k, n)
    }

    fn legendre(a: i128, p: i128) -> i8 {
        if pow_mod(a, ((p - 1) / 2) as u64, p) == 1 {
            1
        } else {
            -1
        }
    }

    fn parts(x: &FieldElement) -> (i128, i128) {
        match x {
            FieldElement::Rational(r) => (r.numer(), r.denom()),
            _ => panic!("rational expected"),
        }
    }

    /// `(u, v)_p` for a prime `p`, or the real symbol for `p = None`.
    pub fn hilbert(u: &FieldElement, v: &FieldElement, p: Option<i128>) -> i8 {
        let ((un, ud), (vn, vd)) = (parts(u), parts(v));
        let Some(p) = p else {
            return if un < 0 && vn < 0 { -1 } else { 1 };
        };
        let (an, un) = strip(un, p);
        let (ad, ud) = strip(ud, p);
        let (bn, vn) = strip(vn, p);
        let (bd, vd) = strip(vd, p);
        let (a, b) = (an - ad, bn - bd);
        let sign = |k: i64| if k.rem_euclid(2) == 0 { 1i8 } else { -1 };
        if p == 2 {
            let u8_ = (un * ud).rem_euclid(8);
            let v8 = (vn * vd).rem_euclid(8);
            let eps = |x: i128| ((x - 1) / 2) as i64;
            let omega = |x: i128| ((x * x - 1) / 8) as i64;
            sign(eps(u8_) * eps(v8) + a * omega(v8) + b * omega(u8_))
        } else {
            let lu = legendre(un, p) * legendre(ud, p);
            let lv = legendre(vn, p) * legendre(vd, p);
            let pow = |l: i8, k: i64| if k.rem_euclid(2) == 0 { 1 } else { l };
            sign(a * b * ((p - 1) / 2) as i64) * pow(lu, b) * pow(lv, a)
        }
    }

    /// Primes at which `u` or `v` is not a unit.
    pub fn bad_primes(u: &FieldElement, v: &FieldElement) -> BTreeSet<i128> {
        let mut out = BTreeSet::new();
        let (un, ud) = parts(u);
        let (vn, vd) = parts(v);
        for mut n in [un, ud, vn, vd].map(i128::abs) {
            let mut d = 2;
            while d * d <= n {
                while n % d == 0 {
                    out.insert(d);
                    n /= d;
                }
                d += 1;
            }
            if n > 1 {
                out.insert(n);
            }
        }
        out
    }

    /// Divides by `t − a` as often as possible; returns the count and the
    /// value of the cofactor at `a`.
    fn strip_root(coeffs: &[u64], a: u64, p: u64) -> (i64, u64) {
        let p = p as i128;
        let mut c: Vec<i128> = coeffs.iter().map(|&x| x as i128).collect();
        let mut k = 0;
        loop {
            let value = c.iter().rev().fold(0i128, |acc, &x| (acc * a as i128 + x) % p);
            if value != 0 || c.len() <= 1 {
                return (k, value as u64);
            }
            let mut q = vec![0i128; c.len() - 1];
            let mut carry = 0i128;
            for i in (1..c.len()).rev() {
                carry = (c[i] + carry * a as i128) % p;
                q[i - 1] = carry;
            }
            c = q;
            k += 1;
        }
    }

    fn local(x: &RationalFunction, a: Option<u64>, p: u64) -> (i64, i128) {
        let (f, g) = (x.numer().coeffs(), x.denom().coeffs());
        match a {
            Some(a) => {
                let (kf, vf) = strip_root(f, a, p);
                let (kg, vg) = strip_root(g, a, p);
                (kf - kg, vf as i128 * inv_mod(vg as i128, p as i128) % p as i128)
            }
            None => {
                let lc = |c: &[u64]| *c.last().expect("nonzero") as i128;
                (
                    g.len() as i64 - f.len() as i64,
                    lc(f) * inv_mod(lc(g), p as i128) % p as i128,
                )
            }
        }
    }

    /// `∂{u, v}` at `t = a`, or at infinity for `a = None`.
    pub fn tame(u: &FieldElement, v: &FieldElement, a: Option<u64>) -> u64 {
        let (FieldElement::Function(u), FieldElement::Function(v)) = (u, v) else {
            panic!("function field expected");
        };
        let p = u.characteristic();
        let (alpha, u0) = local(u, a, p);
        let (beta, v0) = local(v, a, p);
        let m = p as i128;
        let powz = |x: i128, e: i64| {
            if e >= 0 {
                pow_mod(x, e as u64, m)
            } else {
                pow_mod(inv_mod(x, m), (-e) as u64, m)
            }
        };
        let sign = if (alpha * beta).rem_euclid(2) == 0 { 1 } else { m - 1 };
        (sign * powz(u0, beta) % m * powz(v0, -alpha) % m) as u64
    }

    /// Degree-one places `t − a` and infinity.
    pub fn linear_places(p: u64) -> Vec<Option<u64>> {
        (0..p).map(Some).chain([None]).collect()
    }

    pub fn place(p: u64, a: Option<u64>) -> Place {
        match a {
            Some(a) => Place::Finite(Poly::new(p, vec![(p - a) % p, 1])),
            None => Place::Infinity,
        }
    }

    /// Product of all tame norms for elements supported on degree-one places.
    pub fn weil_product(u: &FieldElement, v: &FieldElement, p: u64) -> u64 {
        linear_places(p).into_iter().fold(1, |acc, a| acc * tame(u, v, a) % p)
    }

    /// Solvability of `h · p = psi` by search over `|h_i| ≤ bound`.
    pub fn extend_by_search(p: &[Vec<i64>], psi: &[i64], bound: i64) -> Option<Vec<i64>> {
        let n = p.len();
        let k = psi.len();
        let mut h = vec![-bound; n];
        loop {
            if (0..k).all(|j| (0..n).map(|i| h[i] * p[i][j]).sum::<i64>() == psi[j]) {
                return Some(h);
            }
            let mut i = 0;
            while i < n && h[i] == bound {
                h[i] = -bound;
                i += 1;
            }
            if i == n {
                return None;
            }
            h[i] += 1;
        }
    }
}

fn f5() -> Field {
    Field::function(5).unwrap()
}

fn incarnation(rows: Vec<Vec<i64>>) -> BilinearIncarnation {
    let n = rows.len();
    BilinearIncarnation::new(Lattice::new(n, "Y"), matrix_from_rows(&rows, n).unwrap()).unwrap()
}

/// An element of `F_p(t)` whose zeros and poles all have degree one.
fn split_unit(rng: &mut ChaCha8Rng, p: u64) -> FieldElement {
    let f = Field::function(p).unwrap();
    let mut x = f.integer(rng.random_range(1..p as i64));
    for _ in 0..rng.random_range(0..=3) {
        let a = rng.random_range(0..p);
        let lin = f.from_poly(Poly::new(p, vec![(p - a) % p, 1])).unwrap();
        x = x.mul(&lin.pow(rng.random_range(-2..=2)));
    }
    x
}

fn group_law(rng: &mut ChaCha8Rng) -> Outcome {
    let mut cases = 0;
    for i in 0..500 {
        let field = if i % 2 == 0 { f5() } else { Field::Rational };
        let n = rng.random_range(1..=2);
        let c = incarnation(sample::matrix(rng, n, n, 2));
        let e = incarnate(&c, field);
        let mut pts = Vec::new();
        for _ in 0..3 {
            let coords: Vec<FieldElement> = (0..n).map(|_| sample::unit(rng, field, 2)).collect();
            let kappa = SymbolExpression::symbol(&sample::unit(rng, field, 2), &sample::unit(rng, field, 2))?;
            pts.push(e.point(coords, kappa)?);
        }
        // (u, α)(v, β) = (uv, αβ·Π{u_i, v_j}^{c_ij})
        let law = |a: &bdk2::bd::TorusPoint, b: &bdk2::bd::TorusPoint| -> bdk2::Result<K2Coordinates> {
            let mut k = k2_coordinates(&a.kappa)?.mul(&k2_coordinates(&b.kappa)?);
            for r in 0..n {
                for s in 0..n {
                    k = k.mul(&symbol_coordinates(&a.coords[r], &b.coords[s])?.pow(c.entry(r, s)));
                }
            }
            Ok(k)
        };
        let ab = e.multiply(&pts[0], &pts[1])?;
        ensure!(
            k2_coordinates(&ab.kappa)? == law(&pts[0], &pts[1])?,
            "product disagrees with the law for C = {c:?}"
        );
        let left = e.multiply(&ab, &pts[2])?;
        let right = e.multiply(&pts[0], &e.multiply(&pts[1], &pts[2])?)?;
        ensure!(e.points_equal(&left, &right)?, "associativity fails for C = {c:?}");
        cases += 1;
    }
    Ok(cases)
}

fn commutator(rng: &mut ChaCha8Rng) -> Outcome {
    let f = f5();
    for _ in 0..100 {
        let n = rng.random_range(1..=3);
        let c = incarnation(sample::matrix(rng, n, n, 3));
        let (y1, y2) = (sample::vector(rng, n, 3), sample::vector(rng, n, 3));
        let (u1, u2) = (sample::unit(rng, f, 4), sample::unit(rng, f, 4));
        ensure!(
            torus_commutator_check(&c, f, &y1, &y2, &u1, &u2)?,
            "C = {c:?}, y = {y1:?}, {y2:?}"
        );
        let e = incarnate(&c, f);
        let comm = e.commutator(&e.cocharacter_point(&u1, &y1)?, &e.cocharacter_point(&u2, &y2)?)?;
        let b: i64 = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| (c.entry(i, j) + c.entry(j, i)) * y1[i] * y2[j])
            .sum();
        for a in oracle::linear_places(5) {
            let want = oracle::tame(&u1, &u2, a);
            let want = (0..b.rem_euclid(4)).fold(1u64, |acc, _| acc * want % 5);
            let got = k2_coordinates(&comm.kappa)?
                .at(&oracle::place(5, a))?
                .as_constant()
                .unwrap_or(0);
            ensure!(got == want, "commutator coordinate at {a:?}: {got} ≠ {want}");
        }
    }
    Ok(100)
}

fn steinberg(rng: &mut ChaCha8Rng) -> Outcome {
    let mut cases = 0;
    for field in [f5(), Field::Rational] {
        for _ in 0..200 {
            let a = sample::non_unit_one(rng, field, 3);
            let b = sample::unit(rng, field, 3);
            let pairs = [(a.clone(), a.neg()), (a.clone(), field.one().sub(&a))];
            for (u, v) in &pairs {
                ensure!(symbol_coordinates(u, v)?.is_trivial(), "{{{u}, {v}}} is not trivial");
                if field.is_function() {
                    for pl in oracle::linear_places(5) {
                        ensure!(oracle::tame(u, v, pl) == 1, "oracle: {{{u}, {v}}} at {pl:?}");
                    }
                } else {
                    for p in oracle::bad_primes(u, v) {
                        ensure!(oracle::hilbert(u, v, Some(p)) == 1, "oracle: ({u}, {v})_{p}");
                    }
                    ensure!(oracle::hilbert(u, v, None) == 1, "oracle: ({u}, {v}) real");
                }
            }
            ensure!(
                symbol_coordinates(&a, &b)?
                    .mul(&symbol_coordinates(&b, &a)?)
                    .is_trivial(),
                "{{{a}, {b}}} not antisymmetric"
            );
            cases += 3;
        }
    }
    Ok(cases)
}

fn reciprocity(rng: &mut ChaCha8Rng) -> Outcome {
    for i in 0..500 {
        let p = [2, 3, 5][i % 3];
        let field = Field::function(p)?;
        let (u, v) = (sample::unit(rng, field, 4), sample::unit(rng, field, 4));
        ensure!(reciprocity_check(&u, &v)?, "{{{u}, {v}}} over F{p}(t)");
        let (u, v) = (split_unit(rng, p), split_unit(rng, p));
        ensure!(reciprocity_check(&u, &v)?, "{{{u}, {v}}} over F{p}(t)");
        ensure!(oracle::weil_product(&u, &v, p) == 1, "oracle product for {{{u}, {v}}}");
        for a in oracle::linear_places(p) {
            let got = tame_symbol(&u, &v, &oracle::place(p, a))?.as_constant();
            ensure!(got == Some(oracle::tame(&u, &v, a)), "∂ at {a:?} of {{{u}, {v}}}");
        }
    }
    for _ in 0..200 {
        let (u, v) = (
            sample::unit(rng, Field::Rational, 0),
            sample::unit(rng, Field::Rational, 0),
        );
        ensure!(reciprocity_check(&u, &v)?, "Hilbert product for ({u}, {v})");
        let mut primes = oracle::bad_primes(&u, &v);
        primes.insert(2);
        let mut product = oracle::hilbert(&u, &v, None);
        ensure!(
            hilbert_symbol(&u, &v, &Place::Real)? == product,
            "real symbol of ({u}, {v})"
        );
        for p in primes {
            let h = oracle::hilbert(&u, &v, Some(p));
            ensure!(hilbert_symbol(&u, &v, &Place::Prime(p as u64))? == h, "({u}, {v})_{p}");
            product *= h;
        }
        ensure!(product == 1, "oracle Hilbert product for ({u}, {v})");
    }
    let f = f5();
    let (t, t2) = (f.parse_element("t")?, f.parse_element("t-2")?);
    let coords = symbol_coordinates(&t, &t2)?;
    let at = |s: &str| -> bdk2::Result<Option<u64>> { Ok(coords.at(&f.parse_place(s)?)?.as_constant()) };
    ensure!(
        at("t")? == Some(2) && at("t-2")? == Some(2) && at("inf")? == Some(4),
        "{{t, t-2}} = {coords:?}"
    );
    ensure!(coords.tame().len() == 3, "{{t, t-2}} has extra support");
    let norms: u64 = coords.tame().values().map(|r| r.norm()).product();
    ensure!(norms == 16 && norms % 5 == 1, "norm product {norms}");
    Ok(1201)
}

fn exact_sequence(rng: &mut ChaCha8Rng) -> Outcome {
    for i in 0..100 {
        let rational = i % 2 == 1;
        let field = if rational { Field::Rational } else { f5() };
        let s: BTreeSet<Place> = if rational {
            BTreeSet::new()
        } else {
            [Place::Infinity].into()
        };
        let mut values = Vec::new();
        for _ in 0..rng.random_range(1..=3) {
            let place = if rational {
                Place::Prime([3, 5, 7, 11, 13][rng.random_range(0..5)])
            } else if rng.random_bool(0.7) {
                oracle::place(5, Some(rng.random_range(0..5)))
            } else {
                field.parse_place(["t^2+2", "t^2+t+1", "t^2+3"][rng.random_range(0..3)])?
            };
            let k = place.residue_field(field)?;
            let r = loop {
                let r = k.element(sample::poly(rng, k.characteristic(), k.degree() - 1));
                if !r.is_zero() {
                    break r;
                }
            };
            values.push((place, r));
        }
        let target = K2Coordinates::from_tame(field, values)?;
        let lifted = lift_residues(&target, &s)?;
        let got = k2_coordinates(&lifted)?;
        let off_s: Vec<_> = got.tame().iter().filter(|(p, _)| !s.contains(p)).collect();
        ensure!(
            off_s == target.tame().iter().collect::<Vec<_>>(),
            "lift of {target:?} gives {got:?}"
        );
        if !rational {
            for a in (0..5).map(Some) {
                let pl = oracle::place(5, a);
                let by_terms = lifted.terms().iter().fold(1u64, |acc, (u, v, e)| {
                    let x = oracle::tame(u, v, a);
                    (0..e.rem_euclid(4)).fold(acc, |acc, _| acc * x % 5)
                });
                ensure!(
                    Some(by_terms) == target.at(&pl)?.as_constant(),
                    "oracle coordinate of the lift at {pl}"
                );
            }
        }
    }
    let f = f5();
    let t = f.t()?;
    let s: BTreeSet<Place> = [Place::Infinity, Place::Finite(Poly::t(5))].into();
    for _ in 0..100 {
        let mut unit = || t.pow(rng.random_range(-3..=3)).mul(&f.integer(rng.random_range(1..5)));
        let (a, b, c, d) = (unit(), unit(), unit(), unit());
        let x = SymbolExpression::symbol(&a, &b)?;
        let y = SymbolExpression::symbol(&c, &d)?;
        ensure!(is_integral(&x, &s)?, "{x} not integral");
        ensure!(
            is_integral(&x.mul(&y)?, &s)? && is_integral(&x.inv(), &s)?,
            "integral classes not closed"
        );
        let w = SymbolExpression::symbol(&f.parse_element("t+1")?, &f.integer(2))?;
        ensure!(
            !is_integral(&w, &s)? && !is_integral(&w.mul(&x)?, &s)?,
            "{w} counted as integral"
        );
    }
    Ok(200)
}

fn residual(rng: &mut ChaCha8Rng) -> Outcome {
    let f = f5();
    let places: Vec<Place> = ["t", "t+1", "t+3", "t^2+2", "inf"]
        .iter()
        .map(|s| f.parse_place(s))
        .collect::<bdk2::Result<_>>()?;
    let mut cases = 0;
    for name in names() {
        let n = preset(&name)?.rank();
        for _ in 0..50 {
            let c = incarnation(sample::matrix(rng, n, n, 3));
            for place in &places {
                let r = residual_extension(&c, f, place)?;
                ensure!(
                    r.cocycle.is_split_presentation()?,
                    "{name}: C = {c:?} at {place} has cocycle {:?}",
                    r.cocycle
                );
                let trivial = r.splitting.as_ref().map(|s| s.is_trivial()).transpose()?;
                ensure!(
                    trivial == Some(true),
                    "{name}: C = {c:?} at {place} lacks the canonical splitting"
                );
                cases += 1;
            }
        }
    }
    Ok(cases)
}

fn square(rng: &mut ChaCha8Rng) -> Outcome {
    for i in 0..200 {
        let rational = i % 2 == 1;
        let field = if rational { Field::Rational } else { f5() };
        let n = rng.random_range(1..=3);
        let c = incarnation(sample::matrix(rng, n, n, 3));
        let (place, prime) = if rational {
            let p = [3u64, 5, 7][rng.random_range(0..3)];
            (Place::Prime(p), Some(p))
        } else {
            (
                oracle::place(5, [Some(0), Some(1), Some(4), None][rng.random_range(0..4)]),
                None,
            )
        };
        let samples: Vec<(Vec<i64>, FieldElement)> = (0..3)
            .map(|_| (sample::vector(rng, n, 3), sample::unit(rng, field, 3)))
            .collect();
        for (x, s) in &samples {
            let v = match (prime, s) {
                (Some(p), FieldElement::Rational(r)) => {
                    let count = |mut m: i128| {
                        let mut k = 0;
                        while m % p as i128 == 0 {
                            m /= p as i128;
                            k += 1;
                        }
                        k
                    };
                    count(r.numer()) - count(r.denom())
                }
                _ => {
                    let a = match &place {
                        Place::Finite(pi) => Some((5 - pi.coeff(0)) % 5),
                        _ => None,
                    };
                    valuation_oracle(s, a)
                }
            };
            let e = residual_automorphism(x, s, &place)?;
            for j in 0..n {
                let y = Lattice::new(n, "Y").basis(j);
                ensure!(
                    e.apply(&y, 0) == (y.clone(), pairing(x, &y) * v),
                    "α at {place} shifts {y:?} wrongly"
                );
            }
        }
        let alt = if i % 4 < 2 {
            let a = sample::matrix(rng, n, n, 2);
            Some(incarnation(
                (0..n)
                    .map(|r| (0..n).map(|s| c.entry(r, s) + a[r][s] - a[s][r]).collect())
                    .collect(),
            ))
        } else {
            None
        };
        ensure!(
            natural_iso_check(&c, alt.as_ref(), field, &place, &samples)?,
            "square fails for C = {c:?}, C0 = {alt:?} at {place}"
        );
    }
    let f = f5();
    let c = incarnation(vec![vec![1]]);
    let bad = incarnation(vec![vec![2]]);
    ensure!(
        !natural_iso_check(&c, Some(&bad), f, &f.parse_place("t")?, &[])?,
        "C and C0 with different forms compared equal"
    );
    Ok(200)
}

fn valuation_oracle(s: &FieldElement, a: Option<u64>) -> i64 {
    let FieldElement::Function(x) = s else { unreachable!() };
    let (f, g) = (x.numer().coeffs(), x.denom().coeffs());
    match a {
        None => g.len() as i64 - f.len() as i64,
        Some(a) => {
            let mult = |c: &[u64]| {
                let mut c: Vec<u64> = c.to_vec();
                let mut k = 0;
                while c.len() > 1 && c.iter().rev().fold(0, |acc, &x| (acc * a + x) % 5) == 0 {
                    let mut q = vec![0u64; c.len() - 1];
                    let mut carry = 0;
                    for i in (1..c.len()).rev() {
                        carry = (c[i] + carry * a) % 5;
                        q[i - 1] = carry;
                    }
                    c = q;
                    k += 1;
                }
                k
            };
            mult(f) - mult(g)
        }
    }
}

fn pgl2_twisted(field: Field, uniformizer: &FieldElement, m: i64) -> bdk2::Result<BDTriple> {
    let rd = preset("PGL2")?;
    let base = third_invariant_solve(
        &rd,
        &BilinearIncarnation::new(rd.y_lattice().clone(), matrix_from_rows(&[vec![1]], 1)?)?,
        field,
    )?;
    let twist = MonomialCochain::new(
        rd.y_sc(),
        CoefficientGroup::Units(field),
        vec![(
            Coefficient::Unit(uniformizer.clone()),
            QuadraticFunction::linear(vec![m]),
        )],
    )?;
    BDTriple::new(rd, base.q().clone(), base.d().clone(), base.phi().mul(&twist)?)
}

/// `(label, triple, place, model expected, torsor rank)`.
type Instance = (String, BDTriple, Place, bool, usize);

/// Instances of the three families.
fn families(rng: &mut ChaCha8Rng) -> bdk2::Result<Vec<Instance>> {
    let f = f5();
    let at_t = f.parse_place("t")?;
    let mut out = Vec::new();
    let sl2 = preset("SL2")?;
    for c in -3..=3 {
        let t = third_invariant_solve(&sl2, &incarnation(vec![vec![c]]), f)?;
        out.push((format!("SL2 C = [{c}]"), t, at_t.clone(), true, 0));
    }
    let t = third_invariant_solve(&sl2, &incarnation(vec![vec![1]]), Field::Rational)?;
    out.push(("SL2 over Q".into(), t, Place::Prime(3), true, 0));
    for n in 1..=4 {
        let rd = preset(&format!("Gm{n}"))?;
        for _ in 0..2 {
            let c = BilinearIncarnation::new(
                rd.y_lattice().clone(),
                matrix_from_rows(&sample::matrix(rng, n, n, 3), n)?,
            )?;
            out.push((
                format!("Gm{n} C = {c:?}"),
                third_invariant_solve(&rd, &c, f)?,
                at_t.clone(),
                true,
                n,
            ));
        }
    }
    let t = f.t()?;
    for m in [1, 3, -1, 5] {
        out.push((format!("PGL2 t^{m}"), pgl2_twisted(f, &t, m)?, at_t.clone(), false, 0));
    }
    out.push(("PGL2 t^2".into(), pgl2_twisted(f, &t, 2)?, at_t, true, 0));
    out.push((
        "PGL2 3^1 over Q".into(),
        pgl2_twisted(Field::Rational, &Field::Rational.integer(3), 1)?,
        Place::Prime(3),
        false,
        0,
    ));
    Ok(out)
}

fn models(rng: &mut ChaCha8Rng) -> Outcome {
    let mut cases = 0;
    for (label, t, place, exists, rank) in families(rng)? {
        let r = decide_integral_model(&t, &place)?;
        ensure!(r.exists == exists, "{label}: exists = {}", r.exists);
        ensure!(r.torsor_rank == rank, "{label}: torsor rank {}", r.torsor_rank);
        let p = bdk2::lattice::matrix_rows(t.p().matrix());
        let found = oracle::extend_by_search(&p, &r.psi, 8);
        ensure!(found.is_some() == r.exists, "{label}: search disagrees");
        if !exists {
            let obs = r.obstruction.as_ref().ok_or("missing obstruction")?;
            ensure!(
                obs.obstructions.iter().all(|o| o.divisor == 2 && o.value % 2 != 0),
                "{label}: {obs:?}"
            );
            if label == "PGL2 t^1" {
                ensure!(
                    obs.obstructions[0].to_string() == "2·h = 1",
                    "{label}: {}",
                    obs.obstructions[0]
                );
            }
        }
        cases += 1;
    }
    for _ in 0..300 {
        let n = rng.random_range(1..=2);
        let k = rng.random_range(1..=n);
        let rows = sample::matrix(rng, n, k, 3);
        let sc = Lattice::new(k, "Y_SC");
        let p = LatticeMap::new(sc.clone(), Lattice::new(n, "Y"), matrix_from_rows(&rows, k)?)?;
        if !p.is_injective()? {
            continue;
        }
        let psi = sample::vector(rng, k, 4);
        let psi_map = LatticeMap::new(
            sc,
            Lattice::new(1, "Z"),
            matrix_from_rows(std::slice::from_ref(&psi), k)?,
        )?;
        let ext = extend_hom(&p, &psi_map)?;
        let found = oracle::extend_by_search(&rows, &psi, 40);
        ensure!(
            found.is_some() == ext.solution().is_some(),
            "extend_hom on {rows:?}, {psi:?}: search {found:?}"
        );
        if let Some(sol) = ext.solution() {
            let h: Vec<i64> = (0..n).map(|i| sol.particular.matrix()[(0, i)]).collect();
            ensure!(
                (0..k).all(|j| (0..n).map(|i| h[i] * rows[i][j]).sum::<i64>() == psi[j]),
                "particular solution {h:?} is wrong"
            );
            ensure!(
                sol.kernel.len() == n - k,
                "kernel rank {} for n = {n}, k = {k}",
                sol.kernel.len()
            );
            let diff: Vec<i64> = found.unwrap().iter().zip(&h).map(|(a, b)| a - b).collect();
            if !sol.kernel.is_empty() {
                let kt = matrix_from_rows(
                    &(0..n)
                        .map(|i| sol.kernel.iter().map(|w| w[i]).collect())
                        .collect::<Vec<_>>(),
                    sol.kernel.len(),
                )?;
                ensure!(
                    solve_integer(&kt, &diff)?.is_some(),
                    "solutions differ by {diff:?}, outside the kernel"
                );
            } else {
                ensure!(diff.iter().all(|&x| x == 0), "unique solution expected");
            }
        }
        cases += 1;
    }
    Ok(cases)
}

fn kernel_category(rng: &mut ChaCha8Rng) -> Outcome {
    let mut cases = 0;
    for (label, t, place, _, _) in families(rng)? {
        ensure!(
            kernel_category_check(&t, &place)?,
            "{label}: kernel category check fails"
        );
        let r = decide_integral_model(&t, &place)?;
        if let Some(h0) = &r.h {
            let p = bdk2::lattice::matrix_rows(t.p().matrix());
            let n = p.len();
            for w in &r.kernel {
                let moved: Vec<i64> = h0.iter().zip(w).map(|(a, b)| a + b).collect();
                let ok = (0..r.psi.len()).all(|j| (0..n).map(|i| moved[i] * p[i][j]).sum::<i64>() == r.psi[j]);
                ensure!(ok, "{label}: acting by {w:?} leaves the models");
            }
        }
        cases += 1;
    }
    Ok(cases)
}

fn baer(rng: &mut ChaCha8Rng) -> Outcome {
    let all = names();
    let mut cases = 0;
    for i in 0..48 {
        let field = if i % 4 == 3 { Field::Rational } else { f5() };
        let place = if field.is_function() {
            field.parse_place("t")?
        } else {
            Place::Prime(3)
        };
        let rd = preset(&all[i % all.len()])?;
        let c1 = sample::weyl_invariant_incarnation(rng, &rd, 2);
        let c2 = sample::weyl_invariant_incarnation(rng, &rd, 2);
        let t1 = third_invariant_solve(&rd, &c1, field)?;
        let t2 = third_invariant_solve(&rd, &c2, field)?;
        let t12 = third_invariant_solve(&rd, &c1.add(&c2)?, field)?;
        let sum = bd_baer_sum(&t1, &t2)?;
        let upper = |c: &BilinearIncarnation| -> Vec<i64> {
            let n = c.rank();
            (0..n)
                .flat_map(|a| (a..n).map(move |b| (a, b)))
                .map(|(a, b)| {
                    if a == b {
                        c.entry(a, a)
                    } else {
                        c.entry(a, b) + c.entry(b, a)
                    }
                })
                .collect()
        };
        let q = |t: &BDTriple| -> Vec<i64> {
            let n = t.q().lattice().rank();
            (0..n)
                .flat_map(|a| (a..n).map(move |b| (a, b)))
                .map(|(a, b)| t.q().coefficient(a, b))
                .collect()
        };
        let added: Vec<i64> = upper(&c1).iter().zip(upper(&c2)).map(|(a, b)| a + b).collect();
        ensure!(
            q(&sum) == added && q(&t12) == added,
            "{}: Q is not additive",
            rd.label()
        );
        let iso = bd_morphisms(&sum, &t12)?;
        ensure!(
            iso.is_ok(),
            "{}: no isomorphism between the sum and the triple of C1 + C2: {iso:?}",
            rd.label()
        );
        let back = bd_morphisms(&t12, &sum)?;
        ensure!(back.is_ok(), "{}: no inverse isomorphism", rd.label());
        let q_sc = |t: &BDTriple| t.q().pullback(t.p());
        let (q1, q2) = (q_sc(&t1)?, q_sc(&t2)?);
        let d12 = delta_q(&canonical_dq(&q1.add(&q2)?, field), &place)?;
        let d1 = delta_q(&canonical_dq(&q1, field), &place)?;
        let d2 = delta_q(&canonical_dq(&q2, field), &place)?;
        ensure!(d12.equals(&d1.mul(&d2)?)?, "{}: δ square does not commute", rd.label());
        let (v1, v2, vs) = (val_bd(&t1, &place)?, val_bd(&t2, &place)?, val_bd(&sum, &place)?);
        let psi: Vec<i64> = v1.psi.iter().zip(&v2.psi).map(|(a, b)| a + b).collect();
        ensure!(psi == vs.psi, "{}: valuation images do not add", rd.label());
        cases += 1;
    }
    Ok(cases)
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("group-law fidelity", group_law),
        ("commutator", commutator),
        ("Steinberg relations", steinberg),
        ("reciprocity", reciprocity),
        ("exact sequence", exact_sequence),
        ("residual splitting", residual),
        ("2-commuting square", square),
        ("integral-model trichotomy", models),
        ("kernel category", kernel_category),
        ("Baer-sum coherence", baer),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + i as u64);
        let start = Instant::now();
        let result = run(&mut rng);
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(cases) => println!("PASS {:>2} {name} ({cases} cases, {secs:.2}s)", i + 1),
            Err(e) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {e}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
