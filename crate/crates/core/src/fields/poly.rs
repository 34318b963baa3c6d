//! Dense univariate polynomials over a prime field `F_p`, in the variable `t`.
//!
//! Coefficients are stored little-endian and reduced into `[0, p)`; the zero
//! polynomial has no coefficients. Factorization follows the classical
//! pipeline: square-free decomposition, distinct-degree factorization, then
//! Cantor-Zassenhaus equal-degree splitting (trace map in characteristic 2).

use std::cmp::Ordering;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::arith::{inv_mod, mul_mod};

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Poly {
    p: u64,
    coeffs: Vec<u64>,
}

impl Poly {
    pub fn new(p: u64, mut coeffs: Vec<u64>) -> Self {
        for c in coeffs.iter_mut() {
            *c %= p;
        }
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Poly { p, coeffs }
    }

    pub fn from_signed(p: u64, coeffs: &[i64]) -> Self {
        let cs = coeffs
            .iter()
            .map(|&c| (c as i128).rem_euclid(p as i128) as u64)
            .collect();
        Poly::new(p, cs)
    }

    pub fn zero(p: u64) -> Self {
        Poly { p, coeffs: vec![] }
    }

    pub fn one(p: u64) -> Self {
        Poly::constant(p, 1)
    }

    pub fn constant(p: u64, c: u64) -> Self {
        Poly::new(p, vec![c])
    }

    /// The variable `t`.
    pub fn t(p: u64) -> Self {
        Poly::new(p, vec![0, 1])
    }

    pub fn monomial(p: u64, c: u64, deg: usize) -> Self {
        let mut v = vec![0; deg + 1];
        v[deg] = c;
        Poly::new(p, v)
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> u64 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with `deg 0 = 0`; only use where zero has been excluded.
    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn lc(&self) -> u64 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn is_monic(&self) -> bool {
        self.lc() == 1
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        let v = (0..n).map(|i| (self.coeff(i) + o.coeff(i)) % self.p).collect();
        Poly::new(self.p, v)
    }

    pub fn neg(&self) -> Poly {
        let v = self.coeffs.iter().map(|&c| (self.p - c) % self.p).collect();
        Poly::new(self.p, v)
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: u64) -> Poly {
        let v = self.coeffs.iter().map(|&a| mul_mod(a, c, self.p)).collect();
        Poly::new(self.p, v)
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero(self.p);
        }
        let p = self.p as u128;
        let mut acc = vec![0u128; self.coeffs.len() + o.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.coeffs.iter().enumerate() {
                acc[i + j] = (acc[i + j] + a as u128 * b as u128) % p;
            }
        }
        Poly::new(self.p, acc.into_iter().map(|c| c as u64).collect())
    }

    pub fn pow(&self, mut e: u64) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one(self.p);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Euclidean division; panics if `d` is zero.
    pub fn divrem(&self, d: &Poly) -> (Poly, Poly) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let p = self.p;
        let dd = d.deg();
        let inv = inv_mod(d.lc(), p).expect("nonzero leading coefficient");
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (Poly::zero(p), self.clone());
        }
        let mut q = vec![0u64; r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = mul_mod(r[k + dd], inv, p);
            q[k] = c;
            if c == 0 {
                continue;
            }
            for (j, &b) in d.coeffs.iter().enumerate() {
                let s = mul_mod(c, b, p);
                r[k + j] = (r[k + j] + p - s) % p;
            }
        }
        (Poly::new(p, q), Poly::new(p, r))
    }

    pub fn rem(&self, d: &Poly) -> Poly {
        self.divrem(d).1
    }

    pub fn exact_div(&self, d: &Poly) -> Poly {
        let (q, r) = self.divrem(d);
        debug_assert!(r.is_zero(), "inexact division");
        q
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(inv_mod(self.lc(), self.p).expect("unit leading coefficient"))
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, o: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Returns `(g, s)` with `g = gcd(a, m)` monic and `s·a ≡ g (mod m)`.
    fn half_xgcd(&self, m: &Poly) -> (Poly, Poly) {
        let p = self.p;
        let (mut r0, mut r1) = (m.clone(), self.rem(m));
        let (mut s0, mut s1) = (Poly::zero(p), Poly::one(p));
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1);
            let s = s0.sub(&q.mul(&s1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
        }
        let inv = inv_mod(r0.lc(), p).unwrap_or(1);
        (r0.scale(inv), s0.scale(inv))
    }

    /// Inverse modulo `m`, if it exists.
    pub fn inv_mod(&self, m: &Poly) -> Option<Poly> {
        let (g, s) = self.half_xgcd(m);
        if g.is_one() {
            Some(s.rem(m))
        } else {
            None
        }
    }

    pub fn mul_mod(&self, o: &Poly, m: &Poly) -> Poly {
        self.mul(o).rem(m)
    }

    pub fn pow_mod(&self, mut e: u64, m: &Poly) -> Poly {
        let mut base = self.rem(m);
        let mut acc = Poly::one(self.p).rem(m);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_mod(&base, m);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_mod(&base, m);
            }
        }
        acc
    }

    pub fn derivative(&self) -> Poly {
        let p = self.p;
        let v = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| mul_mod(c, i as u64 % p, p))
            .collect();
        Poly::new(p, v)
    }

    pub fn eval(&self, x: u64) -> u64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0, |acc, &c| (mul_mod(acc, x, self.p) + c) % self.p)
    }

    /// `p`-th root of a polynomial all of whose exponents are multiples of `p`.
    fn pth_root(&self) -> Poly {
        let p = self.p as usize;
        let v = self.coeffs.iter().step_by(p).copied().collect();
        Poly::new(self.p, v)
    }

    fn squarefree_decomposition(&self) -> Vec<(Poly, u32)> {
        let p = self.p;
        let f = self.monic();
        if f.deg() == 0 {
            return vec![];
        }
        let mut out = Vec::new();
        let d = f.derivative();
        if d.is_zero() {
            for (g, m) in f.pth_root().squarefree_decomposition() {
                out.push((g, m * p as u32));
            }
            return out;
        }
        let mut c = f.gcd(&d);
        let mut w = f.exact_div(&c);
        let mut i = 1u32;
        while !w.is_one() {
            let y = w.gcd(&c);
            let z = w.exact_div(&y);
            if !z.is_one() {
                out.push((z, i));
            }
            i += 1;
            w = y;
            c = c.exact_div(&w);
        }
        if !c.is_one() {
            for (g, m) in c.pth_root().squarefree_decomposition() {
                out.push((g, m * p as u32));
            }
        }
        out
    }

    /// Splits a monic square-free polynomial into products of irreducibles
    /// of equal degree.
    fn distinct_degree(&self) -> Vec<(Poly, usize)> {
        let p = self.p;
        let x = Poly::t(p);
        let mut f = self.clone();
        let mut h = x.rem(&f);
        let mut out = Vec::new();
        let mut i = 1;
        while f.deg() >= 2 * i {
            h = h.pow_mod(p, &f);
            let g = h.sub(&x).gcd(&f);
            if !g.is_one() {
                f = f.exact_div(&g);
                h = h.rem(&f);
                out.push((g, i));
            }
            i += 1;
        }
        if f.deg() > 0 {
            let d = f.deg();
            out.push((f, d));
        }
        out
    }

    fn equal_degree(&self, d: usize, rng: &mut ChaCha8Rng, out: &mut Vec<Poly>) {
        let n = self.deg();
        if n == d {
            out.push(self.clone());
            return;
        }
        let p = self.p;
        loop {
            let a = Poly::new(p, (0..n).map(|_| rng.random_range(0..p)).collect());
            if a.deg() == 0 {
                continue;
            }
            let b = if p == 2 {
                let mut acc = a.clone();
                let mut pw = a.clone();
                for _ in 1..d {
                    pw = pw.mul_mod(&pw, self);
                    acc = acc.add(&pw);
                }
                acc
            } else {
                // a^((p^d - 1)/2) = (a·a^p·…·a^(p^(d-1)))^((p-1)/2)
                let mut acc = a.rem(self);
                let mut pw = acc.clone();
                for _ in 1..d {
                    pw = pw.pow_mod(p, self);
                    acc = acc.mul_mod(&pw, self);
                }
                acc.pow_mod((p - 1) / 2, self).sub(&Poly::one(p))
            };
            let g = b.gcd(self);
            if g.deg() > 0 && g.deg() < n {
                g.equal_degree(d, rng, out);
                self.exact_div(&g).equal_degree(d, rng, out);
                return;
            }
        }
    }

    /// Factor into `(leading coefficient, [(monic irreducible, multiplicity)])`,
    /// factors sorted by the polynomial ordering. Panics on zero.
    pub fn factor(&self) -> (u64, Vec<(Poly, u32)>) {
        assert!(!self.is_zero(), "factor of zero polynomial");
        let mut rng = ChaCha8Rng::seed_from_u64(0x6264_6b32);
        let mut out: Vec<(Poly, u32)> = Vec::new();
        for (sf, m) in self.squarefree_decomposition() {
            for (g, d) in sf.distinct_degree() {
                let mut parts = Vec::new();
                g.equal_degree(d, &mut rng, &mut parts);
                out.extend(parts.into_iter().map(|q| (q, m)));
            }
        }
        out.sort();
        (self.lc(), out)
    }

    pub fn is_irreducible(&self) -> bool {
        if self.deg() == 0 || self.is_zero() {
            return false;
        }
        let (_, fs) = self.factor();
        fs.len() == 1 && fs[0].1 == 1
    }

    /// Multiplicity of the monic irreducible `pi` in `self` (nonzero).
    pub fn multiplicity(&self, pi: &Poly) -> u64 {
        let mut f = self.clone();
        let mut k = 0;
        loop {
            let (q, r) = f.divrem(pi);
            if !r.is_zero() {
                return k;
            }
            f = q;
            k += 1;
        }
    }

    fn fmt_terms(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, "+")?;
            }
            first = false;
            match (k, c) {
                (0, c) => write!(f, "{c}")?,
                (1, 1) => write!(f, "t")?,
                (1, c) => write!(f, "{c}*t")?,
                (k, 1) => write!(f, "t^{k}")?,
                (k, c) => write!(f, "{c}*t^{k}")?,
            }
        }
        Ok(())
    }

    /// Whether the printed form contains more than one term.
    pub fn is_compound(&self) -> bool {
        self.coeffs.iter().filter(|&&c| c != 0).count() > 1
    }

    /// Norm from `F_p[t]/(m)` down to `F_p` of `self mod m`.
    pub fn norm_mod(&self, m: &Poly) -> u64 {
        let d = m.deg();
        let a = self.rem(m);
        let mut acc = a.clone();
        let mut pw = a;
        for _ in 1..d {
            pw = pw.pow_mod(self.p, m);
            acc = acc.mul_mod(&pw, m);
        }
        debug_assert!(acc.deg() == 0);
        acc.coeff(0)
    }
}

impl Ord for Poly {
    fn cmp(&self, o: &Self) -> Ordering {
        self.p
            .cmp(&o.p)
            .then(self.coeffs.len().cmp(&o.coeffs.len()))
            .then_with(|| self.coeffs.iter().rev().cmp(o.coeffs.iter().rev()))
    }
}

impl PartialOrd for Poly {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_terms(f)
    }
}

/// Multiplicative inverse in `F_p`, panicking on zero.
pub(crate) fn fp_inv(a: u64, p: u64) -> u64 {
    inv_mod(a % p, p).expect("inverse of zero in F_p")
}
