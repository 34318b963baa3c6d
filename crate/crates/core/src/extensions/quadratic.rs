use std::fmt;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::lattice::IntMatrix;

/// An integer-valued quadratic function `q` on `Zⁿ` with `q(0) = 0`:
///
/// `q(y) = Σ_{i<j} B_ij y_i y_j + Σ_i B_ii · y_i(y_i − 1)/2 + Σ_i l_i y_i`
///
/// with `B` symmetric. Every integer-valued quadratic function vanishing at
/// the origin has exactly one such presentation, and `B` is the Gram matrix
/// of its polarization.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadraticFunction {
    form: IntMatrix,
    linear: Vec<i64>,
}

fn binom2(y: i64) -> i64 {
    y * (y - 1) / 2
}

impl QuadraticFunction {
    pub fn new(form: IntMatrix, linear: Vec<i64>) -> Result<Self> {
        let n = linear.len();
        if form.nrows() != n || form.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "{}×{} form with {n} linear coefficients",
                form.nrows(),
                form.ncols()
            )));
        }
        if form != form.transpose() {
            return Err(Error::DimensionMismatch(
                "quadratic function form must be symmetric".into(),
            ));
        }
        Ok(QuadraticFunction { form, linear })
    }

    pub fn zero(n: usize) -> Self {
        QuadraticFunction {
            form: DMatrix::zeros(n, n),
            linear: vec![0; n],
        }
    }

    pub fn linear(l: Vec<i64>) -> Self {
        let n = l.len();
        QuadraticFunction {
            form: DMatrix::zeros(n, n),
            linear: l,
        }
    }

    /// The polarization `½(B(y, y) − Σ B_ii y_i)` of a symmetric matrix.
    pub fn polarization(b: &IntMatrix) -> Result<Self> {
        QuadraticFunction::new(b.clone(), vec![0; b.nrows()])
    }

    /// Recovers the presentation of an integer-valued quadratic function with
    /// `f(0) = 0` from its values near the origin.
    pub fn from_fn(n: usize, f: impl Fn(&[i64]) -> i64) -> Self {
        let e = |i: usize| {
            let mut v = vec![0; n];
            v[i] = 1;
            v
        };
        let single: Vec<i64> = (0..n).map(|i| f(&e(i))).collect();
        let form = DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                let mut v = vec![0; n];
                v[i] = 2;
                f(&v) - 2 * single[i]
            } else {
                let mut v = vec![0; n];
                v[i] = 1;
                v[j] = 1;
                f(&v) - single[i] - single[j]
            }
        });
        QuadraticFunction { form, linear: single }
    }

    pub fn rank(&self) -> usize {
        self.linear.len()
    }

    pub fn form(&self) -> &IntMatrix {
        &self.form
    }

    pub fn linear_part(&self) -> &[i64] {
        &self.linear
    }

    pub fn eval(&self, y: &[i64]) -> i64 {
        let n = self.rank();
        assert_eq!(y.len(), n, "vector length");
        let mut acc = 0;
        for i in 0..n {
            acc += self.form[(i, i)] * binom2(y[i]) + self.linear[i] * y[i];
            for j in i + 1..n {
                acc += self.form[(i, j)] * y[i] * y[j];
            }
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.form.iter().all(|&x| x == 0) && self.linear.iter().all(|&x| x == 0)
    }

    /// Whether `q` is a homomorphism `Zⁿ → Z`.
    pub fn is_linear(&self) -> bool {
        self.form.iter().all(|&x| x == 0)
    }

    pub fn add(&self, o: &QuadraticFunction) -> QuadraticFunction {
        assert_eq!(self.rank(), o.rank(), "rank mismatch");
        QuadraticFunction {
            form: &self.form + &o.form,
            linear: self.linear.iter().zip(&o.linear).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn scale(&self, k: i64) -> QuadraticFunction {
        QuadraticFunction {
            form: &self.form * k,
            linear: self.linear.iter().map(|a| a * k).collect(),
        }
    }

    pub fn neg(&self) -> QuadraticFunction {
        self.scale(-1)
    }

    /// Coefficients reduced into `[0, m)`; values agree modulo `m`.
    pub fn reduce_mod(&self, m: u64) -> QuadraticFunction {
        let m = m as i64;
        QuadraticFunction {
            form: self.form.map(|x| x.rem_euclid(m)),
            linear: self.linear.iter().map(|x| x.rem_euclid(m)).collect(),
        }
    }

    /// `q ∘ m` for a matrix `m` from `Z^k` to `Zⁿ`.
    pub fn pullback(&self, m: &IntMatrix) -> QuadraticFunction {
        assert_eq!(m.nrows(), self.rank(), "pullback dimension");
        let k = m.ncols();
        QuadraticFunction::from_fn(k, |y| {
            let v: Vec<i64> = (0..self.rank())
                .map(|i| (0..k).map(|j| m[(i, j)] * y[j]).sum())
                .collect();
            self.eval(&v)
        })
    }
}

impl fmt::Display for QuadraticFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.rank();
        let mut parts: Vec<(i64, String)> = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                parts.push((self.form[(i, j)], format!("y{}*y{}", i + 1, j + 1)));
            }
        }
        for i in 0..n {
            parts.push((self.form[(i, i)], format!("C(y{},2)", i + 1)));
        }
        for i in 0..n {
            parts.push((self.linear[i], format!("y{}", i + 1)));
        }
        let mut first = true;
        for (c, mono) in parts.into_iter().filter(|(c, _)| *c != 0) {
            let sign = if c < 0 {
                "-"
            } else if first {
                ""
            } else {
                "+"
            };
            if c.abs() == 1 {
                write!(f, "{sign}{mono}")?;
            } else {
                write!(f, "{sign}{}*{mono}", c.abs())?;
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}
