use std::fmt;

use nalgebra::DMatrix;

use super::{weyl_reflection, IntMatrix, Lattice, LatticeMap, RootDatum};
use crate::error::{Error, Result};

/// `Q(y) = Σ_{i ≤ j} q_ij y_i y_j`, stored as an upper-triangular matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticForm {
    lattice: Lattice,
    upper: IntMatrix,
}

impl QuadraticForm {
    pub fn new(lattice: Lattice, upper: IntMatrix) -> Result<Self> {
        let n = lattice.rank();
        if upper.nrows() != n || upper.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "{}×{} coefficients on {lattice}",
                upper.nrows(),
                upper.ncols()
            )));
        }
        for i in 0..n {
            for j in 0..i {
                if upper[(i, j)] != 0 {
                    return Err(Error::DimensionMismatch(format!(
                        "quadratic form coefficient ({i},{j}) below the diagonal"
                    )));
                }
            }
        }
        Ok(QuadraticForm { lattice, upper })
    }

    /// The form with coefficients `q_ij` given for `i ≤ j`.
    pub fn from_entries(lattice: Lattice, entries: impl IntoIterator<Item = ((usize, usize), i64)>) -> Result<Self> {
        let n = lattice.rank();
        let mut upper = DMatrix::zeros(n, n);
        for ((i, j), q) in entries {
            if i > j || j >= n {
                return Err(Error::IndexOutOfRange {
                    index: i.max(j),
                    len: n,
                });
            }
            upper[(i, j)] += q;
        }
        Ok(QuadraticForm { lattice, upper })
    }

    /// `Q(y) = yᵀ M y` for an arbitrary square matrix `M`.
    pub fn from_matrix(lattice: Lattice, m: &IntMatrix) -> Result<Self> {
        let n = lattice.rank();
        if m.nrows() != n || m.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "{}×{} matrix on {lattice}",
                m.nrows(),
                m.ncols()
            )));
        }
        let upper = DMatrix::from_fn(n, n, |i, j| match i.cmp(&j) {
            std::cmp::Ordering::Less => m[(i, j)] + m[(j, i)],
            std::cmp::Ordering::Equal => m[(i, i)],
            std::cmp::Ordering::Greater => 0,
        });
        Ok(QuadraticForm { lattice, upper })
    }

    pub fn zero(lattice: &Lattice) -> Self {
        let n = lattice.rank();
        QuadraticForm {
            lattice: lattice.clone(),
            upper: DMatrix::zeros(n, n),
        }
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn upper(&self) -> &IntMatrix {
        &self.upper
    }

    pub fn coefficient(&self, i: usize, j: usize) -> i64 {
        self.upper[(i.min(j), i.max(j))]
    }

    pub fn eval(&self, y: &[i64]) -> i64 {
        let n = self.lattice.rank();
        assert_eq!(y.len(), n, "vector length");
        let mut acc = 0;
        for i in 0..n {
            for j in i..n {
                acc += self.upper[(i, j)] * y[i] * y[j];
            }
        }
        acc
    }

    /// Gram matrix of `B_Q(y₁, y₂) = Q(y₁ + y₂) − Q(y₁) − Q(y₂)`.
    pub fn bilinear_matrix(&self) -> IntMatrix {
        &self.upper + self.upper.transpose()
    }

    pub fn bilinear(&self, y1: &[i64], y2: &[i64]) -> i64 {
        let b = self.bilinear_matrix();
        let n = self.lattice.rank();
        let mut acc = 0;
        for i in 0..n {
            for j in 0..n {
                acc += y1[i] * b[(i, j)] * y2[j];
            }
        }
        acc
    }

    pub fn add(&self, o: &QuadraticForm) -> Result<QuadraticForm> {
        if self.lattice.rank() != o.lattice.rank() {
            return Err(Error::DimensionMismatch("quadratic forms on different lattices".into()));
        }
        Ok(QuadraticForm {
            lattice: self.lattice.clone(),
            upper: &self.upper + &o.upper,
        })
    }

    pub fn neg(&self) -> QuadraticForm {
        QuadraticForm {
            lattice: self.lattice.clone(),
            upper: -&self.upper,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.upper.iter().all(|&x| x == 0)
    }

    /// `Q ∘ m` on the source of `m`.
    pub fn pullback(&self, m: &LatticeMap) -> Result<QuadraticForm> {
        if m.target().rank() != self.lattice.rank() {
            return Err(Error::DimensionMismatch("pullback target".into()));
        }
        let n = self.lattice.rank();
        let full = DMatrix::from_fn(n, n, |i, j| if i <= j { self.upper[(i, j)] } else { 0 });
        let g = m.matrix().transpose() * full * m.matrix();
        QuadraticForm::from_matrix(m.source().clone(), &g)
    }
}

impl fmt::Display for QuadraticForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.lattice.rank();
        let mut first = true;
        for i in 0..n {
            for j in i..n {
                let q = self.upper[(i, j)];
                if q == 0 {
                    continue;
                }
                let mono = if i == j {
                    format!("y{}^2", i + 1)
                } else {
                    format!("y{}*y{}", i + 1, j + 1)
                };
                let sign = if q < 0 {
                    "-"
                } else if first {
                    ""
                } else {
                    "+"
                };
                let mag = q.abs();
                if mag == 1 {
                    write!(f, "{sign}{mono}")?;
                } else {
                    write!(f, "{sign}{mag}*{mono}")?;
                }
                first = false;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// A bilinear form `C ∈ X ⊗ X`, `C(y₁, y₂) = y₁ᵀ C y₂`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BilinearIncarnation {
    lattice: Lattice,
    matrix: IntMatrix,
}

impl BilinearIncarnation {
    pub fn new(lattice: Lattice, matrix: IntMatrix) -> Result<Self> {
        let n = lattice.rank();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "{}×{} incarnation on {lattice}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(BilinearIncarnation { lattice, matrix })
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn rank(&self) -> usize {
        self.lattice.rank()
    }

    pub fn entry(&self, i: usize, j: usize) -> i64 {
        self.matrix[(i, j)]
    }

    pub fn eval(&self, y1: &[i64], y2: &[i64]) -> i64 {
        let mut acc = 0;
        for (i, a) in y1.iter().enumerate() {
            for (j, b) in y2.iter().enumerate() {
                acc += a * self.matrix[(i, j)] * b;
            }
        }
        acc
    }

    pub fn add(&self, o: &BilinearIncarnation) -> Result<BilinearIncarnation> {
        if self.rank() != o.rank() {
            return Err(Error::DimensionMismatch("incarnations on different lattices".into()));
        }
        BilinearIncarnation::new(self.lattice.clone(), &self.matrix + &o.matrix)
    }

    pub fn sub(&self, o: &BilinearIncarnation) -> Result<BilinearIncarnation> {
        if self.rank() != o.rank() {
            return Err(Error::DimensionMismatch("incarnations on different lattices".into()));
        }
        BilinearIncarnation::new(self.lattice.clone(), &self.matrix - &o.matrix)
    }

    /// Whether `C(y, y) = 0` for all `y`: zero diagonal and antisymmetric.
    pub fn is_alternating(&self) -> bool {
        let n = self.rank();
        (0..n).all(|i| self.matrix[(i, i)] == 0 && (0..n).all(|j| self.matrix[(i, j)] == -self.matrix[(j, i)]))
    }
}

/// Whether `Q` is invariant under every simple reflection, decided on basis
/// vectors and basis pairs.
pub fn is_weyl_invariant(q: &QuadraticForm, rd: &RootDatum) -> Result<bool> {
    if q.lattice().rank() != rd.rank() {
        return Err(Error::DimensionMismatch(format!(
            "form on rank {} but root datum of rank {}",
            q.lattice().rank(),
            rd.rank()
        )));
    }
    let n = rd.rank();
    for i in 0..rd.num_simple() {
        let s = weyl_reflection(rd, i)?;
        let images: Vec<Vec<i64>> = (0..n).map(|a| s.apply(&rd.y_lattice().basis(a))).collect();
        for a in 0..n {
            let ea = rd.y_lattice().basis(a);
            if q.eval(&images[a]) != q.eval(&ea) {
                return Ok(false);
            }
            for b in a + 1..n {
                let eb = rd.y_lattice().basis(b);
                if q.bilinear(&images[a], &images[b]) != q.bilinear(&ea, &eb) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gl2() -> RootDatum {
        RootDatum::new("GL2", 2, vec![vec![1, -1]], vec![vec![1, -1]]).unwrap()
    }

    #[test]
    fn weyl_invariance_examples() {
        let sl2 = RootDatum::new("SL2", 1, vec![vec![2]], vec![vec![1]]).unwrap();
        for c in -3..=3 {
            let q = QuadraticForm::from_entries(Lattice::new(1, "Y"), [((0, 0), c)]).unwrap();
            assert!(is_weyl_invariant(&q, &sl2).unwrap());
        }
        let y = Lattice::new(2, "Y");
        let sym = QuadraticForm::from_entries(y.clone(), [((0, 0), 1), ((1, 1), 1)]).unwrap();
        assert!(is_weyl_invariant(&sym, &gl2()).unwrap());
        let lop = QuadraticForm::from_entries(y.clone(), [((0, 0), 1)]).unwrap();
        assert!(!is_weyl_invariant(&lop, &gl2()).unwrap());
        let wrong = QuadraticForm::zero(&Lattice::new(3, "Y"));
        assert!(is_weyl_invariant(&wrong, &gl2()).is_err());
    }

    #[test]
    fn display_and_matrix() {
        let q =
            QuadraticForm::from_matrix(Lattice::new(2, "Y"), &DMatrix::from_row_slice(2, 2, &[1, 2, 0, 3])).unwrap();
        assert_eq!(q.to_string(), "y1^2+2*y1*y2+3*y2^2");
        assert_eq!(q.eval(&[1, 0]), 1);
        assert_eq!(q.eval(&[0, 1]), 3);
        assert_eq!(q.bilinear(&[1, 0], &[0, 1]), 2);
    }

    proptest! {
        #[test]
        fn bilinear_matrix_polarizes(
            c in prop::collection::vec(-5i64..=5, 9),
            y1 in prop::collection::vec(-6i64..=6, 3),
            y2 in prop::collection::vec(-6i64..=6, 3),
        ) {
            let m = DMatrix::from_row_slice(3, 3, &c);
            let q = QuadraticForm::from_matrix(Lattice::new(3, "Y"), &m).unwrap();
            let sum: Vec<i64> = y1.iter().zip(&y2).map(|(a, b)| a + b).collect();
            prop_assert_eq!(q.bilinear(&y1, &y2), q.eval(&sum) - q.eval(&y1) - q.eval(&y2));
            let neg: Vec<i64> = y1.iter().map(|a| -a).collect();
            prop_assert_eq!(q.eval(&neg), q.eval(&y1));
            let b = q.bilinear_matrix();
            for i in 0..3 {
                prop_assert_eq!(b[(i, i)], 2 * q.coefficient(i, i));
                for j in i + 1..3 {
                    prop_assert_eq!(b[(i, j)], q.coefficient(i, j));
                    prop_assert_eq!(b[(j, i)], q.coefficient(i, j));
                }
            }
            let c = BilinearIncarnation::new(Lattice::new(3, "Y"), m).unwrap();
            prop_assert_eq!(q.eval(&y1), c.eval(&y1, &y1));
        }
    }
}
