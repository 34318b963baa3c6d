//! Free abelian groups of finite rank and integer linear algebra.

mod forms;
mod roots;
pub mod snf;

use std::fmt;

use nalgebra::DMatrix;

pub use forms::{is_weyl_invariant, BilinearIncarnation, QuadraticForm};
pub use roots::{weyl_group, weyl_invariant_functionals, weyl_reflection, RootDatum};
pub use snf::{
    extend_hom, integer_kernel, smith_normal_form, solve_integer, Extension, HomExtension, Obstruction, Snf,
};

use crate::error::{Error, Result};

pub type IntMatrix = DMatrix<i64>;

/// Builds a matrix from rows; every row must have length `cols`.
pub fn matrix_from_rows(rows: &[Vec<i64>], cols: usize) -> Result<IntMatrix> {
    if let Some(r) = rows.iter().find(|r| r.len() != cols) {
        return Err(Error::DimensionMismatch(format!(
            "row of length {} where {cols} was expected",
            r.len()
        )));
    }
    Ok(DMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j]))
}

pub fn matrix_rows(m: &IntMatrix) -> Vec<Vec<i64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

/// Dot product `⟨x, y⟩` of coordinate vectors.
pub fn pairing(x: &[i64], y: &[i64]) -> i64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// A free abelian group `Zⁿ` with a label.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Lattice {
    rank: usize,
    label: String,
}

impl Lattice {
    pub fn new(rank: usize, label: impl Into<String>) -> Self {
        Lattice {
            rank,
            label: label.into(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn basis(&self, i: usize) -> Vec<i64> {
        let mut e = vec![0; self.rank];
        e[i] = 1;
        e
    }

    pub fn check(&self, y: &[i64]) -> Result<()> {
        if y.len() == self.rank {
            Ok(())
        } else {
            Err(Error::DimensionMismatch(format!(
                "vector of length {} in {self}",
                y.len()
            )))
        }
    }
}

impl fmt::Display for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(rank {})", self.label, self.rank)
    }
}

/// A homomorphism of lattices, stored as a `target.rank × source.rank`
/// matrix acting on column vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeMap {
    source: Lattice,
    target: Lattice,
    matrix: IntMatrix,
}

impl LatticeMap {
    pub fn new(source: Lattice, target: Lattice, matrix: IntMatrix) -> Result<Self> {
        if matrix.nrows() != target.rank || matrix.ncols() != source.rank {
            return Err(Error::DimensionMismatch(format!(
                "{}×{} matrix for a map {source} → {target}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(LatticeMap { source, target, matrix })
    }

    pub fn identity(l: &Lattice) -> Self {
        LatticeMap {
            source: l.clone(),
            target: l.clone(),
            matrix: DMatrix::identity(l.rank, l.rank),
        }
    }

    pub fn zero(source: &Lattice, target: &Lattice) -> Self {
        LatticeMap {
            source: source.clone(),
            target: target.clone(),
            matrix: DMatrix::zeros(target.rank, source.rank),
        }
    }

    pub fn source(&self) -> &Lattice {
        &self.source
    }

    pub fn target(&self) -> &Lattice {
        &self.target
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn apply(&self, y: &[i64]) -> Vec<i64> {
        assert_eq!(y.len(), self.source.rank, "vector length");
        (0..self.target.rank)
            .map(|i| (0..self.source.rank).map(|j| self.matrix[(i, j)] * y[j]).sum())
            .collect()
    }

    /// `self ∘ first`.
    pub fn compose(&self, first: &LatticeMap) -> Result<LatticeMap> {
        if first.target.rank != self.source.rank {
            return Err(Error::DimensionMismatch(format!(
                "cannot compose {} → {} after {} → {}",
                self.source, self.target, first.source, first.target
            )));
        }
        Ok(LatticeMap {
            source: first.source.clone(),
            target: self.target.clone(),
            matrix: &self.matrix * &first.matrix,
        })
    }

    pub fn is_injective(&self) -> Result<bool> {
        Ok(snf::rank(&self.matrix)? == self.source.rank)
    }
}
