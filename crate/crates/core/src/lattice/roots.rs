use std::collections::BTreeSet;

use nalgebra::DMatrix;

use super::{integer_kernel, pairing, snf, IntMatrix, Lattice, LatticeMap};
use crate::error::{Error, Result};

/// Largest coroot system accepted before the reflection closure is
/// declared infinite.
const MAX_COROOTS: usize = 4096;

/// A split root datum given by simple roots in `X` and simple coroots in
/// `Y`, both coordinate lattices paired by the dot product.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootDatum {
    label: String,
    x: Lattice,
    y: Lattice,
    roots: Vec<Vec<i64>>,
    coroots: Vec<Vec<i64>>,
    coroot_set: BTreeSet<Vec<i64>>,
}

impl RootDatum {
    pub fn new(label: impl Into<String>, rank: usize, roots: Vec<Vec<i64>>, coroots: Vec<Vec<i64>>) -> Result<Self> {
        let label = label.into();
        let bad = |m: String| Err(Error::InvalidRootDatum(m));
        if roots.len() != coroots.len() {
            return bad(format!("{} roots but {} coroots", roots.len(), coroots.len()));
        }
        if let Some(v) = roots.iter().chain(&coroots).find(|v| v.len() != rank) {
            return bad(format!("vector {v:?} does not have length {rank}"));
        }
        let k = roots.len();
        for i in 0..k {
            for j in 0..k {
                let a = pairing(&roots[i], &coroots[j]);
                if i == j && a != 2 {
                    return bad(format!("⟨α_{i}, α_{i}^∨⟩ = {a}, expected 2"));
                }
                if i != j {
                    let b = pairing(&roots[j], &coroots[i]);
                    if a > 0 || (a == 0) != (b == 0) {
                        return bad(format!("pairings {a}, {b} between simple roots {i}, {j}"));
                    }
                }
            }
        }
        let cols = |vs: &[Vec<i64>]| DMatrix::from_fn(rank, vs.len(), |i, j| vs[j][i]);
        if snf::rank(&cols(&coroots))? != k || snf::rank(&cols(&roots))? != k {
            return bad("simple roots and coroots must be linearly independent".into());
        }
        let mut rd = RootDatum {
            x: Lattice::new(rank, format!("X({label})")),
            y: Lattice::new(rank, format!("Y({label})")),
            label,
            roots,
            coroots,
            coroot_set: BTreeSet::new(),
        };
        rd.coroot_set = rd.close_coroots()?;
        Ok(rd)
    }

    fn reflect(&self, i: usize, y: &[i64]) -> Vec<i64> {
        let c = pairing(&self.roots[i], y);
        y.iter().zip(&self.coroots[i]).map(|(a, b)| a - c * b).collect()
    }

    fn close_coroots(&self) -> Result<BTreeSet<Vec<i64>>> {
        let mut seen: BTreeSet<Vec<i64>> = self.coroots.iter().cloned().collect();
        let mut frontier: Vec<Vec<i64>> = self.coroots.clone();
        while let Some(y) = frontier.pop() {
            for i in 0..self.roots.len() {
                let z = self.reflect(i, &y);
                if seen.insert(z.clone()) {
                    if seen.len() > MAX_COROOTS {
                        return Err(Error::InvalidRootDatum(
                            "the Weyl group orbit of the coroots is not finite".into(),
                        ));
                    }
                    frontier.push(z);
                }
            }
        }
        for i in 0..self.roots.len() {
            for y in &seen {
                if !seen.contains(&self.reflect(i, y)) {
                    return Err(Error::InvalidRootDatum(format!(
                        "reflection {i} does not permute the coroots"
                    )));
                }
            }
        }
        Ok(seen)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn rank(&self) -> usize {
        self.y.rank()
    }

    pub fn x_lattice(&self) -> &Lattice {
        &self.x
    }

    pub fn y_lattice(&self) -> &Lattice {
        &self.y
    }

    pub fn roots(&self) -> &[Vec<i64>] {
        &self.roots
    }

    pub fn coroots(&self) -> &[Vec<i64>] {
        &self.coroots
    }

    pub fn num_simple(&self) -> usize {
        self.roots.len()
    }

    /// All coroots (the Weyl orbit of the simple ones).
    pub fn coroot_set(&self) -> &BTreeSet<Vec<i64>> {
        &self.coroot_set
    }

    /// The coroot lattice, with the simple coroots as basis.
    pub fn y_sc(&self) -> Lattice {
        Lattice::new(self.roots.len(), format!("Y_SC({})", self.label))
    }

    /// `p: Y_SC → Y`, whose columns are the simple coroots.
    pub fn coroot_inclusion(&self) -> LatticeMap {
        let n = self.rank();
        let m = DMatrix::from_fn(n, self.coroots.len(), |i, j| self.coroots[j][i]);
        LatticeMap::new(self.y_sc(), self.y.clone(), m).expect("dimensions match")
    }

    pub fn is_semisimple(&self) -> bool {
        self.roots.len() == self.rank()
    }

    /// The simple reflection `s_i` restricted to `Y_SC`, in the coroot basis.
    pub fn reflection_on_sc(&self, i: usize) -> Result<IntMatrix> {
        self.check_index(i)?;
        let k = self.roots.len();
        Ok(DMatrix::from_fn(k, k, |r, c| {
            let id = i64::from(r == c);
            if r == i {
                id - pairing(&self.roots[i], &self.coroots[c])
            } else {
                id
            }
        }))
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i < self.roots.len() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index: i,
                len: self.roots.len(),
            })
        }
    }
}

/// `s_i(y) = y − ⟨α_i, y⟩ α_i^∨` on `Y`.
pub fn weyl_reflection(rd: &RootDatum, i: usize) -> Result<LatticeMap> {
    rd.check_index(i)?;
    let n = rd.rank();
    let m = DMatrix::from_fn(n, n, |r, c| i64::from(r == c) - rd.coroots[i][r] * rd.roots[i][c]);
    LatticeMap::new(rd.y.clone(), rd.y.clone(), m)
}

/// All elements of the Weyl group acting on `Y`, as matrices.
pub fn weyl_group(rd: &RootDatum) -> Result<Vec<IntMatrix>> {
    let gens: Vec<IntMatrix> = (0..rd.num_simple())
        .map(|i| weyl_reflection(rd, i).map(|s| s.matrix().clone()))
        .collect::<Result<_>>()?;
    let n = rd.rank();
    let mut seen = BTreeSet::new();
    let id = DMatrix::<i64>::identity(n, n);
    seen.insert(id.iter().copied().collect::<Vec<_>>());
    let mut out = vec![id];
    let mut k = 0;
    while k < out.len() {
        for g in &gens {
            let w = g * &out[k];
            if seen.insert(w.iter().copied().collect::<Vec<_>>()) {
                if out.len() >= MAX_COROOTS {
                    return Err(Error::InvalidRootDatum("Weyl group too large".into()));
                }
                out.push(w);
            }
        }
        k += 1;
    }
    Ok(out)
}

/// A basis of the Weyl-invariant homomorphisms `Y_SC → Z`, as row vectors
/// in the coroot basis.
pub fn weyl_invariant_functionals(rd: &RootDatum) -> Result<Vec<Vec<i64>>> {
    let k = rd.num_simple();
    let mut rows: Vec<i64> = Vec::new();
    for i in 0..k {
        let s = rd.reflection_on_sc(i)?;
        let d = s.transpose() - DMatrix::<i64>::identity(k, k);
        rows.extend(d.transpose().iter().copied());
    }
    let m = DMatrix::from_row_slice(k * k, k, &rows);
    integer_kernel(&m)
}
