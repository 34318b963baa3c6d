//! Smith normal form and the integer linear solvers built on it.

use std::fmt;

use nalgebra::DMatrix;

use super::{IntMatrix, LatticeMap};
use crate::error::{Error, Result};

/// `U · M · V = D` with `U`, `V` unimodular and `D` diagonal, `d₁ | d₂ | …`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Snf {
    pub u: IntMatrix,
    pub u_inv: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    pub rank: usize,
}

impl Snf {
    /// The nonzero invariant factors.
    pub fn invariants(&self) -> Vec<i64> {
        (0..self.rank).map(|i| self.d[(i, i)]).collect()
    }
}

struct Work {
    a: Vec<Vec<i128>>,
    u: Vec<Vec<i128>>,
    ui: Vec<Vec<i128>>,
    v: Vec<Vec<i128>>,
    rows: usize,
    cols: usize,
}

impl Work {
    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap(i, j);
        self.u.swap(i, j);
        for r in self.ui.iter_mut() {
            r.swap(i, j);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        for r in self.a.iter_mut() {
            r.swap(i, j);
        }
        for r in self.v.iter_mut() {
            r.swap(i, j);
        }
    }

    /// row_i += c · row_t
    fn add_row(&mut self, i: usize, t: usize, c: i128) {
        for k in 0..self.cols {
            self.a[i][k] += c * self.a[t][k];
        }
        for k in 0..self.rows {
            self.u[i][k] += c * self.u[t][k];
            self.ui[k][t] -= c * self.ui[k][i];
        }
    }

    /// col_j += c · col_t
    fn add_col(&mut self, j: usize, t: usize, c: i128) {
        for k in 0..self.rows {
            self.a[k][j] += c * self.a[k][t];
        }
        for k in 0..self.cols {
            self.v[k][j] += c * self.v[k][t];
        }
    }

    fn negate_row(&mut self, t: usize) {
        for x in self.a[t].iter_mut() {
            *x = -*x;
        }
        for x in self.u[t].iter_mut() {
            *x = -*x;
        }
        for r in self.ui.iter_mut() {
            r[t] = -r[t];
        }
    }

    fn min_in(&self, t: usize, cross_only: bool) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        let consider = |i: usize, j: usize, best: &mut Option<(usize, usize)>| {
            let x = self.a[i][j];
            if x != 0 && best.is_none_or(|(bi, bj)| x.abs() < self.a[bi][bj].abs()) {
                *best = Some((i, j));
            }
        };
        if cross_only {
            for j in t..self.cols {
                consider(t, j, &mut best);
            }
            for i in t + 1..self.rows {
                consider(i, t, &mut best);
            }
        } else {
            for i in t..self.rows {
                for j in t..self.cols {
                    consider(i, j, &mut best);
                }
            }
        }
        best
    }

    fn bounded(&self) -> bool {
        const LIMIT: i128 = 1 << 62;
        [&self.a, &self.u, &self.ui, &self.v]
            .iter()
            .all(|m| m.iter().flatten().all(|x| x.abs() < LIMIT))
    }
}

fn to_i128(m: &IntMatrix) -> Vec<Vec<i128>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)] as i128).collect())
        .collect()
}

fn identity(n: usize) -> Vec<Vec<i128>> {
    (0..n).map(|i| (0..n).map(|j| i128::from(i == j)).collect()).collect()
}

fn to_matrix(rows: usize, cols: usize, a: &[Vec<i128>]) -> Result<IntMatrix> {
    let mut out = DMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            out[(i, j)] = i64::try_from(a[i][j]).map_err(|_| Error::Overflow("Smith normal form"))?;
        }
    }
    Ok(out)
}

pub fn smith_normal_form(m: &IntMatrix) -> Result<Snf> {
    let (rows, cols) = (m.nrows(), m.ncols());
    let mut w = Work {
        a: to_i128(m),
        u: identity(rows),
        ui: identity(rows),
        v: identity(cols),
        rows,
        cols,
    };
    let mut t = 0;
    while t < rows.min(cols) {
        let Some((pi, pj)) = w.min_in(t, false) else {
            break;
        };
        w.swap_rows(t, pi);
        w.swap_cols(t, pj);
        loop {
            for i in t + 1..rows {
                let q = w.a[i][t].div_euclid(w.a[t][t]);
                if q != 0 {
                    w.add_row(i, t, -q);
                }
            }
            for j in t + 1..cols {
                let q = w.a[t][j].div_euclid(w.a[t][t]);
                if q != 0 {
                    w.add_col(j, t, -q);
                }
            }
            if !w.bounded() {
                return Err(Error::Overflow("Smith normal form"));
            }
            let clear = (t + 1..rows).all(|i| w.a[i][t] == 0) && (t + 1..cols).all(|j| w.a[t][j] == 0);
            if !clear {
                let (pi, pj) = w.min_in(t, true).expect("nonzero entry remains");
                w.swap_rows(t, pi);
                w.swap_cols(t, pj);
                continue;
            }
            let d = w.a[t][t];
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| w.a[i][j] % d != 0));
            match bad {
                Some(i) => w.add_row(t, i, 1),
                None => break,
            }
        }
        if w.a[t][t] < 0 {
            w.negate_row(t);
        }
        t += 1;
    }
    let snf = Snf {
        u: to_matrix(rows, rows, &w.u)?,
        u_inv: to_matrix(rows, rows, &w.ui)?,
        d: to_matrix(rows, cols, &w.a)?,
        v: to_matrix(cols, cols, &w.v)?,
        rank: t,
    };
    Ok(snf)
}

/// Rank over `Q`.
pub fn rank(m: &IntMatrix) -> Result<usize> {
    Ok(smith_normal_form(m)?.rank)
}

/// A basis (as column vectors) of `{x ∈ Zⁿ : m·x = 0}`.
pub fn integer_kernel(m: &IntMatrix) -> Result<Vec<Vec<i64>>> {
    let s = smith_normal_form(m)?;
    Ok((s.rank..m.ncols())
        .map(|j| s.v.column(j).iter().copied().collect())
        .collect())
}

/// An integer solution of `a · x = b`, if one exists.
pub fn solve_integer(a: &IntMatrix, b: &[i64]) -> Result<Option<Vec<i64>>> {
    if b.len() != a.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "{} right-hand sides for {} rows",
            b.len(),
            a.nrows()
        )));
    }
    let s = smith_normal_form(a)?;
    let z: Vec<i128> = (0..a.nrows())
        .map(|i| (0..a.nrows()).map(|j| s.u[(i, j)] as i128 * b[j] as i128).sum())
        .collect();
    let mut w = vec![0i128; a.ncols()];
    for (i, zi) in z.iter().enumerate() {
        if i < s.rank {
            let d = s.d[(i, i)] as i128;
            if zi % d != 0 {
                return Ok(None);
            }
            w[i] = zi / d;
        } else if *zi != 0 {
            return Ok(None);
        }
    }
    (0..a.ncols())
        .map(|i| {
            let x: i128 = (0..a.ncols()).map(|j| s.v[(i, j)] as i128 * w[j]).sum();
            i64::try_from(x).map_err(|_| Error::Overflow("integer solve"))
        })
        .collect::<Result<Vec<_>>>()
        .map(Some)
}

/// One unsolvable scalar equation `d · h = value` in SNF coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Obstruction {
    /// Row of the target (a coordinate of `Z`).
    pub row: usize,
    /// Column in the SNF basis of the source.
    pub column: usize,
    pub divisor: i64,
    pub value: i64,
}

impl fmt::Display for Obstruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}·h = {}", self.divisor, self.value)
    }
}

/// The solution set `particular + {h : h ∘ p = 0}` of `h ∘ p = psi`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomExtension {
    pub particular: LatticeMap,
    /// Row vectors `w` on `Y` with `w · p = 0`; the kernel is all maps whose
    /// rows lie in their span.
    pub kernel: Vec<Vec<i64>>,
    /// Basis vectors of `Y` on which `particular` vanishes, completing the
    /// image of `p` to a basis up to finite index.
    pub complement: Vec<Vec<i64>>,
    /// Invariant factors of `p`; entries above 1 describe the torsion of
    /// `Y / p(Y_SC)`.
    pub invariants: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Extension {
    Solved(HomExtension),
    Unsolvable {
        obstructions: Vec<Obstruction>,
        invariants: Vec<i64>,
    },
}

impl Extension {
    pub fn solution(&self) -> Option<&HomExtension> {
        match self {
            Extension::Solved(h) => Some(h),
            Extension::Unsolvable { .. } => None,
        }
    }
}

/// Solves `h ∘ p = psi` for `h: Y → Z` given injective `p: Y_SC → Y`.
pub fn extend_hom(p: &LatticeMap, psi: &LatticeMap) -> Result<Extension> {
    if p.source() != psi.source() {
        return Err(Error::DimensionMismatch(format!(
            "p has source {} but psi has source {}",
            p.source(),
            psi.source()
        )));
    }
    let pm = p.matrix();
    let snf = smith_normal_form(pm)?;
    if snf.rank != pm.ncols() {
        return Err(Error::NotInjective(format!("p has rank {} < {}", snf.rank, pm.ncols())));
    }
    let (n, k, r) = (pm.nrows(), pm.ncols(), psi.matrix().nrows());
    let rhs = psi.matrix() * &snf.v;
    let mut g = DMatrix::<i64>::zeros(r, n);
    let mut obstructions = Vec::new();
    for j in 0..k {
        let d = snf.d[(j, j)];
        for row in 0..r {
            let value = rhs[(row, j)];
            if value % d != 0 {
                obstructions.push(Obstruction {
                    row,
                    column: j,
                    divisor: d,
                    value,
                });
            } else {
                g[(row, j)] = value / d;
            }
        }
    }
    let invariants = snf.invariants();
    if !obstructions.is_empty() {
        return Ok(Extension::Unsolvable {
            obstructions,
            invariants,
        });
    }
    let h = g * &snf.u;
    let kernel = (k..n).map(|j| snf.u.row(j).iter().copied().collect()).collect();
    let complement = (k..n).map(|j| snf.u_inv.column(j).iter().copied().collect()).collect();
    Ok(Extension::Solved(HomExtension {
        particular: LatticeMap::new(p.target().clone(), psi.target().clone(), h)?,
        kernel,
        complement,
        invariants,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Lattice;
    use proptest::prelude::*;

    fn mat(rows: &[&[i64]]) -> IntMatrix {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        DMatrix::from_fn(r, c, |i, j| rows[i][j])
    }

    fn det(m: &IntMatrix) -> i64 {
        m.map(|x| x as f64).determinant().round() as i64
    }

    fn check(m: &IntMatrix) -> Snf {
        let s = smith_normal_form(m).unwrap();
        assert_eq!(&s.u * m * &s.v, s.d);
        assert_eq!(&s.u * &s.u_inv, DMatrix::identity(m.nrows(), m.nrows()));
        assert_eq!(det(&s.u).abs(), 1);
        assert_eq!(det(&s.v).abs(), 1);
        for i in 0..s.d.nrows() {
            for j in 0..s.d.ncols() {
                if i != j {
                    assert_eq!(s.d[(i, j)], 0);
                }
            }
        }
        let inv = s.invariants();
        for w in inv.windows(2) {
            assert_eq!(w[1] % w[0], 0);
        }
        assert!(inv.iter().all(|&d| d > 0));
        s
    }

    #[test]
    fn examples() {
        let s = check(&DMatrix::identity(3, 3));
        assert_eq!(s.d, DMatrix::identity(3, 3));
        let s = check(&mat(&[&[2, 0], &[0, 3]]));
        assert_eq!(s.invariants(), vec![1, 6]);
        let z = DMatrix::zeros(2, 3);
        let s = check(&z);
        assert_eq!(s.rank, 0);
        assert_eq!(s.u, DMatrix::identity(2, 2));
        assert_eq!(s.v, DMatrix::identity(3, 3));
    }

    #[test]
    fn integer_solve() {
        let a = mat(&[&[2, 0], &[0, 3], &[2, 3]]);
        assert_eq!(solve_integer(&a, &[4, 3, 7]).unwrap(), Some(vec![2, 1]));
        assert_eq!(solve_integer(&a, &[1, 0, 1]).unwrap(), None);
        assert_eq!(solve_integer(&a, &[2, 3, 0]).unwrap(), None);
        let b = mat(&[&[1, -1, 0]]);
        let x = solve_integer(&b, &[5]).unwrap().unwrap();
        assert_eq!(x[0] - x[1], 5);
    }

    #[test]
    fn kernel() {
        let k = integer_kernel(&mat(&[&[1, 2, 3]])).unwrap();
        assert_eq!(k.len(), 2);
        for x in k {
            assert_eq!(x[0] + 2 * x[1] + 3 * x[2], 0);
        }
    }

    fn map1(src: usize, tgt: usize, m: IntMatrix) -> LatticeMap {
        LatticeMap::new(Lattice::new(src, "S"), Lattice::new(tgt, "T"), m).unwrap()
    }

    #[test]
    fn extend_examples() {
        let p = map1(1, 1, mat(&[&[2]]));
        let bad = extend_hom(&p, &map1(1, 1, mat(&[&[1]]))).unwrap();
        match bad {
            Extension::Unsolvable { obstructions, .. } => {
                assert_eq!(obstructions[0].to_string(), "2·h = 1");
            }
            _ => panic!("expected obstruction"),
        }
        let ok = extend_hom(&p, &map1(1, 1, mat(&[&[4]]))).unwrap();
        assert_eq!(ok.solution().unwrap().particular.matrix(), &mat(&[&[2]]));
        let id = map1(2, 2, DMatrix::identity(2, 2));
        let psi = map1(2, 1, mat(&[&[3, -5]]));
        let sol = extend_hom(&id, &psi).unwrap();
        assert_eq!(sol.solution().unwrap().particular.matrix(), psi.matrix());
        assert!(extend_hom(&map1(1, 2, mat(&[&[0], &[0]])), &map1(1, 1, mat(&[&[0]]))).is_err());
    }

    fn brute(p: &IntMatrix, psi: &IntMatrix) -> Vec<Vec<i64>> {
        let n = p.nrows();
        let mut out = Vec::new();
        let range: Vec<i64> = (-10..=10).collect();
        let mut h = vec![-10i64; n];
        loop {
            let row = DMatrix::from_row_slice(1, n, &h);
            if &(&row * p) == psi {
                out.push(h.clone());
            }
            let mut i = 0;
            while i < n {
                if h[i] < 10 {
                    h[i] += 1;
                    break;
                }
                h[i] = range[0];
                i += 1;
            }
            if i == n {
                return out;
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn snf_is_valid(entries in prop::collection::vec(-9i64..=9, 12), r in 1usize..=4, c in 1usize..=3) {
            let m = DMatrix::from_fn(r, c, |i, j| entries[i * 3 + j]);
            check(&m);
        }

        #[test]
        fn extend_hom_matches_exhaustive_search(
            n in 1usize..=2,
            k in 1usize..=2,
            pe in prop::collection::vec(-4i64..=4, 4),
            se in prop::collection::vec(-4i64..=4, 2),
        ) {
            prop_assume!(k <= n);
            let p = DMatrix::from_fn(n, k, |i, j| pe[i * 2 + j]);
            prop_assume!(rank(&p).unwrap() == k);
            let psi = DMatrix::from_fn(1, k, |_, j| se[j]);
            let found = brute(&p, &psi);
            let res = extend_hom(&map1(k, n, p.clone()), &map1(k, 1, psi.clone())).unwrap();
            match res.solution() {
                Some(sol) => {
                    prop_assert_eq!(&(sol.particular.matrix() * &p), &psi);
                    for w in &sol.kernel {
                        let row = DMatrix::from_row_slice(1, n, w);
                        prop_assert!((&row * &p).iter().all(|&x| x == 0));
                    }
                    prop_assert_eq!(sol.kernel.len(), n - k);
                    if n == k {
                        prop_assert!(found.len() <= 1);
                    }
                    let part: Vec<i64> = sol.particular.matrix().iter().copied().collect();
                    if part.iter().all(|x| x.abs() <= 10) {
                        prop_assert!(found.contains(&part));
                    }
                }
                None => prop_assert!(found.is_empty()),
            }
        }
    }
}
