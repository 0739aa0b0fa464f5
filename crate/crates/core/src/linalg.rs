//! Dense exact linear algebra over `Q(i)`.
//!
//! Elimination always picks the leftmost nonzero column and the topmost row
//! carrying it, so every basis produced here is reproducible bit for bit.

use std::fmt;

use num_traits::{One, Zero};

use crate::scalar::GaussianRational as Q;
use crate::Error;

/// A dense row-major matrix of exact scalars.
#[derive(Clone, PartialEq, Eq)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Q>,
}

impl ExactMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: vec![Q::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Q::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Q>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self { rows: r, cols: c, entries: rows.into_iter().flatten().collect() }
    }

    /// Builds a `rows × cols` matrix whose `j`-th column is `columns[j]`.
    pub fn from_columns(rows: usize, columns: &[Vec<Q>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length mismatch");
            for (i, x) in col.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        m
    }

    pub fn diagonal(entries: &[Q]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, x) in entries.iter().enumerate() {
            m.set(i, i, x.clone());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Q {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Q) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Q] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<Q> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn row_vecs(&self) -> Vec<Vec<Q>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    pub fn conj_transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).conj());
            }
        }
        t
    }

    pub fn scale(&self, s: &Q) -> Self {
        Self { rows: self.rows, cols: self.cols, entries: self.entries.iter().map(|x| x * s).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch in add");
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect();
        Self { rows: self.rows, cols: self.cols, entries }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch in sub");
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect();
        Self { rows: self.rows, cols: self.cols, entries }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "shape mismatch in mul");
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = other.get(k, c);
                    if !b.is_zero() {
                        let idx = r * out.cols + c;
                        out.entries[idx] += &(a * b);
                    }
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[Q]) -> Vec<Q> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        (0..self.rows).map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    /// Stacks `other` below `self`.
    pub fn vstack(&self, other: &Self) -> Self {
        if self.rows == 0 {
            return Self {
                rows: other.rows,
                cols: if other.rows == 0 { self.cols } else { other.cols },
                entries: other.entries.clone(),
            };
        }
        if other.rows == 0 {
            return self.clone();
        }
        assert_eq!(self.cols, other.cols, "column mismatch in vstack");
        let mut entries = self.entries.clone();
        entries.extend(other.entries.iter().cloned());
        Self { rows: self.rows + other.rows, cols: self.cols, entries }
    }

    /// Places `other` to the right of `self`.
    pub fn hstack(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows, "row mismatch in hstack");
        let mut out = Self::zeros(self.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(r, c, self.get(r, c).clone());
            }
            for c in 0..other.cols {
                out.set(r, self.cols + c, other.get(r, c).clone());
            }
        }
        out
    }

    /// Inverse of a square matrix, `None` when singular.
    pub fn inverse(&self) -> Option<Self> {
        assert_eq!(self.rows, self.cols, "inverse of non-square matrix");
        let n = self.rows;
        let (r, pivots) = rref_with_pivots(&self.hstack(&Self::identity(n)));
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, r.get(i, n + j).clone());
            }
        }
        Some(inv)
    }

    /// Determinant by fraction-free-free Gaussian elimination (exact anyway).
    pub fn determinant(&self) -> Q {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let n = self.rows;
        let mut m = self.clone();
        let mut det = Q::one();
        for col in 0..n {
            let Some(p) = (col..n).find(|&r| !m.get(r, col).is_zero()) else {
                return Q::zero();
            };
            if p != col {
                m.swap_rows(p, col);
                det = -det;
            }
            let pivot = m.get(col, col).clone();
            det = &det * &pivot;
            let inv = pivot.inv().unwrap();
            for r in col + 1..n {
                let factor = m.get(r, col) * &inv;
                if factor.is_zero() {
                    continue;
                }
                for c in col..n {
                    let v = m.get(r, c) - &(&factor * m.get(col, c));
                    m.set(r, c, v);
                }
            }
        }
        det
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.entries.swap(a * self.cols + c, b * self.cols + c);
        }
    }
}

impl fmt::Debug for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ExactMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(ToString::to_string).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Reduced row echelon form together with its pivot columns.
pub fn rref_with_pivots(m: &ExactMatrix) -> (ExactMatrix, Vec<usize>) {
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..a.cols {
        if row == a.rows {
            break;
        }
        let Some(p) = (row..a.rows).find(|&r| !a.get(r, col).is_zero()) else {
            continue;
        };
        a.swap_rows(p, row);
        let inv = a.get(row, col).inv().unwrap();
        for c in col..a.cols {
            let v = a.get(row, c) * &inv;
            a.set(row, c, v);
        }
        for r in 0..a.rows {
            if r == row {
                continue;
            }
            let factor = a.get(r, col).clone();
            if factor.is_zero() {
                continue;
            }
            for c in col..a.cols {
                let v = a.get(r, c) - &(&factor * a.get(row, c));
                a.set(r, c, v);
            }
        }
        pivots.push(col);
        row += 1;
    }
    (a, pivots)
}

/// The reduced row echelon form of `m` and its rank.
pub fn rref(m: &ExactMatrix) -> (ExactMatrix, usize) {
    let (r, pivots) = rref_with_pivots(m);
    (r, pivots.len())
}

pub fn rank(m: &ExactMatrix) -> usize {
    rref_with_pivots(m).1.len()
}

/// A linear subspace of `Q(i)^ambient`, stored as an RREF basis.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Subspace {
    ambient: usize,
    basis: ExactMatrix,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Self { ambient, basis: ExactMatrix::zeros(0, ambient), pivots: Vec::new() }
    }

    pub fn full(ambient: usize) -> Self {
        Self { ambient, basis: ExactMatrix::identity(ambient), pivots: (0..ambient).collect() }
    }

    /// The span of the given vectors.
    pub fn span(ambient: usize, vectors: &[Vec<Q>]) -> Self {
        if vectors.is_empty() {
            return Self::zero(ambient);
        }
        let m = ExactMatrix::from_rows(vectors.to_vec());
        assert_eq!(m.cols(), ambient, "vector length mismatch in span");
        Self::from_row_space(&m)
    }

    fn from_row_space(m: &ExactMatrix) -> Self {
        let ambient = m.cols();
        let (r, pivots) = rref_with_pivots(m);
        let rows: Vec<Vec<Q>> = (0..pivots.len()).map(|i| r.row(i).to_vec()).collect();
        let basis = if rows.is_empty() { ExactMatrix::zeros(0, ambient) } else { ExactMatrix::from_rows(rows) };
        Self { ambient, basis, pivots }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    pub fn basis(&self) -> &ExactMatrix {
        &self.basis
    }

    pub fn basis_vectors(&self) -> Vec<Vec<Q>> {
        self.basis.row_vecs()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn contains(&self, v: &[Q]) -> bool {
        assert_eq!(v.len(), self.ambient, "vector length mismatch in contains");
        // Reduce v against the RREF rows; it lies in the span iff the residue is zero.
        let mut residue = v.to_vec();
        for (i, &p) in self.pivots.iter().enumerate() {
            let c = residue[p].clone();
            if c.is_zero() {
                continue;
            }
            for (j, x) in self.basis.row(i).iter().enumerate() {
                residue[j] -= &(&c * x);
            }
        }
        residue.iter().all(Zero::is_zero)
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        other.ambient == self.ambient && other.basis_vectors().iter().all(|v| self.contains(v))
    }
}

/// Right null space of `m`.
pub fn kernel(m: &ExactMatrix) -> Subspace {
    let cols = m.cols();
    let (r, pivots) = rref_with_pivots(m);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let vectors: Vec<Vec<Q>> = free
        .iter()
        .map(|&f| {
            let mut v = vec![Q::zero(); cols];
            v[f] = Q::one();
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = -r.get(i, f);
            }
            v
        })
        .collect();
    Subspace::span(cols, &vectors)
}

/// Column space of `m`, in ambient dimension `m.rows()`.
pub fn image(m: &ExactMatrix) -> Subspace {
    Subspace::from_row_space(&m.transpose())
}

fn check_ambient(a: &Subspace, b: &Subspace) -> Result<(), Error> {
    if a.ambient != b.ambient {
        return Err(Error::Dimension(format!(
            "subspaces live in different ambient spaces ({} vs {})",
            a.ambient, b.ambient
        )));
    }
    Ok(())
}

pub fn subspace_sum(a: &Subspace, b: &Subspace) -> Result<Subspace, Error> {
    check_ambient(a, b)?;
    Ok(Subspace::from_row_space(&a.basis.vstack(&b.basis)))
}

pub fn subspace_intersect(a: &Subspace, b: &Subspace) -> Result<Subspace, Error> {
    check_ambient(a, b)?;
    if a.dim() == 0 || b.dim() == 0 {
        return Ok(Subspace::zero(a.ambient));
    }
    // Pairs (x, y) with xA = yB, i.e. the kernel of [Aᵀ | -Bᵀ].
    let stacked = a.basis.transpose().hstack(&b.basis.transpose().scale(&-Q::one()));
    let k = kernel(&stacked);
    let da = a.dim();
    let vectors: Vec<Vec<Q>> = k
        .basis_vectors()
        .iter()
        .map(|xy| {
            let x = &xy[..da];
            let mut v = vec![Q::zero(); a.ambient];
            for (coef, row) in x.iter().zip(a.basis_vectors()) {
                for (acc, r) in v.iter_mut().zip(row) {
                    *acc += &(coef * r);
                }
            }
            v
        })
        .collect();
    Ok(Subspace::span(a.ambient, &vectors))
}

/// One solution of `m x = rhs` with every free variable set to zero.
pub fn solve(m: &ExactMatrix, rhs: &[Q]) -> Option<Vec<Q>> {
    assert_eq!(rhs.len(), m.rows(), "rhs length mismatch in solve");
    let cols = m.cols();
    let aug = m.hstack(&ExactMatrix::from_columns(m.rows(), &[rhs.to_vec()]));
    let (r, pivots) = rref_with_pivots(&aug);
    if pivots.last() == Some(&cols) {
        return None;
    }
    let mut x = vec![Q::zero(); cols];
    for (i, &p) in pivots.iter().enumerate() {
        x[p] = r.get(i, cols).clone();
    }
    Some(x)
}

fn check_contained(space: &Subspace, sub: &Subspace) -> Result<(), Error> {
    check_ambient(space, sub)?;
    if !space.contains_subspace(sub) {
        return Err(Error::Dimension("quotient: subspace is not contained in space".into()));
    }
    Ok(())
}

pub fn quotient_dim(space: &Subspace, sub: &Subspace) -> Result<usize, Error> {
    check_contained(space, sub)?;
    Ok(space.dim() - sub.dim())
}

/// Representatives of `space / sub`: the RREF rows of `space` whose pivots
/// are not pivots of `sub`.
pub fn quotient_basis(space: &Subspace, sub: &Subspace) -> Result<Vec<Vec<Q>>, Error> {
    check_contained(space, sub)?;
    Ok(space
        .pivots
        .iter()
        .enumerate()
        .filter(|(_, p)| !sub.pivots.contains(p))
        .map(|(i, _)| space.basis.row(i).to_vec())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64) -> Q {
        Q::from_integer(n)
    }

    fn i() -> Q {
        Q::i()
    }

    #[test]
    fn rref_examples() {
        let id = ExactMatrix::identity(2);
        assert_eq!(rref(&id), (id.clone(), 2));

        let m = ExactMatrix::from_rows(vec![vec![q(1), i()], vec![i(), q(-1)]]);
        let expected = ExactMatrix::from_rows(vec![vec![q(1), i()], vec![q(0), q(0)]]);
        assert_eq!(rref(&m), (expected, 1));

        let z = ExactMatrix::zeros(2, 3);
        assert_eq!(rref(&z), (z.clone(), 0));
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(kernel(&ExactMatrix::identity(3)).dim(), 0);
        assert_eq!(kernel(&ExactMatrix::zeros(3, 3)), Subspace::full(3));
        let k = kernel(&ExactMatrix::from_rows(vec![vec![q(1), i()]]));
        assert_eq!(k.dim(), 1);
        assert!(k.contains(&[-i(), q(1)]));
    }

    #[test]
    fn image_examples() {
        assert_eq!(image(&ExactMatrix::identity(3)), Subspace::full(3));
        assert_eq!(image(&ExactMatrix::zeros(3, 2)).dim(), 0);
        let u = [q(1), i(), q(2)];
        let v = [q(3), q(-1)];
        let outer = ExactMatrix::from_rows(u.iter().map(|a| v.iter().map(|b| a * b).collect()).collect());
        assert_eq!(image(&outer).dim(), 1);
    }

    #[test]
    fn sum_and_intersection() {
        let a = Subspace::span(2, &[vec![q(1), q(0)]]);
        let b = Subspace::span(2, &[vec![q(0), q(1)]]);
        assert_eq!(subspace_sum(&a, &a).unwrap(), a);
        assert_eq!(subspace_intersect(&a, &a).unwrap(), a);
        assert_eq!(subspace_sum(&a, &b).unwrap().dim(), 2);
        assert_eq!(subspace_intersect(&a, &b).unwrap().dim(), 0);

        let p1 = Subspace::span(3, &[vec![q(1), q(0), q(0)], vec![q(0), q(1), q(0)]]);
        let p2 = Subspace::span(3, &[vec![q(1), q(1), q(1)], vec![q(0), q(1), q(-1)]]);
        let meet = subspace_intersect(&p1, &p2).unwrap();
        assert_eq!(meet.dim(), 1);
        assert!(p1.contains_subspace(&meet) && p2.contains_subspace(&meet));

        let c = Subspace::span(3, &[vec![q(1), q(0), q(0)]]);
        assert!(subspace_sum(&a, &c).is_err());
    }

    #[test]
    fn solve_examples() {
        let rhs = vec![q(3), i()];
        assert_eq!(solve(&ExactMatrix::identity(2), &rhs), Some(rhs.clone()));
        assert_eq!(solve(&ExactMatrix::zeros(2, 2), &rhs), None);
        let m = ExactMatrix::from_rows(vec![vec![q(1), q(1)]]);
        assert_eq!(solve(&m, &[q(2)]), Some(vec![q(2), q(0)]));
    }

    #[test]
    fn quotient_examples() {
        let full = Subspace::full(3);
        assert_eq!(quotient_dim(&full, &full).unwrap(), 0);
        let line = Subspace::span(3, &[vec![q(1), q(1), q(0)]]);
        assert_eq!(quotient_dim(&full, &line).unwrap(), 2);
        let reps = quotient_basis(&full, &line).unwrap();
        assert_eq!(reps, vec![vec![q(0), q(1), q(0)], vec![q(0), q(0), q(1)]]);
        assert!(quotient_dim(&line, &full).is_err());
    }

    #[test]
    fn inverse_and_determinant() {
        let m = ExactMatrix::from_rows(vec![vec![q(1), i()], vec![q(1), -i()]]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), ExactMatrix::identity(2));
        assert_eq!(m.determinant(), q(-2) * i());
        let singular = ExactMatrix::from_rows(vec![vec![q(1), i()], vec![i(), q(-1)]]);
        assert!(singular.inverse().is_none());
        assert!(singular.determinant().is_zero());
    }

    fn small_scalar() -> impl Strategy<Value = Q> {
        (-2i64..=2, -1i64..=1).prop_map(|(a, b)| Q::complex(a, 1, b, 1))
    }

    fn small_matrix() -> impl Strategy<Value = ExactMatrix> {
        (1usize..=4, 1usize..=4).prop_flat_map(|(r, c)| {
            proptest::collection::vec(small_scalar(), r * c)
                .prop_map(move |e| ExactMatrix::from_rows(e.chunks(c).map(<[Q]>::to_vec).collect()))
        })
    }

    proptest! {
        #[test]
        fn rank_nullity(m in small_matrix()) {
            prop_assert_eq!(rank(&m) + kernel(&m).dim(), m.cols());
            prop_assert!(kernel(&m).basis_vectors().iter().all(|v| m.apply(v).iter().all(Zero::is_zero)));
        }

        #[test]
        fn rank_of_adjoint(m in small_matrix()) {
            prop_assert_eq!(rank(&m), rank(&m.conj_transpose()));
        }

        #[test]
        fn grassmann_identity(a in small_matrix(), b in small_matrix()) {
            let cols = a.cols();
            prop_assume!(b.cols() == cols);
            let sa = Subspace::span(cols, &a.row_vecs());
            let sb = Subspace::span(cols, &b.row_vecs());
            let sum = subspace_sum(&sa, &sb).unwrap();
            let meet = subspace_intersect(&sa, &sb).unwrap();
            prop_assert_eq!(sa.dim() + sb.dim(), sum.dim() + meet.dim());
        }

        #[test]
        fn deterministic(m in small_matrix()) {
            prop_assert_eq!(rref(&m), rref(&m.clone()));
        }

        #[test]
        fn solve_is_consistent(m in small_matrix(), seed in proptest::collection::vec(small_scalar(), 4)) {
            let x: Vec<Q> = seed.into_iter().take(m.cols()).chain(std::iter::repeat(Q::zero())).take(m.cols()).collect();
            let rhs = m.apply(&x);
            let sol = solve(&m, &rhs).expect("rhs is in the image by construction");
            prop_assert_eq!(m.apply(&sol), rhs);
        }
    }
}
