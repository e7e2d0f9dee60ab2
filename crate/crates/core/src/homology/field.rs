//! Exact linear algebra over `Q` and `F_p`.
//!
//! Everything here runs dense Gaussian elimination with exact arithmetic;
//! intended for the desk-scale cores left after chain reduction, not for raw
//! grid complexes.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// A coefficient field together with its element operations.
pub trait Field: Clone {
    type Elem: Clone + PartialEq + std::fmt::Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn embed(&self, n: i64) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    /// Multiplicative inverse; must not be called on zero.
    fn inv(&self, a: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
}

/// The rationals with arbitrary-precision representation.
#[derive(Debug, Clone, Default)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn embed(&self, n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn inv(&self, a: &BigRational) -> BigRational {
        debug_assert!(!a.is_zero());
        a.recip()
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
}

/// The prime field `F_p` for `p < 2^31`, elements reduced to `0..p`.
#[derive(Debug, Clone)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Self {
        assert!(p >= 2 && p < 1 << 31, "modulus out of supported range");
        PrimeField { p }
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1u64;
        base %= self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base % self.p;
            }
            base = base * base % self.p;
            exp >>= 1;
        }
        acc
    }
}

impl Field for PrimeField {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1 % self.p
    }
    fn embed(&self, n: i64) -> u64 {
        n.rem_euclid(self.p as i64) as u64
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        (a + b) % self.p
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        (a + self.p - b) % self.p
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        a * b % self.p
    }
    fn neg(&self, a: &u64) -> u64 {
        (self.p - a) % self.p
    }
    fn inv(&self, a: &u64) -> u64 {
        debug_assert!(*a % self.p != 0);
        self.pow(*a, self.p - 2)
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a % self.p == 0
    }
}

/// Dense column-addressable matrix over a field, stored row-major.
#[derive(Debug, Clone)]
pub struct FMatrix<F: Field> {
    pub rows: usize,
    pub cols: usize,
    data: Vec<F::Elem>,
}

impl<F: Field> FMatrix<F> {
    pub fn zeros(f: &F, rows: usize, cols: usize) -> Self {
        FMatrix {
            rows,
            cols,
            data: vec![f.zero(); rows * cols],
        }
    }

    pub fn from_sparse_columns(
        f: &F,
        rows: usize,
        columns: &[Vec<(usize, i64)>],
    ) -> Self {
        let mut m = FMatrix::zeros(f, rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            for &(i, c) in col {
                let v = f.add(m.at(i, j), &f.embed(c));
                *m.at_mut(i, j) = v;
            }
        }
        m
    }

    pub fn at(&self, i: usize, j: usize) -> &F::Elem {
        &self.data[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut F::Elem {
        &mut self.data[i * self.cols + j]
    }

    pub fn column(&self, j: usize) -> Vec<F::Elem> {
        (0..self.rows).map(|i| self.at(i, j).clone()).collect()
    }

    pub fn set_column(&mut self, j: usize, v: &[F::Elem]) {
        for i in 0..self.rows {
            *self.at_mut(i, j) = v[i].clone();
        }
    }

    /// Matrix-vector product.
    pub fn apply(&self, f: &F, v: &[F::Elem]) -> Vec<F::Elem> {
        let mut out = vec![f.zero(); self.rows];
        for i in 0..self.rows {
            let mut acc = f.zero();
            for j in 0..self.cols {
                if !f.is_zero(self.at(i, j)) && !f.is_zero(&v[j]) {
                    acc = f.add(&acc, &f.mul(self.at(i, j), &v[j]));
                }
            }
            out[i] = acc;
        }
        out
    }

    /// In-place reduction to reduced row echelon form; returns pivot columns.
    pub fn rref(&mut self, f: &F) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for j in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(pr) = (r..self.rows).find(|&i| !f.is_zero(self.at(i, j))) else {
                continue;
            };
            if pr != r {
                for jj in 0..self.cols {
                    self.data.swap(pr * self.cols + jj, r * self.cols + jj);
                }
            }
            let inv = f.inv(self.at(r, j));
            for jj in 0..self.cols {
                let v = f.mul(self.at(r, jj), &inv);
                *self.at_mut(r, jj) = v;
            }
            for i in 0..self.rows {
                if i != r && !f.is_zero(self.at(i, j)) {
                    let factor = self.at(i, j).clone();
                    for jj in 0..self.cols {
                        let v = f.sub(self.at(i, jj), &f.mul(&factor, self.at(r, jj)));
                        *self.at_mut(i, jj) = v;
                    }
                }
            }
            pivots.push(j);
            r += 1;
        }
        pivots
    }

    pub fn rank(mut self, f: &F) -> usize {
        self.rref(f).len()
    }

    /// Basis of the kernel (as column vectors of length `cols`).
    pub fn kernel_basis(mut self, f: &F) -> Vec<Vec<F::Elem>> {
        let pivots = self.rref(f);
        let pivot_set: std::collections::HashSet<usize> = pivots.iter().copied().collect();
        let free: Vec<usize> = (0..self.cols).filter(|j| !pivot_set.contains(j)).collect();
        let mut basis = Vec::with_capacity(free.len());
        for &fj in &free {
            let mut v = vec![f.zero(); self.cols];
            v[fj] = f.one();
            for (r, &pj) in pivots.iter().enumerate() {
                v[pj] = f.neg(self.at(r, fj));
            }
            basis.push(v);
        }
        basis
    }
}

/// Rank of a sparse integer matrix over the field.
pub fn sparse_rank<F: Field>(
    f: &F,
    rows: usize,
    columns: &[Vec<(usize, i64)>],
) -> usize {
    FMatrix::from_sparse_columns(f, rows, columns).rank(f)
}

/// The `l`-th homology of a chain complex over a field, with a fixed
/// deterministic representative basis and a projection onto homology
/// coordinates. Chain spaces are indexed by cell order.
pub struct HomologySpace<F: Field> {
    field: F,
    pub chain_dim: usize,
    /// Representative cycles, one chain vector per homology class.
    pub reps: Vec<Vec<F::Elem>>,
    /// Columns: independent boundary columns then the representatives.
    solver: Solver<F>,
    n_boundary: usize,
}

impl<F: Field> HomologySpace<F> {
    /// `d_here`: the boundary leaving this dimension (`rows` = cells below,
    /// `cols` = chain_dim). `d_above`: the boundary entering (`rows` =
    /// chain_dim).
    pub fn new(
        f: &F,
        chain_dim: usize,
        d_here: (usize, &[Vec<(usize, i64)>]),
        d_above: &[Vec<(usize, i64)>],
    ) -> Self {
        let cycles: Vec<Vec<F::Elem>> = if d_here.0 == 0 {
            (0..chain_dim)
                .map(|i| {
                    let mut v = vec![f.zero(); chain_dim];
                    v[i] = f.one();
                    v
                })
                .collect()
        } else {
            FMatrix::from_sparse_columns(f, d_here.0, d_here.1).kernel_basis(f)
        };
        // independent boundary columns
        let bmat = FMatrix::from_sparse_columns(f, chain_dim, d_above);
        let ind = independent_columns(f, &bmat);
        // greedily extend the boundary columns to a basis of the cycle space
        let mut m = FMatrix::zeros(f, chain_dim, ind.len() + cycles.len());
        for (k, &j) in ind.iter().enumerate() {
            m.set_column(k, &bmat.column(j));
        }
        for (k, z) in cycles.iter().enumerate() {
            m.set_column(ind.len() + k, z);
        }
        let chosen = independent_columns(f, &m);
        debug_assert!(chosen.iter().take(ind.len()).eq((0..ind.len()).collect::<Vec<_>>().iter()));
        let reps: Vec<Vec<F::Elem>> = chosen
            .iter()
            .filter(|&&j| j >= ind.len())
            .map(|&j| cycles[j - ind.len()].clone())
            .collect();
        let mut basis = FMatrix::zeros(f, chain_dim, ind.len() + reps.len());
        for (k, &j) in ind.iter().enumerate() {
            basis.set_column(k, &bmat.column(j));
        }
        for (k, z) in reps.iter().enumerate() {
            basis.set_column(ind.len() + k, z);
        }
        let solver = Solver::new(f, basis);
        HomologySpace {
            field: f.clone(),
            chain_dim,
            n_boundary: ind.len(),
            reps,
            solver,
        }
    }

    pub fn betti(&self) -> usize {
        self.reps.len()
    }

    /// Homology coordinates of a cycle; `None` if the vector is not a cycle
    /// in the span (never happens for genuine cycles).
    pub fn project(&self, v: &[F::Elem]) -> Option<Vec<F::Elem>> {
        let x = self.solver.solve(&self.field, v)?;
        Some(x[self.n_boundary..].to_vec())
    }
}

/// Indices of a maximal independent column subset, scanning left to right.
fn independent_columns<F: Field>(f: &F, m: &FMatrix<F>) -> Vec<usize> {
    let mut work = m.clone();
    let pivots = work.rref(f);
    pivots
}

/// Repeated exact solves `M x = v` for a fixed column-independent `M`,
/// using the row-operation matrix recorded from the RREF of `[M | I]`.
struct Solver<F: Field> {
    e: FMatrix<F>,
    pivots: Vec<usize>,
    ncols: usize,
}

impl<F: Field> Solver<F> {
    fn new(f: &F, m: FMatrix<F>) -> Self {
        let rows = m.rows;
        let cols = m.cols;
        let mut aug = FMatrix::zeros(f, rows, cols + rows);
        for i in 0..rows {
            for j in 0..cols {
                *aug.at_mut(i, j) = m.at(i, j).clone();
            }
            *aug.at_mut(i, cols + i) = f.one();
        }
        let pivots_all = aug.rref(f);
        let pivots: Vec<usize> = pivots_all.into_iter().filter(|&j| j < cols).collect();
        debug_assert_eq!(pivots.len(), cols, "solver expects independent columns");
        let mut e = FMatrix::zeros(f, rows, rows);
        for i in 0..rows {
            for j in 0..rows {
                *e.at_mut(i, j) = aug.at(i, cols + j).clone();
            }
        }
        Solver { e, pivots, ncols: cols }
    }

    fn solve(&self, f: &F, v: &[F::Elem]) -> Option<Vec<F::Elem>> {
        let w = self.e.apply(f, v);
        let mut x = vec![f.zero(); self.ncols];
        for (row, &col) in self.pivots.iter().enumerate() {
            x[col] = w[row].clone();
        }
        // rows beyond the pivot count must vanish for consistency
        for (i, wi) in w.iter().enumerate() {
            if i >= self.pivots.len() && !f.is_zero(wi) {
                return None;
            }
        }
        Some(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rref_rank_over_q() {
        let f = Rationals;
        // columns: (1,2), (2,4), (0,1) -> rank 2
        let cols = vec![vec![(0, 1), (1, 2)], vec![(0, 2), (1, 4)], vec![(1, 1)]];
        assert_eq!(sparse_rank(&f, 2, &cols), 2);
    }

    #[test]
    fn rank_differs_mod_2() {
        // the matrix [2] has rank 1 over Q, rank 0 over F_2
        let cols = vec![vec![(0, 2)]];
        assert_eq!(sparse_rank(&Rationals, 1, &cols), 1);
        assert_eq!(sparse_rank(&PrimeField::new(2), 1, &cols), 0);
    }

    #[test]
    fn kernel_of_sum_map() {
        let f = PrimeField::new(5);
        // 1x3 matrix [1 1 1]: kernel rank 2
        let cols = vec![vec![(0, 1)], vec![(0, 1)], vec![(0, 1)]];
        let m = FMatrix::from_sparse_columns(&f, 1, &cols);
        let k = m.kernel_basis(&f);
        assert_eq!(k.len(), 2);
    }

    #[test]
    fn homology_space_of_circle() {
        // triangle circle: 3 vertices, 3 edges, d_1 = usual, nothing above
        let f = Rationals;
        let d1 = vec![
            vec![(0, -1), (1, 1)],
            vec![(1, -1), (2, 1)],
            vec![(2, -1), (0, 1)],
        ];
        let h1 = HomologySpace::new(&f, 3, (3, &d1), &[]);
        assert_eq!(h1.betti(), 1);
        let h0 = HomologySpace::new(&f, 3, (0, &[]), &d1);
        assert_eq!(h0.betti(), 1);
        // the sum of the three edges is the generating cycle
        let one = f.one();
        let z = vec![one.clone(), one.clone(), one.clone()];
        let coords = h1.project(&z).unwrap();
        assert_eq!(coords.len(), 1);
        assert!(!f.is_zero(&coords[0]));
    }

    #[test]
    fn solver_detects_inconsistency() {
        let f = Rationals;
        let mut m = FMatrix::zeros(&f, 2, 1);
        *m.at_mut(0, 0) = f.one();
        let s = Solver::new(&f, m);
        assert!(s.solve(&f, &[f.one(), f.zero()]).is_some());
        assert!(s.solve(&f, &[f.zero(), f.one()]).is_none());
    }
}
