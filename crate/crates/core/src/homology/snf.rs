//! Smith normal form of integer matrices, exact and deterministic.
//!
//! Elimination pivots on the minimal absolute value in the working submatrix;
//! entries are arbitrary-precision so growth is harmless at desk scale.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

/// Dense exact integer matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::from(1);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<i64>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut m = IntMatrix::zeros(r, c);
        for (i, row) in rows.into_iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, v) in row.into_iter().enumerate() {
                m.data[i * c + j] = BigInt::from(v);
            }
        }
        m
    }

    /// Builds from sparse columns (duplicate entries are summed).
    pub fn from_sparse_columns(rows: usize, columns: &[Vec<(usize, i64)>]) -> Self {
        let mut m = IntMatrix::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            for &(i, c) in col {
                m.data[i * columns.len() + j] += BigInt::from(c);
            }
        }
        m
    }

    pub fn at(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.at(k, j);
                    if !b.is_zero() {
                        let v = out.at(i, j) + a * b;
                        *out.at_mut(i, j) = v;
                    }
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut acc = BigInt::zero();
                for j in 0..self.cols {
                    if !self.at(i, j).is_zero() && !v[j].is_zero() {
                        acc += self.at(i, j) * &v[j];
                    }
                }
                acc
            })
            .collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[a] += q * row[b]
    fn add_row(&mut self, a: usize, b: usize, q: &BigInt) {
        for j in 0..self.cols {
            let v = self.at(a, j) + q * self.at(b, j);
            *self.at_mut(a, j) = v;
        }
    }

    /// col[a] += q * col[b]
    fn add_col(&mut self, a: usize, b: usize, q: &BigInt) {
        for i in 0..self.rows {
            let v = self.at(i, a) + q * self.at(i, b);
            *self.at_mut(i, a) = v;
        }
    }

    fn negate_row(&mut self, a: usize) {
        for j in 0..self.cols {
            let v = -self.at(a, j);
            *self.at_mut(a, j) = v;
        }
    }
}

/// `p * a * q = diag(d_1, .., d_r, 0, ..)` with `d_i >= 1` and `d_i | d_{i+1}`.
#[derive(Debug)]
pub struct Snf {
    /// Nontrivial diagonal, length = rank.
    pub diag: Vec<BigInt>,
    pub rank: usize,
    /// Left transform, present when requested.
    pub p: Option<IntMatrix>,
}

/// Computes the Smith normal form; accumulates the left transform `p`
/// (needed when solving `n z = a x` for cycle orders) only when asked.
pub fn smith_normal_form(a: &IntMatrix, want_p: bool) -> Snf {
    let mut m = a.clone();
    let mut p = want_p.then(|| IntMatrix::identity(a.rows));
    let steps = a.rows.min(a.cols);
    let mut t = 0;
    while t < steps {
        let Some((pi, pj)) = min_abs_entry(&m, t) else {
            break;
        };
        m.swap_rows(t, pi);
        if let Some(p) = p.as_mut() {
            p.swap_rows(t, pi);
        }
        m.swap_cols(t, pj);
        loop {
            // clear column t by division; nonzero remainders become the new,
            // strictly smaller pivot on the next pass
            let mut dirty = false;
            for i in t + 1..m.rows {
                if m.at(i, t).is_zero() {
                    continue;
                }
                let q = -(m.at(i, t) / m.at(t, t));
                m.add_row(i, t, &q);
                if let Some(p) = p.as_mut() {
                    p.add_row(i, t, &q);
                }
                if !m.at(i, t).is_zero() {
                    dirty = true;
                }
            }
            for j in t + 1..m.cols {
                if m.at(t, j).is_zero() {
                    continue;
                }
                let q = -(m.at(t, j) / m.at(t, t));
                m.add_col(j, t, &q);
                if !m.at(t, j).is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                let (pi, pj) = min_abs_entry(&m, t).expect("nonzero remainder present");
                m.swap_rows(t, pi);
                if let Some(p) = p.as_mut() {
                    p.swap_rows(t, pi);
                }
                m.swap_cols(t, pj);
                continue;
            }
            // divisibility sweep over the remaining block
            let pivot = m.at(t, t).clone();
            let mut fixed = None;
            'scan: for i in t + 1..m.rows {
                for j in t + 1..m.cols {
                    if !(m.at(i, j) % &pivot).is_zero() {
                        fixed = Some(i);
                        break 'scan;
                    }
                }
            }
            match fixed {
                Some(i) => {
                    let one = BigInt::from(1);
                    m.add_row(t, i, &one);
                    if let Some(p) = p.as_mut() {
                        p.add_row(t, i, &one);
                    }
                }
                None => break,
            }
        }
        if m.at(t, t).is_negative() {
            m.negate_row(t);
            if let Some(p) = p.as_mut() {
                p.negate_row(t);
            }
        }
        t += 1;
    }
    let mut diag = Vec::new();
    for i in 0..steps {
        if m.at(i, i).is_zero() {
            break;
        }
        diag.push(m.at(i, i).clone());
    }
    let rank = diag.len();
    Snf { diag, rank, p }
}

fn min_abs_entry(m: &IntMatrix, from: usize) -> Option<(usize, usize)> {
    let mut best: Option<(BigInt, usize, usize)> = None;
    for i in from..m.rows {
        for j in from..m.cols {
            let v = m.at(i, j);
            if v.is_zero() {
                continue;
            }
            let a = v.abs();
            match &best {
                Some((b, _, _)) if *b <= a => {}
                _ => best = Some((a, i, j)),
            }
        }
    }
    best.map(|(_, i, j)| (i, j))
}

/// Rank of an integer matrix over the rationals, via SNF.
pub fn integer_rank(a: &IntMatrix) -> usize {
    smith_normal_form(a, false).rank
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag_u64(snf: &Snf) -> Vec<u64> {
        snf.diag.iter().map(|d| u64::try_from(d).unwrap()).collect()
    }

    #[test]
    fn snf_of_known_matrix() {
        let a = IntMatrix::from_rows(vec![
            vec![-6, 111, -36, 6],
            vec![5, -672, 210, 74],
            vec![0, -255, 81, 24],
            vec![-7, 255, -81, -10],
        ]);
        let snf = smith_normal_form(&a, false);
        assert_eq!(diag_u64(&snf), vec![1, 3, 21]);
        assert_eq!(snf.rank, 3);
    }

    #[test]
    fn snf_diag_divides() {
        let a = IntMatrix::from_rows(vec![vec![2, 4, 4], vec![-6, 6, 12], vec![10, 4, 16]]);
        let snf = smith_normal_form(&a, false);
        for w in snf.diag.windows(2) {
            assert!((&w[1] % &w[0]).is_zero(), "{:?}", snf.diag);
        }
    }

    #[test]
    fn left_transform_is_consistent() {
        let a = IntMatrix::from_rows(vec![vec![4, 2], vec![2, 8]]);
        let snf = smith_normal_form(&a, true);
        let p = snf.p.unwrap();
        // p * a should have the column span of diag(d) * (unimodular): check
        // p*a*q = s indirectly by verifying that p*a has the same elementary
        // divisors
        let pa = p.mul(&a);
        let snf2 = smith_normal_form(&pa, false);
        let orig = smith_normal_form(&a, false);
        assert_eq!(snf2.diag, orig.diag);
    }

    #[test]
    fn zero_and_empty_matrices() {
        let z = IntMatrix::zeros(3, 2);
        assert_eq!(smith_normal_form(&z, false).rank, 0);
        let e = IntMatrix::zeros(0, 5);
        assert_eq!(smith_normal_form(&e, false).rank, 0);
    }
}
