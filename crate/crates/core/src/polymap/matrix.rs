use std::fmt;
use std::ops::{Index, IndexMut};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::ffcore::{inv_mod, reduce_i64};

/// Dense matrix over `F_p`, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FpMatrix {
    p: u32,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl FpMatrix {
    pub fn zeros(p: u32, rows: usize, cols: usize) -> Self {
        Self {
            p,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    /// Builds a matrix from integer rows, reducing entries mod p.
    pub fn from_rows(p: u32, rows: &[Vec<i64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    got: r.len(),
                });
            }
            data.extend(r.iter().map(|&v| reduce_i64(v, p)));
        }
        Ok(Self {
            p,
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub(crate) fn from_raw(p: u32, rows: usize, cols: usize, data: Vec<u32>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        Self {
            p,
            rows,
            cols,
            data,
        }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn data(&self) -> &[u32] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    /// Columns `cols` as a new `rows x |cols|` matrix.
    pub fn select_columns(&self, cols: &[usize]) -> Self {
        let mut data = Vec::with_capacity(self.rows * cols.len());
        for i in 0..self.rows {
            data.extend(cols.iter().map(|&j| self[(i, j)]));
        }
        Self::from_raw(self.p, self.rows, cols.len(), data)
    }

    /// `M^T v`.
    pub fn transpose_apply(&self, v: &[u32]) -> Vec<u32> {
        let p = self.p as u64;
        (0..self.cols)
            .map(|j| {
                let s: u64 = (0..self.rows)
                    .map(|i| self[(i, j)] as u64 * v[i] as u64 % p)
                    .sum();
                (s % p) as u32
            })
            .collect()
    }

    /// Rank over `F_p` by Gaussian elimination.
    pub fn rank(&self) -> usize {
        rank_in_place(&mut self.data.clone(), self.rows, self.cols, self.p)
    }

    /// Uniformly random entries from a seeded generator.
    pub fn random(p: u32, rows: usize, cols: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // Column-major draw so each column is one uniform vector in F_p^rows.
        let mut m = Self::zeros(p, rows, cols);
        for j in 0..cols {
            for i in 0..rows {
                m[(i, j)] = rng.gen_range(0..p);
            }
        }
        m
    }
}

/// Row rank of a row-major `rows x cols` buffer; the buffer is clobbered.
pub fn rank_in_place(m: &mut [u32], rows: usize, cols: usize, p: u32) -> usize {
    let p64 = p as u64;
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(pivot) = (rank..rows).find(|&r| m[r * cols + col] != 0) else {
            continue;
        };
        if pivot != rank {
            for j in 0..cols {
                m.swap(pivot * cols + j, rank * cols + j);
            }
        }
        let inv = inv_mod(m[rank * cols + col], p) as u64;
        for j in col..cols {
            m[rank * cols + j] = (m[rank * cols + j] as u64 * inv % p64) as u32;
        }
        for r in 0..rows {
            if r == rank {
                continue;
            }
            let factor = m[r * cols + col] as u64;
            if factor == 0 {
                continue;
            }
            for j in col..cols {
                let sub = factor * m[rank * cols + j] as u64 % p64;
                m[r * cols + j] = ((m[r * cols + j] as u64 + p64 - sub) % p64) as u32;
            }
        }
        rank += 1;
    }
    rank
}

impl Index<(usize, usize)> for FpMatrix {
    type Output = u32;
    fn index(&self, (i, j): (usize, usize)) -> &u32 {
        assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for FpMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut u32 {
        assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Display for FpMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(u32::to_string).collect();
            writeln!(f, "[{}]", row.join(" "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_examples() {
        let id = FpMatrix::from_rows(5, &[vec![1, 0], vec![0, 1]]).unwrap();
        assert_eq!(id.rank(), 2);
        assert_eq!(FpMatrix::zeros(5, 3, 4).rank(), 0);
        let prop = FpMatrix::from_rows(5, &[vec![1, 2], vec![2, 4]]).unwrap();
        assert_eq!(prop.rank(), 1);
        // Dependent only mod 7: rows (1, 3) and (3, 2) since 3*3 = 9 = 2.
        let m = FpMatrix::from_rows(7, &[vec![1, 3], vec![3, 2]]).unwrap();
        assert_eq!(m.rank(), 1);
        let m = FpMatrix::from_rows(5, &[vec![1, 3], vec![3, 2]]).unwrap();
        assert_eq!(m.rank(), 2);
    }

    #[test]
    fn rank_bounded_by_shape() {
        for seed in 0..20 {
            let m = FpMatrix::random(3, 3, 5, seed);
            assert!(m.rank() <= 3);
            let t = FpMatrix::random(3, 5, 2, seed);
            assert!(t.rank() <= 2);
        }
    }

    #[test]
    fn random_is_reproducible() {
        assert_eq!(FpMatrix::random(5, 2, 6, 42), FpMatrix::random(5, 2, 6, 42));
        assert_ne!(FpMatrix::random(5, 2, 6, 42), FpMatrix::random(5, 2, 6, 43));
    }

    #[test]
    fn ragged_rows_rejected() {
        assert!(FpMatrix::from_rows(5, &[vec![1, 2], vec![1]]).is_err());
    }
}
