//! Bistochastic frequency matrices.

use crate::election::Ranking;
use crate::error::{Error, Result};

/// An `m`-by-`m` bistochastic matrix. Rows are positions (0 = top), columns
/// are candidates; entry `(i, j)` is the frequency of candidate `j` at
/// position `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct FrequencyMatrix {
    m: usize,
    /// Row-major entries, `data[i * m + j]`.
    data: Vec<f64>,
}

impl FrequencyMatrix {
    /// Builds a matrix from rows, validating bistochasticity within `tol`.
    pub fn from_rows_with_tolerance(rows: Vec<Vec<f64>>, tol: f64) -> Result<Self> {
        let m = rows.len();
        if m == 0 || rows.iter().any(|r| r.len() != m) {
            return Err(Error::NotStochastic(format!(
                "expected a square matrix, got {} rows of lengths {:?}",
                m,
                rows.iter().map(|r| r.len()).collect::<Vec<_>>()
            )));
        }
        let mat = Self {
            m,
            data: rows.into_iter().flatten().collect(),
        };
        if let Some(bad) = mat.data.iter().find(|&&x| !(-tol..=1.0 + tol).contains(&x)) {
            return Err(Error::NotStochastic(format!("entry {bad} outside [0,1]")));
        }
        if !mat.is_bistochastic(tol) {
            return Err(Error::NotStochastic(format!(
                "row or column sums deviate from 1 by more than {tol}"
            )));
        }
        Ok(mat)
    }

    /// Builds a matrix from rows at the default tolerance `1e-9`.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::from_rows_with_tolerance(rows, 1e-9)
    }

    /// Internal constructor for matrices produced by trusted computations.
    pub(crate) fn from_rows_unchecked(rows: Vec<Vec<f64>>) -> Self {
        let m = rows.len();
        debug_assert!(rows.iter().all(|r| r.len() == m));
        Self {
            m,
            data: rows.into_iter().flatten().collect(),
        }
    }

    /// Permutation matrix of a single vote.
    pub fn from_ranking(v: &Ranking) -> Self {
        let m = v.len();
        let mut data = vec![0.0; m * m];
        for (i, &c) in v.order().iter().enumerate() {
            data[i * m + c] = 1.0;
        }
        Self { m, data }
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    /// Entry at position `i`, candidate `j`.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.m + j]
    }

    /// Row `i` as a slice (distribution of candidates over one position).
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.m..(i + 1) * self.m]
    }

    /// Column `j` (distribution of one candidate over positions).
    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.m).map(|i| self.entry(i, j)).collect()
    }

    /// All columns, materialized once.
    pub fn columns(&self) -> Vec<Vec<f64>> {
        (0..self.m).map(|j| self.column(j)).collect()
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        (0..self.m).map(move |i| self.row(i))
    }

    /// Checks that all rows and columns sum to 1 within `tol`.
    pub fn is_bistochastic(&self, tol: f64) -> bool {
        for i in 0..self.m {
            if (self.row(i).iter().sum::<f64>() - 1.0).abs() > tol {
                return false;
            }
        }
        for j in 0..self.m {
            let s: f64 = (0..self.m).map(|i| self.entry(i, j)).sum();
            if (s - 1.0).abs() > tol {
                return false;
            }
        }
        true
    }

    /// Maximum absolute entrywise difference to another matrix.
    pub fn max_abs_diff(&self, other: &FrequencyMatrix) -> f64 {
        assert_eq!(self.m, other.m);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Reorders columns: column `j` of the result is column `perm[j]` of `self`.
    pub fn permute_columns(&self, perm: &[usize]) -> FrequencyMatrix {
        assert_eq!(perm.len(), self.m);
        let mut data = vec![0.0; self.m * self.m];
        for i in 0..self.m {
            for j in 0..self.m {
                data[i * self.m + j] = self.entry(i, perm[j]);
            }
        }
        Self { m: self.m, data }
    }

    /// Matrix product `self * other` (both bistochastic, so the product is).
    pub fn multiply(&self, other: &FrequencyMatrix) -> Result<FrequencyMatrix> {
        if self.m != other.m {
            return Err(Error::DimensionMismatch {
                left: self.m,
                right: other.m,
            });
        }
        let m = self.m;
        let mut data = vec![0.0; m * m];
        for i in 0..m {
            for t in 0..m {
                let a = self.entry(i, t);
                if a == 0.0 {
                    continue;
                }
                let row_t = other.row(t);
                for j in 0..m {
                    data[i * m + j] += a * row_t[j];
                }
            }
        }
        Ok(Self { m, data })
    }

    /// Entrywise convex combination `w * self + (1 - w) * other`.
    pub(crate) fn blend(&self, other: &FrequencyMatrix, w: f64) -> FrequencyMatrix {
        assert_eq!(self.m, other.m);
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| w * a + (1.0 - w) * b)
            .collect();
        Self { m: self.m, data }
    }
}
