//! The four extreme reference matrices (identity, uniformity, stratification,
//! antagonism) and affine paths between frequency matrices.

use crate::error::{Error, Result};
use crate::matrix::FrequencyMatrix;
use crate::scalar::{rows_to_f64, Scalar};
use serde::{Deserialize, Serialize};

/// The four compass matrices marking the extremes of the map.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CompassKind {
    /// Ones on the diagonal: every voter submits the same order.
    Identity,
    /// All entries `1/m`: every candidate equally often at every position.
    Uniformity,
    /// Two agreeing halves: `2/m` on the top-left and bottom-right quadrants.
    Stratification,
    /// `1/2` on both diagonals: half the voters rank one way, half reversed.
    Antagonism,
}

impl CompassKind {
    pub const ALL: [CompassKind; 4] = [
        CompassKind::Identity,
        CompassKind::Uniformity,
        CompassKind::Stratification,
        CompassKind::Antagonism,
    ];

    /// Conventional short label (ID, UN, ST, AN).
    pub fn label(&self) -> &'static str {
        match self {
            CompassKind::Identity => "ID",
            CompassKind::Uniformity => "UN",
            CompassKind::Stratification => "ST",
            CompassKind::Antagonism => "AN",
        }
    }
}

pub(crate) fn compass_rows<S: Scalar>(kind: CompassKind, m: usize) -> Result<Vec<Vec<S>>> {
    if m == 0 {
        return Err(Error::OutOfRange {
            name: "m",
            value: 0.0,
            min: 1.0,
            max: f64::INFINITY,
        });
    }
    if matches!(kind, CompassKind::Stratification | CompassKind::Antagonism) && m % 2 != 0 {
        return Err(Error::OddDimension {
            what: kind.label(),
            m,
        });
    }
    let mut rows = vec![vec![S::zero(); m]; m];
    match kind {
        CompassKind::Identity => {
            for (i, row) in rows.iter_mut().enumerate() {
                row[i] = S::one();
            }
        }
        CompassKind::Uniformity => {
            let v = S::from_ratio(1, m as u64);
            for row in rows.iter_mut() {
                row.fill(v.clone());
            }
        }
        CompassKind::Stratification => {
            let v = S::from_ratio(2, m as u64);
            let h = m / 2;
            for (i, row) in rows.iter_mut().enumerate() {
                let (lo, hi) = if i < h { (0, h) } else { (h, m) };
                for cell in &mut row[lo..hi] {
                    *cell = v.clone();
                }
            }
        }
        CompassKind::Antagonism => {
            let v = S::half();
            for (i, row) in rows.iter_mut().enumerate() {
                row[i] = v.clone();
                row[m - 1 - i] = v.clone();
            }
        }
    }
    Ok(rows)
}

/// The compass matrix of the given kind and dimension. Stratification and
/// antagonism require even `m`.
pub fn compass_matrix(kind: CompassKind, m: usize) -> Result<FrequencyMatrix> {
    Ok(FrequencyMatrix::from_rows_unchecked(rows_to_f64(
        &compass_rows::<f64>(kind, m)?,
    )))
}

/// Entrywise affine combination `alpha * x + (1 - alpha) * y`. Convexity
/// keeps the result bistochastic.
pub fn affine_combination(
    x: &FrequencyMatrix,
    y: &FrequencyMatrix,
    alpha: f64,
) -> Result<FrequencyMatrix> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            left: x.dim(),
            right: y.dim(),
        });
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::OutOfRange {
            name: "alpha",
            value: alpha,
            min: 0.0,
            max: 1.0,
        });
    }
    Ok(x.blend(y, alpha))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_by_four_matrices() {
        let id = compass_matrix(CompassKind::Identity, 4).unwrap();
        let un = compass_matrix(CompassKind::Uniformity, 4).unwrap();
        let st = compass_matrix(CompassKind::Stratification, 4).unwrap();
        let an = compass_matrix(CompassKind::Antagonism, 4).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(id.entry(i, j), if i == j { 1.0 } else { 0.0 });
                assert_eq!(un.entry(i, j), 0.25);
                let in_block = (i < 2) == (j < 2);
                assert_eq!(st.entry(i, j), if in_block { 0.5 } else { 0.0 });
                let on_diag = i == j || i + j == 3;
                assert_eq!(an.entry(i, j), if on_diag { 0.5 } else { 0.0 });
            }
        }
        for mat in [id, un, st, an] {
            assert!(mat.is_bistochastic(0.0));
        }
    }

    #[test]
    fn odd_dimension_rejected_where_undefined() {
        assert!(compass_matrix(CompassKind::Identity, 5).is_ok());
        assert!(compass_matrix(CompassKind::Uniformity, 5).is_ok());
        assert!(compass_matrix(CompassKind::Stratification, 5).is_err());
        assert!(compass_matrix(CompassKind::Antagonism, 5).is_err());
    }

    #[test]
    fn affine_endpoints_and_midpoint() {
        let id = compass_matrix(CompassKind::Identity, 4).unwrap();
        let un = compass_matrix(CompassKind::Uniformity, 4).unwrap();
        assert_eq!(affine_combination(&id, &un, 1.0).unwrap(), id);
        let mid = affine_combination(&id, &un, 0.5).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i == j { 0.625 } else { 0.125 };
                assert_eq!(mid.entry(i, j), expect);
            }
        }
        assert!(affine_combination(&id, &un, 1.5).is_err());
        assert!(affine_combination(&id, &un, -0.1).is_err());
    }
}
