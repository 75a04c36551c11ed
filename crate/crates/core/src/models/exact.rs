//! Exact big-rational versions of the model-matrix builders. These run the
//! same generic code as the `f64` fast paths but in exact arithmetic, for
//! oracle regeneration and for the tightest bistochasticity guarantees.

use crate::compass::{compass_rows, CompassKind};
use crate::election::{Election, Ranking};
use crate::error::Result;
use crate::matrix::FrequencyMatrix;
use crate::models::mahonian::{max_swaps, position_count_table, MahonianTable};
use crate::models::{gs, mallows, sp};
use crate::scalar::rows_to_f64;
use crate::structures::GsTree;
use num::bigint::{BigInt, BigUint};
use num::rational::BigRational;
use num::{One, Zero};

/// Square matrix of exact rationals, row-major like [`FrequencyMatrix`].
pub type RationalMatrix = Vec<Vec<BigRational>>;

/// Converts to the float representation with one rounding per entry.
pub fn to_frequency_matrix(rows: &RationalMatrix) -> FrequencyMatrix {
    FrequencyMatrix::from_rows_unchecked(rows_to_f64(rows))
}

/// True iff all rows and columns sum to exactly one.
pub fn is_exactly_bistochastic(rows: &RationalMatrix) -> bool {
    let m = rows.len();
    let one = BigRational::one();
    for row in rows {
        if row.len() != m || row.iter().sum::<BigRational>() != one {
            return false;
        }
    }
    (0..m).all(|j| rows.iter().map(|r| &r[j]).sum::<BigRational>() == one)
}

/// Parses a plain decimal string (like `0.37` or `1`) to an exact rational.
pub fn decimal_to_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    let (sign, digits) = match s.strip_prefix('-') {
        Some(rest) => (-1, rest),
        None => (1, s),
    };
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((a, b)) => (a, b),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().all(|c| c.is_ascii_digit())
        || !frac_part.chars().all(|c| c.is_ascii_digit())
    {
        return None;
    }
    let joined = format!("{int_part}{frac_part}");
    let numer: BigInt = joined.parse().ok()?;
    let denom = BigInt::from(10u32).pow(frac_part.len() as u32);
    Some(BigRational::new(numer * BigInt::from(sign), denom))
}

pub fn compass_rational(kind: CompassKind, m: usize) -> Result<RationalMatrix> {
    compass_rows::<BigRational>(kind, m)
}

/// Mallows matrix in exact arithmetic via the insertion-position recurrence.
pub fn mallows_rational(m: usize, phi: &BigRational, central: Option<&Ranking>) -> RationalMatrix {
    mallows::mallows_rows(m, phi, central)
}

/// Mallows matrix in exact arithmetic straight from the inversion-count
/// tables: entry `(i, j)` is `sum_k T(m,k,j,i) phi^k / Z`. An independent
/// route used to cross-check [`mallows_rational`].
pub fn mallows_rational_from_counts(m: usize, phi: &BigRational) -> RationalMatrix {
    let mahonian = MahonianTable::new(m.max(1) - 1);
    // Z = prod_t (1 + phi + ... + phi^(t-1))
    let mut z = BigRational::one();
    for t in 2..=m {
        let mut geo = BigRational::zero();
        let mut power = BigRational::one();
        for _ in 0..t {
            geo += &power;
            power *= phi;
        }
        z *= geo;
    }
    let mut powers = Vec::with_capacity(max_swaps(m) + 1);
    powers.push(BigRational::one());
    for k in 1..=max_swaps(m) {
        powers.push(&powers[k - 1] * phi);
    }
    let mut rows = vec![vec![BigRational::zero(); m]; m];
    for j in 1..=m {
        let table = position_count_table(m, j, &mahonian);
        for i in 1..=m {
            let mut sum = BigRational::zero();
            for (k, counts) in table.iter().enumerate() {
                let t = &counts[i - 1];
                if !t.is_zero() {
                    sum += BigRational::from_integer(biguint_to_bigint(t)) * &powers[k];
                }
            }
            rows[i - 1][j - 1] = sum / &z;
        }
    }
    rows
}

fn biguint_to_bigint(v: &BigUint) -> BigInt {
    BigInt::from(v.clone())
}

pub fn caterpillar_rational(m: usize) -> RationalMatrix {
    gs::caterpillar_rows(m)
}

pub fn walsh_rational(m: usize) -> RationalMatrix {
    sp::walsh_rows(m)
}

pub fn conitzer_rational(m: usize) -> RationalMatrix {
    sp::conitzer_rows(m)
}

pub fn gs_tree_rational(tree: &GsTree) -> RationalMatrix {
    gs::gs_tree_rows(tree)
}

/// Exact two-sided mixture `p * F(phi) + (1-p) * F(psi) * reverse`.
pub fn reversal_mixture_rational(
    m: usize,
    phi: &BigRational,
    psi: &BigRational,
    p: &BigRational,
    central: Option<&Ranking>,
) -> RationalMatrix {
    let forward = mallows_rational(m, phi, None);
    let backward = mallows_rational(m, psi, None);
    let q = BigRational::one() - p;
    let mut rows = vec![vec![BigRational::zero(); m]; m];
    for i in 0..m {
        for j in 0..m {
            let col = central.map_or(j, |c| c.position_of(j));
            rows[i][j] = p * &forward[i][col] + &q * &backward[i][m - 1 - col];
        }
    }
    rows
}

/// Exact matrix product, for Mallows-filtered compositions.
pub fn matrix_product_rational(a: &RationalMatrix, b: &RationalMatrix) -> RationalMatrix {
    let m = a.len();
    let mut out = vec![vec![BigRational::zero(); m]; m];
    for i in 0..m {
        for t in 0..m {
            if a[i][t].is_zero() {
                continue;
            }
            for j in 0..m {
                let prod = &a[i][t] * &b[t][j];
                out[i][j] += prod;
            }
        }
    }
    out
}

pub fn mallows_filter_rational(base: &RationalMatrix, phi: &BigRational) -> RationalMatrix {
    let noise = mallows_rational(base.len(), phi, None);
    matrix_product_rational(&noise, base)
}

/// Exact empirical frequency matrix of an election.
pub fn election_frequency_rational(e: &Election) -> RationalMatrix {
    let n = BigInt::from(e.num_voters());
    let counts = e.position_counts();
    counts
        .into_iter()
        .map(|row| {
            row.into_iter()
                .map(|c| BigRational::new(BigInt::from(c), n.clone()))
                .collect()
        })
        .collect()
}
