//! Fitting distribution parameters to an election by minimizing the
//! normalized positionwise distance over a parameter grid, plus the
//! Kemeny-consensus maximum-likelihood estimate used to cross-check the
//! Mallows fit.

use crate::election::{swap_distance, Election, Ranking};
use crate::error::{Error, Result};
use crate::matrix::FrequencyMatrix;
use crate::metric::npos;
use crate::models::{
    conitzer_matrix, mallows_matrix_with_cap, walsh_matrix, MallowsParams, NormPhiConverter,
    DEFAULT_MALLOWS_CAP,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Families supported by the grid fit. All are parameterized by the
/// normalized dispersion; the mixture adds a reversal probability.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitFamily {
    Mallows,
    PhiConitzer,
    PhiWalsh,
    MallowsMixture,
}

impl FitFamily {
    pub const ALL: [FitFamily; 4] = [
        FitFamily::Mallows,
        FitFamily::PhiConitzer,
        FitFamily::PhiWalsh,
        FitFamily::MallowsMixture,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            FitFamily::Mallows => "mallows",
            FitFamily::PhiConitzer => "phi-conitzer",
            FitFamily::PhiWalsh => "phi-walsh",
            FitFamily::MallowsMixture => "mallows-mixture",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "mallows" => Ok(FitFamily::Mallows),
            "phi-conitzer" => Ok(FitFamily::PhiConitzer),
            "phi-walsh" => Ok(FitFamily::PhiWalsh),
            "mallows-mixture" => Ok(FitFamily::MallowsMixture),
            other => Err(Error::InvalidSpec(format!("unknown fit family: {other}"))),
        }
    }
}

/// Best grid point for one family.
#[derive(Clone, Debug, Serialize)]
pub struct FitResult {
    pub family: FitFamily,
    /// Fitted normalized dispersion.
    pub norm_phi: f64,
    /// Fitted weight of the reversed-central component, on `{0, 0.05, ...,
    /// 0.5}` (mixture family only). The positionwise distance cannot tell a
    /// mixture from its column-reversed twin, so the minority weight is the
    /// identified quantity.
    pub p: Option<f64>,
    /// Normalized positionwise distance at the optimum.
    pub distance: f64,
    pub grid_step: f64,
}

/// Reversal probabilities tried for the mixture family.
fn mixture_p_grid() -> Vec<f64> {
    (0..=10).map(|k| k as f64 * 0.05).collect()
}

fn norm_phi_grid(step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(Error::OutOfRange {
            name: "grid_step",
            value: step,
            min: f64::MIN_POSITIVE,
            max: 1.0,
        });
    }
    let count = (1.0 / step).round() as usize;
    let mut grid: Vec<f64> = (0..count).map(|k| (k as f64 * step).min(1.0)).collect();
    grid.push(1.0);
    grid.dedup();
    Ok(grid)
}

/// Candidate matrices per grid point, shared across the family loop.
struct GridContext {
    converter: NormPhiConverter,
    cap: usize,
}

impl GridContext {
    fn new(m: usize) -> Self {
        Self {
            converter: NormPhiConverter::new(m),
            cap: m.max(DEFAULT_MALLOWS_CAP),
        }
    }

    fn mallows(&self, norm_phi: f64) -> Result<FrequencyMatrix> {
        let phi = self.converter.to_phi(norm_phi)?;
        mallows_matrix_with_cap(&MallowsParams::new(self.converter.m(), phi), self.cap)
    }
}

fn reversed_columns(f: &FrequencyMatrix) -> FrequencyMatrix {
    let m = f.dim();
    let perm: Vec<usize> = (0..m).rev().collect();
    f.permute_columns(&perm)
}

/// Fits one family to the election on the norm-phi grid `{0, step, ..., 1}`
/// (times the `p` grid `{0, 0.05, ..., 0.5}` for the mixture). Ties go to
/// the smaller dispersion, then the smaller `p`.
pub fn fit_model(e: &Election, family: FitFamily, grid_step: f64) -> Result<FitResult> {
    let m = e.num_candidates();
    let empirical = e.frequency_matrix();
    let ctx = GridContext::new(m);
    let grid = norm_phi_grid(grid_step)?;
    let base = match family {
        FitFamily::PhiConitzer => Some(conitzer_matrix(m)),
        FitFamily::PhiWalsh => Some(walsh_matrix(m)),
        _ => None,
    };
    // evaluate grid points in parallel, then take the lexicographic minimum
    // of (distance, norm_phi, p) for a schedule-independent result
    let evaluated: Result<Vec<(f64, f64, Option<f64>)>> = grid
        .par_iter()
        .map(|&norm_phi| {
            let mallows = ctx.mallows(norm_phi)?;
            match family {
                FitFamily::Mallows => {
                    let d = npos(&empirical, &mallows)?;
                    Ok(vec![(d, norm_phi, None)])
                }
                FitFamily::PhiConitzer | FitFamily::PhiWalsh => {
                    let filtered = mallows.multiply(base.as_ref().unwrap())?;
                    let d = npos(&empirical, &filtered)?;
                    Ok(vec![(d, norm_phi, None)])
                }
                FitFamily::MallowsMixture => {
                    let reversed = reversed_columns(&mallows);
                    mixture_p_grid()
                        .iter()
                        .map(|&p| {
                            // p is the weight of the reversed-central component
                            let mixed = reversed.blend(&mallows, p);
                            let d = npos(&empirical, &mixed)?;
                            Ok((d, norm_phi, Some(p)))
                        })
                        .collect()
                }
            }
        })
        .collect::<Result<Vec<Vec<_>>>>()
        .map(|chunks| chunks.into_iter().flatten().collect());
    let evaluated = evaluated?;
    let best = evaluated
        .into_iter()
        .min_by(|a, b| {
            (a.0, a.1, a.2.unwrap_or(0.0))
                .partial_cmp(&(b.0, b.1, b.2.unwrap_or(0.0)))
                .unwrap()
        })
        .expect("grid is nonempty");
    Ok(FitResult {
        family,
        norm_phi: best.1,
        p: best.2,
        distance: best.0,
        grid_step,
    })
}

/// Fits several families and returns the results sorted by distance.
pub fn fit_families(e: &Election, families: &[FitFamily], grid_step: f64) -> Result<Vec<FitResult>> {
    let mut results = families
        .iter()
        .map(|&f| fit_model(e, f, grid_step))
        .collect::<Result<Vec<_>>>()?;
    results.sort_by(|a, b| a.distance.partial_cmp(&b.distance).unwrap());
    Ok(results)
}

/// Largest candidate count accepted by the exact Kemeny solver.
pub const KEMENY_MAX_CANDIDATES: usize = 16;

/// Kemeny consensus estimate and the dispersion it implies under the
/// swap-distance likelihood.
#[derive(Clone, Debug, Serialize)]
pub struct KemenyEstimate {
    pub consensus: Ranking,
    /// Total swap distance from all voters to the consensus.
    pub total_distance: u64,
    /// Dispersion solving `expected distance = observed mean distance`.
    pub phi_hat: f64,
    /// The same estimate on the normalized scale.
    pub norm_phi_hat: f64,
}

/// Exact Kemeny consensus by dynamic programming over candidate subsets
/// (`O(2^m m^2)`); capped at [`KEMENY_MAX_CANDIDATES`] candidates. Among
/// optimal rankings, returns the lexicographically smallest.
pub fn kemeny_consensus(e: &Election) -> Result<Ranking> {
    let m = e.num_candidates();
    if m > KEMENY_MAX_CANDIDATES {
        return Err(Error::ResourceLimit {
            what: "kemeny consensus",
            cap: KEMENY_MAX_CANDIDATES,
            m,
            hint: "the subset dynamic program is exponential in m",
        });
    }
    // prefer[a][b]: voters ranking candidate a above candidate b
    let mut prefer = vec![vec![0u64; m]; m];
    for (v, mult) in e.votes() {
        let order = v.order();
        for x in 0..m {
            for y in (x + 1)..m {
                prefer[order[x]][order[y]] += mult;
            }
        }
    }
    // placing c next (above everyone outside S + {c}) costs the votes that
    // prefer an unplaced d over c
    let placement_cost = |placed: usize, c: usize| -> u64 {
        let mut cost = 0u64;
        for d in 0..m {
            if d != c && placed & (1 << d) == 0 {
                cost += prefer[d][c];
            }
        }
        cost
    };
    let full = (1usize << m) - 1;
    let mut remaining_cost = vec![0u64; full + 1];
    for s in (0..full).rev() {
        let mut best = u64::MAX;
        for c in 0..m {
            if s & (1 << c) != 0 {
                continue;
            }
            let candidate = placement_cost(s, c) + remaining_cost[s | (1 << c)];
            best = best.min(candidate);
        }
        remaining_cost[s] = best;
    }
    let mut order = Vec::with_capacity(m);
    let mut s = 0usize;
    while s != full {
        for c in 0..m {
            if s & (1 << c) != 0 {
                continue;
            }
            if placement_cost(s, c) + remaining_cost[s | (1 << c)] == remaining_cost[s] {
                order.push(c);
                s |= 1 << c;
                break;
            }
        }
    }
    Ranking::new(order)
}

/// Mallows maximum-likelihood estimate from the Kemeny consensus: the
/// dispersion equating the model's expected swap distance with the observed
/// mean distance to the consensus (the likelihood's stationarity condition),
/// clamped to `[0, 1]`.
pub fn kemeny_estimate(e: &Election) -> Result<KemenyEstimate> {
    let consensus = kemeny_consensus(e)?;
    let mut total = 0u64;
    for (v, mult) in e.votes() {
        total += swap_distance(v, &consensus)? * mult;
    }
    let mean = total as f64 / e.num_voters() as f64;
    let converter = NormPhiConverter::new(e.num_candidates());
    Ok(KemenyEstimate {
        consensus,
        total_distance: total,
        phi_hat: converter.phi_for_expected_distance(mean),
        norm_phi_hat: converter.norm_phi_for_mean_distance(mean),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(order: &[usize]) -> Ranking {
        Ranking::new(order.to_vec()).unwrap()
    }

    #[test]
    fn unanimous_election_fits_zero_dispersion() {
        let v = r(&[3, 1, 0, 2]);
        let e = Election::new(4, vec![(v.clone(), 20)]).unwrap();
        let fit = fit_model(&e, FitFamily::Mallows, 0.05).unwrap();
        assert_eq!(fit.norm_phi, 0.0);
        assert!(fit.distance < 1e-12);

        let est = kemeny_estimate(&e).unwrap();
        assert_eq!(est.consensus, v);
        assert_eq!(est.total_distance, 0);
        assert_eq!(est.phi_hat, 0.0);
        assert_eq!(est.norm_phi_hat, 0.0);
    }

    #[test]
    fn grid_argmin_is_reachable_by_reevaluation() {
        let e = Election::new(
            3,
            vec![(r(&[0, 1, 2]), 3), (r(&[1, 0, 2]), 2), (r(&[2, 1, 0]), 1)],
        )
        .unwrap();
        let fit = fit_model(&e, FitFamily::Mallows, 0.1).unwrap();
        let ctx = GridContext::new(3);
        let matrix = ctx.mallows(fit.norm_phi).unwrap();
        let d = npos(&e.frequency_matrix(), &matrix).unwrap();
        assert!((d - fit.distance).abs() < 1e-15);
        // no other grid point does strictly better
        for k in 0..=10 {
            let nv = k as f64 * 0.1;
            let alt = npos(&e.frequency_matrix(), &ctx.mallows(nv).unwrap()).unwrap();
            assert!(alt >= fit.distance - 1e-15);
        }
    }

    #[test]
    fn kemeny_majority_example() {
        // two votes a>b>c against one c>b>a: consensus is a>b>c
        let e = Election::new(3, vec![(r(&[0, 1, 2]), 2), (r(&[2, 1, 0]), 1)]).unwrap();
        let consensus = kemeny_consensus(&e).unwrap();
        assert_eq!(consensus, r(&[0, 1, 2]));
        let est = kemeny_estimate(&e).unwrap();
        assert_eq!(est.total_distance, 3);
    }

    #[test]
    fn kemeny_perfect_tie_breaks_lexicographically() {
        let v = r(&[1, 0, 2]);
        let e = Election::new(3, vec![(v.clone(), 1), (v.reversed(), 1)]).unwrap();
        // every ranking has the same total distance; smallest order wins
        assert_eq!(kemeny_consensus(&e).unwrap(), r(&[0, 1, 2]));
    }

    #[test]
    fn kemeny_respects_candidate_cap() {
        let e = Election::new(17, vec![(Ranking::identity(17), 1)]).unwrap();
        assert!(matches!(
            kemeny_consensus(&e),
            Err(Error::ResourceLimit { .. })
        ));
    }

    #[test]
    fn mle_boundary_cases() {
        // mean distance at the impartial-culture expectation pins phi at 1
        let v = r(&[0, 1, 2, 3]);
        let e = Election::new(4, vec![(v.clone(), 1), (v.reversed(), 1)]).unwrap();
        // mean distance = 3 = m(m-1)/4
        let est = kemeny_estimate(&e).unwrap();
        assert_eq!(est.phi_hat, 1.0);
        assert_eq!(est.norm_phi_hat, 1.0);
    }
}
