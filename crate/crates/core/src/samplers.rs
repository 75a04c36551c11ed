//! Random election generation for every supported model, with reproducible
//! per-(trial, voter) random streams so parallel runs are bit-identical.

use crate::election::{Election, Ranking};
use crate::error::{Error, Result};
use crate::metric::npos;
use crate::models::{model_matrix_with_cap, ModelSpec, DEFAULT_MALLOWS_CAP};
use crate::structures::{caterpillar_sp_image, GsTree};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::HashMap;

/// A sampling job: distribution, voter count, and master seed.
#[derive(Clone, Debug)]
pub struct SampleRequest {
    pub spec: ModelSpec,
    pub n: u64,
    pub seed: u64,
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// The per-vote generator: a ChaCha8 stream keyed by a SplitMix64 chain over
/// `(seed, trial, voter)`. Fixed for reproducibility; independent of thread
/// scheduling because every vote owns its stream.
pub(crate) fn vote_rng(seed: u64, trial: u64, voter: u64) -> ChaCha8Rng {
    let mut state = seed;
    let a = splitmix64(&mut state);
    state ^= trial;
    let b = splitmix64(&mut state);
    state ^= voter;
    let c = splitmix64(&mut state);
    let d = splitmix64(&mut state);
    let mut key = [0u8; 32];
    key[0..8].copy_from_slice(&a.to_le_bytes());
    key[8..16].copy_from_slice(&b.to_le_bytes());
    key[16..24].copy_from_slice(&c.to_le_bytes());
    key[24..32].copy_from_slice(&d.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

/// A spec with its dispersion parameters resolved, ready to draw votes.
enum Prepared {
    Ic {
        m: usize,
    },
    Mallows {
        phi: f64,
        central: Ranking,
    },
    Mixture {
        phi: f64,
        psi: f64,
        p: f64,
        central: Ranking,
        reversed: Ranking,
    },
    Conitzer {
        m: usize,
    },
    Walsh {
        tree: GsTree,
    },
    Tree {
        tree: GsTree,
    },
    Filtered {
        base: Box<Prepared>,
        phi: f64,
    },
}

impl Prepared {
    fn build(spec: &ModelSpec) -> Result<Self> {
        spec.validate()?;
        let m = spec.num_candidates();
        Ok(match spec {
            ModelSpec::ImpartialCulture { .. } => Prepared::Ic { m },
            ModelSpec::Mallows {
                dispersion,
                central,
                ..
            } => Prepared::Mallows {
                phi: dispersion.resolve(m)?,
                central: central.clone().unwrap_or_else(|| Ranking::identity(m)),
            },
            ModelSpec::MallowsReversalMixture {
                phi,
                psi,
                p,
                central,
                ..
            } => {
                let central = central.clone().unwrap_or_else(|| Ranking::identity(m));
                Prepared::Mixture {
                    phi: phi.resolve(m)?,
                    psi: psi.resolve(m)?,
                    p: *p,
                    reversed: central.reversed(),
                    central,
                }
            }
            ModelSpec::Conitzer { .. } => Prepared::Conitzer { m },
            ModelSpec::Walsh { .. } => {
                if m == 1 {
                    Prepared::Ic { m }
                } else {
                    Prepared::Walsh {
                        tree: GsTree::caterpillar(m)?,
                    }
                }
            }
            ModelSpec::GsTreeUniform { tree } => Prepared::Tree { tree: tree.clone() },
            ModelSpec::MallowsFiltered { base, dispersion } => Prepared::Filtered {
                base: Box::new(Prepared::build(base)?),
                phi: dispersion.resolve(m)?,
            },
        })
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Ranking {
        match self {
            Prepared::Ic { m } => random_permutation(*m, rng),
            Prepared::Mallows { phi, central } => mallows_insertion(*phi, central, rng),
            Prepared::Mixture {
                phi,
                psi,
                p,
                central,
                reversed,
            } => {
                if rng.gen::<f64>() < *p {
                    mallows_insertion(*phi, central, rng)
                } else {
                    mallows_insertion(*psi, reversed, rng)
                }
            }
            Prepared::Conitzer { m } => conitzer_vote(*m, rng),
            Prepared::Walsh { tree } => caterpillar_sp_image(&tree_vote(tree, rng)),
            Prepared::Tree { tree } => tree_vote(tree, rng),
            Prepared::Filtered { base, phi } => {
                let central = base.sample(rng);
                mallows_insertion(*phi, &central, rng)
            }
        }
    }
}

fn random_permutation(m: usize, rng: &mut ChaCha8Rng) -> Ranking {
    let mut order: Vec<usize> = (0..m).collect();
    for i in (1..m).rev() {
        let j = rng.gen_range(0..=i);
        order.swap(i, j);
    }
    Ranking::new(order).expect("shuffle keeps a permutation")
}

/// Repeated-insertion sampling: the candidate ranked `t`-th in the central
/// vote is inserted at position `p` (1-based, from the top) with weight
/// `phi^(t-p)`. Realizes the swap-distance law exactly.
fn mallows_insertion(phi: f64, central: &Ranking, rng: &mut ChaCha8Rng) -> Ranking {
    let m = central.len();
    let mut vote: Vec<usize> = Vec::with_capacity(m);
    let mut z = 0.0; // running 1 + phi + ... + phi^(t-1)
    for t in 1..=m {
        z = 1.0 + phi * z;
        let u = rng.gen::<f64>() * z;
        // walk weights phi^0, phi^1, ... from the bottom position upwards
        let mut acc = 0.0;
        let mut w = 1.0;
        let mut p = t;
        for q in (1..=t).rev() {
            acc += w;
            if u < acc || q == 1 {
                p = q;
                break;
            }
            w *= phi;
        }
        vote.insert(p - 1, central.candidate_at(t - 1));
    }
    Ranking::new(vote).expect("insertion keeps a permutation")
}

/// Random-peak process: uniform peak, then extend left or right of the grown
/// interval (fair coin where both sides exist).
fn conitzer_vote(m: usize, rng: &mut ChaCha8Rng) -> Ranking {
    let peak = rng.gen_range(0..m);
    let mut order = Vec::with_capacity(m);
    order.push(peak);
    let (mut lo, mut hi) = (peak, peak);
    while order.len() < m {
        let take_left = if lo > 0 && hi + 1 < m {
            rng.gen::<bool>()
        } else {
            lo > 0
        };
        if take_left {
            lo -= 1;
            order.push(lo);
        } else {
            hi += 1;
            order.push(hi);
        }
    }
    Ranking::new(order).expect("interval extension covers all candidates")
}

/// Uniform vote from a group-separable tree: a fair coin per internal node.
fn tree_vote(tree: &GsTree, rng: &mut ChaCha8Rng) -> Ranking {
    let flags: Vec<bool> = (0..tree.internal_nodes().len())
        .map(|_| rng.gen::<bool>())
        .collect();
    tree.frontier_with_reversals(&flags)
}

fn collect_election(m: usize, votes: impl Iterator<Item = Ranking>) -> Election {
    let mut index: HashMap<Ranking, usize> = HashMap::new();
    let mut rows: Vec<(Ranking, u64)> = Vec::new();
    for v in votes {
        match index.get(&v) {
            Some(&i) => rows[i].1 += 1,
            None => {
                index.insert(v.clone(), rows.len());
                rows.push((v, 1));
            }
        }
    }
    Election::new(m, rows).expect("sampled election is nonempty")
}

fn sample_election_stream(spec: &ModelSpec, n: u64, seed: u64, trial: u64) -> Result<Election> {
    if n == 0 {
        return Err(Error::EmptyElection);
    }
    let prepared = Prepared::build(spec)?;
    let m = spec.num_candidates();
    Ok(collect_election(
        m,
        (0..n).map(|voter| prepared.sample(&mut vote_rng(seed, trial, voter))),
    ))
}

/// Draws `n` i.i.d. votes from the spec. Deterministic in the seed.
pub fn sample_election(req: &SampleRequest) -> Result<Election> {
    sample_election_stream(&req.spec, req.n, req.seed, 0)
}

/// Summary of sampled-election distances to the model matrix.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct DistanceSummary {
    pub mean: f64,
    pub q10: f64,
    pub q90: f64,
}

/// Samples `trials` elections of `n` votes each and reports the mean and the
/// 10th/90th percentiles (nearest-rank) of their normalized positionwise
/// distances to the distribution's own frequency matrix. Trials run in
/// parallel; results are independent of thread count.
pub fn empirical_matrix_distance(
    spec: &ModelSpec,
    n: u64,
    trials: u64,
    seed: u64,
) -> Result<DistanceSummary> {
    if trials == 0 {
        return Err(Error::OutOfRange {
            name: "trials",
            value: 0.0,
            min: 1.0,
            max: f64::INFINITY,
        });
    }
    let cap = spec.num_candidates().max(DEFAULT_MALLOWS_CAP);
    let model = model_matrix_with_cap(spec, cap)?;
    let distances: Result<Vec<f64>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let election = sample_election_stream(spec, n, seed, trial)?;
            npos(&election.frequency_matrix(), &model)
        })
        .collect();
    let distances = distances?;
    let mean = distances.iter().sum::<f64>() / distances.len() as f64;
    let mut sorted = distances;
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let rank = |q: f64| {
        let idx = ((q * sorted.len() as f64).ceil() as usize).max(1) - 1;
        sorted[idx.min(sorted.len() - 1)]
    };
    Ok(DistanceSummary {
        mean,
        q10: rank(0.1),
        q90: rank(0.9),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::Dispersion;
    use crate::structures::{is_consistent_with_tree, is_single_peaked_wrt};

    fn mallows_spec(m: usize, phi: f64) -> ModelSpec {
        ModelSpec::Mallows {
            m,
            dispersion: Dispersion::Phi(phi),
            central: None,
        }
    }

    #[test]
    fn zero_dispersion_is_unanimous() {
        let req = SampleRequest {
            spec: mallows_spec(6, 0.0),
            n: 40,
            seed: 7,
        };
        let e = sample_election(&req).unwrap();
        assert_eq!(e.votes().len(), 1);
        assert_eq!(e.votes()[0].0, Ranking::identity(6));
        assert_eq!(e.num_voters(), 40);
    }

    #[test]
    fn same_seed_same_election() {
        let req = SampleRequest {
            spec: mallows_spec(5, 0.6),
            n: 50,
            seed: 123,
        };
        let a = sample_election(&req).unwrap();
        let b = sample_election(&req).unwrap();
        assert_eq!(a, b);
        let other = sample_election(&SampleRequest {
            seed: 124,
            ..req.clone()
        })
        .unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn conitzer_samples_are_single_peaked() {
        let req = SampleRequest {
            spec: ModelSpec::Conitzer { m: 5 },
            n: 10_000,
            seed: 99,
        };
        let e = sample_election(&req).unwrap();
        let axis = Ranking::identity(5);
        for (v, _) in e.votes() {
            assert!(is_single_peaked_wrt(v, &axis).unwrap());
        }
    }

    #[test]
    fn walsh_samples_are_single_peaked() {
        let req = SampleRequest {
            spec: ModelSpec::Walsh { m: 6 },
            n: 5_000,
            seed: 4,
        };
        let e = sample_election(&req).unwrap();
        let axis = Ranking::identity(6);
        for (v, _) in e.votes() {
            assert!(is_single_peaked_wrt(v, &axis).unwrap());
        }
    }

    #[test]
    fn tree_samples_are_consistent() {
        let tree = GsTree::caterpillar(4).unwrap();
        let req = SampleRequest {
            spec: ModelSpec::GsTreeUniform { tree: tree.clone() },
            n: 10_000,
            seed: 11,
        };
        let e = sample_election(&req).unwrap();
        for (v, _) in e.votes() {
            assert!(is_consistent_with_tree(v, &tree).unwrap());
        }
        // the caterpillar support has 2^(m-1) votes; with 10^4 draws all show up
        assert_eq!(e.votes().len(), 8);
    }

    #[test]
    fn zero_voters_rejected() {
        let req = SampleRequest {
            spec: mallows_spec(3, 0.5),
            n: 0,
            seed: 1,
        };
        assert!(sample_election(&req).is_err());
    }
}
