//! Exact expected frequency matrices for the supported vote distributions:
//! impartial culture, Mallows (raw or normalized dispersion), uniform
//! group-separable tree distributions, Walsh and Conitzer single-peaked
//! models, two-sided Mallows mixtures with reversed central vote, and
//! Mallows-filtered compositions of any of these.

pub mod exact;
mod gs;
mod mahonian;
mod mallows;
mod sp;

pub use gs::{caterpillar_matrix, gs_tree_matrix};
pub use mahonian::{mallows_position_counts, max_swaps, MahonianTable};
pub use mallows::{
    mallows_matrix, mallows_matrix_with_cap, norm_phi_to_phi, MallowsParams, NormPhiConverter,
    DEFAULT_MALLOWS_CAP,
};
pub use sp::{conitzer_matrix, walsh_matrix};

use crate::election::Ranking;
use crate::error::{Error, Result};
use crate::matrix::FrequencyMatrix;
use crate::structures::GsTree;
use serde::{Deserialize, Serialize};

/// Dispersion parameter of a Mallows-like family, either raw or in the
/// normalized parameterization (expected swap distance as a fraction of half
/// the maximum).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dispersion {
    Phi(f64),
    NormPhi(f64),
}

impl Dispersion {
    /// Resolves to a raw `phi` for `m` candidates.
    pub fn resolve(&self, m: usize) -> Result<f64> {
        match *self {
            Dispersion::Phi(phi) => {
                if !(0.0..=1.0).contains(&phi) {
                    return Err(Error::OutOfRange {
                        name: "phi",
                        value: phi,
                        min: 0.0,
                        max: 1.0,
                    });
                }
                Ok(phi)
            }
            Dispersion::NormPhi(norm) => norm_phi_to_phi(m, norm),
        }
    }
}

/// A fully parameterized vote distribution.
#[derive(Clone, Debug)]
pub enum ModelSpec {
    /// Uniform over all strict orders.
    ImpartialCulture { m: usize },
    Mallows {
        m: usize,
        dispersion: Dispersion,
        /// `None` means the identity central vote.
        central: Option<Ranking>,
    },
    /// With probability `p` a Mallows vote around `central` with `phi`,
    /// otherwise a Mallows vote around the reversed central with `psi`.
    MallowsReversalMixture {
        m: usize,
        phi: Dispersion,
        psi: Dispersion,
        p: f64,
        central: Option<Ranking>,
    },
    /// Random-peak single-peaked model on the standard axis.
    Conitzer { m: usize },
    /// Uniform single-peaked model on the standard axis.
    Walsh { m: usize },
    /// Uniform over the votes consistent with a group-separable tree.
    GsTreeUniform { tree: GsTree },
    /// Draw a central vote from `base`, then a Mallows vote around it.
    MallowsFiltered {
        base: Box<ModelSpec>,
        dispersion: Dispersion,
    },
}

impl ModelSpec {
    /// Candidate count of the distribution.
    pub fn num_candidates(&self) -> usize {
        match self {
            ModelSpec::ImpartialCulture { m }
            | ModelSpec::Mallows { m, .. }
            | ModelSpec::MallowsReversalMixture { m, .. }
            | ModelSpec::Conitzer { m }
            | ModelSpec::Walsh { m } => *m,
            ModelSpec::GsTreeUniform { tree } => tree.num_candidates(),
            ModelSpec::MallowsFiltered { base, .. } => base.num_candidates(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_candidates() == 0 {
            return Err(Error::InvalidSpec("m must be at least 1".into()));
        }
        match self {
            ModelSpec::MallowsReversalMixture { p, central, m, .. } => {
                if !(0.0..=1.0).contains(p) {
                    return Err(Error::OutOfRange {
                        name: "p",
                        value: *p,
                        min: 0.0,
                        max: 1.0,
                    });
                }
                if let Some(c) = central {
                    if c.len() != *m {
                        return Err(Error::DimensionMismatch {
                            left: c.len(),
                            right: *m,
                        });
                    }
                }
                Ok(())
            }
            ModelSpec::Mallows { central, m, .. } => {
                if let Some(c) = central {
                    if c.len() != *m {
                        return Err(Error::DimensionMismatch {
                            left: c.len(),
                            right: *m,
                        });
                    }
                }
                Ok(())
            }
            ModelSpec::MallowsFiltered { base, .. } => base.validate(),
            _ => Ok(()),
        }
    }
}

/// Frequency matrix of the two-sided Mallows mixture: entrywise
/// `p * f(phi, j, i) + (1 - p) * f(psi, m-j+1, i)`, columns permuted by the
/// central vote if one is given.
pub fn reversal_mixture_matrix(
    m: usize,
    phi: f64,
    psi: f64,
    p: f64,
    central: Option<&Ranking>,
) -> Result<FrequencyMatrix> {
    reversal_mixture_matrix_with_cap(m, phi, psi, p, central, DEFAULT_MALLOWS_CAP)
}

pub fn reversal_mixture_matrix_with_cap(
    m: usize,
    phi: f64,
    psi: f64,
    p: f64,
    central: Option<&Ranking>,
    cap: usize,
) -> Result<FrequencyMatrix> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::OutOfRange {
            name: "p",
            value: p,
            min: 0.0,
            max: 1.0,
        });
    }
    let forward = mallows_matrix_with_cap(&MallowsParams::new(m, phi), cap)?;
    let backward = mallows_matrix_with_cap(&MallowsParams::new(m, psi), cap)?;
    let mut rows = vec![vec![0.0; m]; m];
    for i in 0..m {
        for j in 0..m {
            rows[i][j] = p * forward.entry(i, j) + (1.0 - p) * backward.entry(i, m - 1 - j);
        }
    }
    let mixed = FrequencyMatrix::from_rows_unchecked(rows);
    Ok(match central {
        // column for candidate central[j] is column j of the identity-central matrix
        Some(c) => mixed.permute_columns(&c.inverse_positions()),
        None => mixed,
    })
}

/// Frequency matrix of the Mallows-filtered distribution: draw a central
/// vote from the base distribution, then sample around it. Equals the
/// matrix product `mallows_matrix(phi) * base`.
pub fn mallows_filter_matrix(base: &FrequencyMatrix, phi: f64) -> Result<FrequencyMatrix> {
    mallows_filter_matrix_with_cap(base, phi, DEFAULT_MALLOWS_CAP)
}

pub fn mallows_filter_matrix_with_cap(
    base: &FrequencyMatrix,
    phi: f64,
    cap: usize,
) -> Result<FrequencyMatrix> {
    let noise = mallows_matrix_with_cap(&MallowsParams::new(base.dim(), phi), cap)?;
    noise.multiply(base)
}

/// Frequency matrix of any [`ModelSpec`].
pub fn model_matrix(spec: &ModelSpec) -> Result<FrequencyMatrix> {
    model_matrix_with_cap(spec, DEFAULT_MALLOWS_CAP)
}

/// Frequency matrix with an explicit cap for the Mallows-based families.
pub fn model_matrix_with_cap(spec: &ModelSpec, cap: usize) -> Result<FrequencyMatrix> {
    spec.validate()?;
    let m = spec.num_candidates();
    match spec {
        ModelSpec::ImpartialCulture { .. } => {
            crate::compass::compass_matrix(crate::compass::CompassKind::Uniformity, m)
        }
        ModelSpec::Mallows {
            dispersion,
            central,
            ..
        } => mallows_matrix_with_cap(
            &MallowsParams {
                m,
                phi: dispersion.resolve(m)?,
                central: central.clone(),
            },
            cap,
        ),
        ModelSpec::MallowsReversalMixture {
            phi,
            psi,
            p,
            central,
            ..
        } => reversal_mixture_matrix_with_cap(
            m,
            phi.resolve(m)?,
            psi.resolve(m)?,
            *p,
            central.as_ref(),
            cap,
        ),
        ModelSpec::Conitzer { .. } => Ok(conitzer_matrix(m)),
        ModelSpec::Walsh { .. } => Ok(walsh_matrix(m)),
        ModelSpec::GsTreeUniform { tree } => Ok(gs_tree_matrix(tree)),
        ModelSpec::MallowsFiltered { base, dispersion } => {
            let base_matrix = model_matrix_with_cap(base, cap)?;
            mallows_filter_matrix_with_cap(&base_matrix, dispersion.resolve(m)?, cap)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compass::{compass_matrix, CompassKind};

    #[test]
    fn impartial_culture_is_uniformity() {
        let f = model_matrix(&ModelSpec::ImpartialCulture { m: 4 }).unwrap();
        let un = compass_matrix(CompassKind::Uniformity, 4).unwrap();
        assert_eq!(f.max_abs_diff(&un), 0.0);
    }

    #[test]
    fn balanced_tree_dispatch_is_uniformity() {
        let f = model_matrix(&ModelSpec::GsTreeUniform {
            tree: GsTree::balanced(16).unwrap(),
        })
        .unwrap();
        let un = compass_matrix(CompassKind::Uniformity, 16).unwrap();
        assert_eq!(f.max_abs_diff(&un), 0.0);
    }

    #[test]
    fn norm_phi_dispatch_matches_resolved_phi() {
        let via_norm = model_matrix(&ModelSpec::Mallows {
            m: 6,
            dispersion: Dispersion::NormPhi(0.4),
            central: None,
        })
        .unwrap();
        let phi = norm_phi_to_phi(6, 0.4).unwrap();
        let via_phi = mallows_matrix(&MallowsParams::new(6, phi)).unwrap();
        assert_eq!(via_norm.max_abs_diff(&via_phi), 0.0);
    }

    #[test]
    fn mixture_degenerate_cases() {
        let pure = reversal_mixture_matrix(5, 0.3, 0.7, 1.0, None).unwrap();
        let forward = mallows_matrix(&MallowsParams::new(5, 0.3)).unwrap();
        assert_eq!(pure.max_abs_diff(&forward), 0.0);

        // p = 0 is the psi-Mallows model around the reversed central vote
        let flipped = reversal_mixture_matrix(5, 0.3, 0.7, 0.0, None).unwrap();
        let reversed = mallows_matrix(&MallowsParams {
            m: 5,
            phi: 0.7,
            central: Some(Ranking::identity(5).reversed()),
        })
        .unwrap();
        assert!(flipped.max_abs_diff(&reversed) < 1e-15);
    }

    #[test]
    fn half_mixture_of_point_masses_is_antagonism() {
        let mix = reversal_mixture_matrix(4, 0.0, 0.0, 0.5, None).unwrap();
        let an = compass_matrix(CompassKind::Antagonism, 4).unwrap();
        assert_eq!(mix.max_abs_diff(&an), 0.0);
    }

    #[test]
    fn filter_identity_and_uniform_limits() {
        let base = conitzer_matrix(5);
        let unchanged = mallows_filter_matrix(&base, 0.0).unwrap();
        assert_eq!(unchanged.max_abs_diff(&base), 0.0);

        let washed = mallows_filter_matrix(&base, 1.0).unwrap();
        let un = compass_matrix(CompassKind::Uniformity, 5).unwrap();
        assert!(washed.max_abs_diff(&un) < 1e-15);
    }

    #[test]
    fn mixture_rejects_bad_probability() {
        assert!(reversal_mixture_matrix(3, 0.5, 0.5, 1.5, None).is_err());
    }
}
