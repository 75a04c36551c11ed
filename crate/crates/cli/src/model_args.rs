//! Shared `--model` flag parsing and the float/rational matrix dispatch.

use clap::{Args, ValueEnum};
use num::rational::BigRational;
use votemap::error::Error;
use votemap::io::read_gs_tree;
use votemap::models::{exact, model_matrix_with_cap, Dispersion, ModelSpec};
use votemap::structures::GsTree;
use votemap::FrequencyMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Precision {
    Float,
    Rational,
}

#[derive(Debug)]
pub enum CliError {
    /// Bad flag combinations; exits with status 2.
    Usage(String),
    /// Computation or input-data failures; exits with status 1.
    Domain(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Domain(e)
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Model selection shared by `matrix`, `sample`, and `variance`.
#[derive(Args, Debug)]
pub struct ModelArgs {
    /// Model family: ic, mallows, mallows-mixture, conitzer, walsh,
    /// caterpillar, gs-tree, phi-conitzer, phi-walsh, or mallows-filtered
    /// (with --base).
    #[arg(long)]
    pub model: String,
    /// Candidate count (optional when --tree determines it).
    #[arg(long)]
    pub m: Option<usize>,
    /// Normalized dispersion in [0,1] (Mallows-family models).
    #[arg(long)]
    pub normphi: Option<String>,
    /// Raw dispersion in [0,1] (alternative to --normphi).
    #[arg(long)]
    pub phi: Option<String>,
    /// Mixture weight of the forward component (mallows-mixture).
    #[arg(long)]
    pub p: Option<String>,
    /// Dispersion of the reversed component (defaults to the forward one).
    #[arg(long)]
    pub psi: Option<String>,
    /// Group-separable tree: a file path or flat:m, balanced:m,
    /// caterpillar:m.
    #[arg(long)]
    pub tree: Option<String>,
    /// Base family for mallows-filtered: ic, conitzer, walsh, caterpillar.
    #[arg(long)]
    pub base: Option<String>,
}

impl ModelArgs {
    fn m(&self) -> Result<usize, CliError> {
        self.m
            .ok_or_else(|| usage("--m is required for this model"))
    }

    fn dispersion(&self) -> Result<Dispersion, CliError> {
        match (&self.normphi, &self.phi) {
            (Some(_), Some(_)) => Err(usage("give exactly one of --normphi and --phi")),
            (Some(nv), None) => Ok(Dispersion::NormPhi(parse_f64("--normphi", nv)?)),
            (None, Some(phi)) => Ok(Dispersion::Phi(parse_f64("--phi", phi)?)),
            (None, None) => Err(usage(
                "this model needs a dispersion: --normphi F or --phi F",
            )),
        }
    }

    fn tree(&self) -> Result<GsTree, CliError> {
        let arg = self
            .tree
            .as_deref()
            .map(str::to_string)
            .or_else(|| self.m.map(|m| format!("caterpillar:{m}")))
            .ok_or_else(|| usage("gs-tree needs --tree <file|shape:m> or --m"))?;
        let tree = read_gs_tree(&arg)?;
        if let Some(m) = self.m {
            if tree.num_candidates() != m {
                return Err(usage(format!(
                    "--m {m} does not match the tree's {} leaves",
                    tree.num_candidates()
                )));
            }
        }
        Ok(tree)
    }

    /// Resolves the flags into a model specification.
    pub fn build_spec(&self) -> Result<ModelSpec, CliError> {
        let spec = match self.model.as_str() {
            "ic" => ModelSpec::ImpartialCulture { m: self.m()? },
            "mallows" => ModelSpec::Mallows {
                m: self.m()?,
                dispersion: self.dispersion()?,
                central: None,
            },
            "mallows-mixture" => {
                let dispersion = self.dispersion()?;
                let psi = match &self.psi {
                    Some(psi) => match dispersion {
                        Dispersion::Phi(_) => Dispersion::Phi(parse_f64("--psi", psi)?),
                        Dispersion::NormPhi(_) => Dispersion::NormPhi(parse_f64("--psi", psi)?),
                    },
                    None => dispersion,
                };
                let p = match &self.p {
                    Some(p) => parse_f64("--p", p)?,
                    None => return Err(usage("mallows-mixture needs --p")),
                };
                ModelSpec::MallowsReversalMixture {
                    m: self.m()?,
                    phi: dispersion,
                    psi,
                    p,
                    central: None,
                }
            }
            "conitzer" => ModelSpec::Conitzer { m: self.m()? },
            "walsh" => ModelSpec::Walsh { m: self.m()? },
            "caterpillar" => ModelSpec::GsTreeUniform {
                tree: GsTree::caterpillar(self.m()?)?,
            },
            "gs-tree" => ModelSpec::GsTreeUniform { tree: self.tree()? },
            "phi-conitzer" => ModelSpec::MallowsFiltered {
                base: Box::new(ModelSpec::Conitzer { m: self.m()? }),
                dispersion: self.dispersion()?,
            },
            "phi-walsh" => ModelSpec::MallowsFiltered {
                base: Box::new(ModelSpec::Walsh { m: self.m()? }),
                dispersion: self.dispersion()?,
            },
            "mallows-filtered" => {
                let m = self.m()?;
                let base = match self.base.as_deref() {
                    Some("ic") => ModelSpec::ImpartialCulture { m },
                    Some("conitzer") => ModelSpec::Conitzer { m },
                    Some("walsh") => ModelSpec::Walsh { m },
                    Some("caterpillar") => ModelSpec::GsTreeUniform {
                        tree: GsTree::caterpillar(m)?,
                    },
                    Some(other) => {
                        return Err(usage(format!("unknown --base family {other:?}")))
                    }
                    None => return Err(usage("mallows-filtered needs --base <family>")),
                };
                ModelSpec::MallowsFiltered {
                    base: Box::new(base),
                    dispersion: self.dispersion()?,
                }
            }
            other => return Err(usage(format!("unknown model family {other:?}"))),
        };
        Ok(spec)
    }

    /// Computes the model's frequency matrix in the requested arithmetic.
    pub fn build_matrix(
        &self,
        precision: Precision,
        mallows_cap: usize,
    ) -> Result<FrequencyMatrix, CliError> {
        let spec = self.build_spec()?;
        match precision {
            Precision::Float => Ok(model_matrix_with_cap(&spec, mallows_cap)?),
            Precision::Rational => self.build_rational(&spec),
        }
    }

    /// Exact evaluation. Dispersions given as --phi use the decimal text
    /// exactly; --normphi is resolved numerically and then lifted to the
    /// exact binary value of the resulting float.
    fn build_rational(&self, spec: &ModelSpec) -> Result<FrequencyMatrix, CliError> {
        let rows = self.rational_rows(spec)?;
        Ok(exact::to_frequency_matrix(&rows))
    }

    fn rational_dispersion(
        &self,
        dispersion: &Dispersion,
        m: usize,
    ) -> Result<BigRational, CliError> {
        match dispersion {
            Dispersion::Phi(_) => {
                let text = self.phi.as_deref().expect("phi flag present");
                exact::decimal_to_rational(text)
                    .ok_or_else(|| usage(format!("--phi {text:?} is not a plain decimal")))
            }
            Dispersion::NormPhi(_) => {
                let phi = dispersion.resolve(m)?;
                BigRational::from_float(phi)
                    .ok_or_else(|| usage("resolved dispersion is not finite"))
            }
        }
    }

    fn rational_rows(&self, spec: &ModelSpec) -> Result<exact::RationalMatrix, CliError> {
        let m = spec.num_candidates();
        Ok(match spec {
            ModelSpec::ImpartialCulture { .. } => exact::compass_rational(
                votemap::compass::CompassKind::Uniformity,
                m,
            )?,
            ModelSpec::Mallows { dispersion, central, .. } => {
                let phi = self.rational_dispersion(dispersion, m)?;
                exact::mallows_rational(m, &phi, central.as_ref())
            }
            ModelSpec::MallowsReversalMixture {
                phi, psi, central, ..
            } => {
                let phi_q = self.rational_dispersion(phi, m)?;
                let psi_q = match &self.psi {
                    Some(text) => exact::decimal_to_rational(text)
                        .ok_or_else(|| usage(format!("--psi {text:?} is not a plain decimal")))?,
                    None => match psi {
                        Dispersion::NormPhi(_) => self.rational_dispersion(psi, m)?,
                        Dispersion::Phi(_) => phi_q.clone(),
                    },
                };
                let p_text = self.p.as_deref().expect("p flag present");
                let p_q = exact::decimal_to_rational(p_text)
                    .ok_or_else(|| usage(format!("--p {p_text:?} is not a plain decimal")))?;
                exact::reversal_mixture_rational(m, &phi_q, &psi_q, &p_q, central.as_ref())
            }
            ModelSpec::Conitzer { .. } => exact::conitzer_rational(m),
            ModelSpec::Walsh { .. } => exact::walsh_rational(m),
            ModelSpec::GsTreeUniform { tree } => exact::gs_tree_rational(tree),
            ModelSpec::MallowsFiltered { base, dispersion } => {
                let base_rows = self.rational_rows(base)?;
                let phi = self.rational_dispersion(dispersion, m)?;
                exact::mallows_filter_rational(&base_rows, &phi)
            }
        })
    }
}

fn parse_f64(flag: &str, text: &str) -> Result<f64, CliError> {
    text.trim()
        .parse::<f64>()
        .map_err(|_| usage(format!("{flag} expects a number, got {text:?}")))
}
