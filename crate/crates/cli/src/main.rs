//! Command-line front end: model matrices, distances, election sampling,
//! parameter fitting, the distribution map, variance experiments, and the
//! Kemeny estimate. Results go to stdout as one JSON object per line;
//! matrices, profiles and layouts go to files.

mod model_args;

use clap::{Parser, Subcommand};
use model_args::{CliError, ModelArgs, Precision};
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use votemap::election::Election;
use votemap::embedding::{build_catalog, embed, misrepresentation_ratios};
use votemap::fitting::{fit_families, kemeny_estimate, FitFamily};
use votemap::io;
use votemap::metric::{positionwise_distance, DistanceReport};
use votemap::samplers::{empirical_matrix_distance, sample_election, SampleRequest};
use votemap::FrequencyMatrix;

#[derive(Parser)]
#[command(
    name = "votemap",
    version,
    about = "Frequency matrices of vote distributions, positionwise distances, fitting, and maps"
)]
struct Cli {
    /// Master seed for sampling and embedding.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for batch computations (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Arithmetic used for model matrices where exact evaluation exists.
    #[arg(long, global = true, value_enum, default_value_t = Precision::Float)]
    precision: Precision,
    /// Candidate-count cap for Mallows-family matrices.
    #[arg(long, global = true, default_value_t = votemap::models::DEFAULT_MALLOWS_CAP)]
    mallows_cap: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the frequency matrix of a model to a CSV file.
    Matrix {
        #[command(flatten)]
        model: ModelArgs,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Positionwise distance between two elections or matrices (.soc/.csv).
    Distance {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        /// Report the raw (unnormalized) distance as the headline value.
        #[arg(long)]
        raw: bool,
    },
    /// Sample an election from a model and write it as a .soc profile.
    Sample {
        #[command(flatten)]
        model: ModelArgs,
        /// Number of voters.
        #[arg(long)]
        n: u64,
        /// Output .soc path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit model families to an election by grid search.
    Fit {
        /// Input .soc profile.
        #[arg(long)]
        election: PathBuf,
        /// Comma-separated families:
        /// mallows,phi-conitzer,phi-walsh,mallows-mixture.
        #[arg(long, default_value = "mallows,phi-conitzer,phi-walsh")]
        families: String,
        /// Normalized-dispersion grid step.
        #[arg(long, default_value_t = 0.001)]
        grid_step: f64,
    },
    /// Build the distribution map for m candidates.
    Map {
        #[arg(long)]
        m: usize,
        /// Layout CSV output path.
        #[arg(long)]
        out: PathBuf,
        /// Optional SVG scatter output.
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Optional misrepresentation-ratio CSV output.
        #[arg(long)]
        ratios: Option<PathBuf>,
        #[arg(long, default_value_t = 300)]
        max_iter: usize,
        #[arg(long, default_value_t = 1e-6)]
        eps: f64,
    },
    /// Distance statistics of sampled elections to their model matrix.
    Variance {
        #[command(flatten)]
        model: ModelArgs,
        /// Voters per sampled election.
        #[arg(long)]
        n: u64,
        /// Number of sampled elections.
        #[arg(long)]
        trials: u64,
    },
    /// Exact Kemeny consensus and the dispersion it implies.
    Kemeny {
        /// Input .soc profile.
        #[arg(long)]
        election: PathBuf,
    },
}

#[derive(Serialize)]
struct DistanceJson<'a> {
    m: usize,
    distance: f64,
    raw: f64,
    normalized: f64,
    /// 1-based: column i of A matches column assignment[i-1] of B.
    assignment: &'a [usize],
}

#[derive(Serialize)]
struct FileJson<'a> {
    out: &'a Path,
    m: usize,
}

#[derive(Serialize)]
struct SampleJson<'a> {
    out: &'a Path,
    m: usize,
    n: u64,
    seed: u64,
}

#[derive(Serialize)]
struct MapJson<'a> {
    out: &'a Path,
    m: usize,
    points: usize,
    stress: f64,
}

#[derive(Serialize)]
struct VarianceJson {
    m: usize,
    n: u64,
    trials: u64,
    mean: f64,
    q10: f64,
    q90: f64,
}

#[derive(Serialize)]
struct KemenyJson {
    /// 1-based candidate ids, best first.
    consensus: Vec<usize>,
    total_distance: u64,
    phi_hat: f64,
    norm_phi_hat: f64,
}

fn emit(value: &impl Serialize) {
    println!("{}", serde_json::to_string(value).expect("serializable"));
}

/// Loads either a strict-order profile (.soc) or a matrix CSV.
fn load_matrix(path: &Path) -> Result<FrequencyMatrix, CliError> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("soc") => Ok(io::read_soc(path)?.frequency_matrix()),
        Some("csv") => Ok(io::read_matrix_csv(path)?),
        other => Err(CliError::Usage(format!(
            "--a/--b need a .soc or .csv file, got extension {other:?} on {}",
            path.display()
        ))),
    }
}

fn load_election(path: &Path) -> Result<Election, CliError> {
    Ok(io::read_soc(path)?)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Matrix { model, out } => {
            let matrix = model.build_matrix(cli.precision, cli.mallows_cap)?;
            io::write_matrix_csv(&matrix, &out)?;
            emit(&FileJson {
                out: &out,
                m: matrix.dim(),
            });
        }
        Command::Distance { a, b, raw } => {
            let ma = load_matrix(&a)?;
            let mb = load_matrix(&b)?;
            let report: DistanceReport = positionwise_distance(&ma, &mb)?;
            let assignment: Vec<usize> = report.assignment.iter().map(|&j| j + 1).collect();
            emit(&DistanceJson {
                m: report.m,
                distance: if raw { report.raw } else { report.normalized },
                raw: report.raw,
                normalized: report.normalized,
                assignment: &assignment,
            });
        }
        Command::Sample { model, n, out } => {
            let spec = model.build_spec()?;
            let election = sample_election(&SampleRequest {
                spec,
                n,
                seed: cli.seed,
            })?;
            io::write_soc(&election, &out)?;
            emit(&SampleJson {
                out: &out,
                m: election.num_candidates(),
                n,
                seed: cli.seed,
            });
        }
        Command::Fit {
            election,
            families,
            grid_step,
        } => {
            let e = load_election(&election)?;
            let families = families
                .split(',')
                .map(|tok| FitFamily::parse(tok.trim()).map_err(|err| CliError::Usage(err.to_string())))
                .collect::<Result<Vec<_>, _>>()?;
            for result in fit_families(&e, &families, grid_step)? {
                emit(&result);
            }
        }
        Command::Map {
            m,
            out,
            svg,
            ratios,
            max_iter,
            eps,
        } => {
            let catalog = build_catalog(m)?;
            let layout = embed(&catalog, cli.seed, max_iter, eps)?;
            io::write_layout_csv(&layout, &out)?;
            if let Some(svg) = svg {
                io::write_layout_svg(&layout, &svg)?;
            }
            if let Some(ratios_path) = ratios {
                let ratios = misrepresentation_ratios(&layout)?;
                io::write_ratios_csv(&ratios, &ratios_path)?;
            }
            emit(&MapJson {
                out: &out,
                m,
                points: catalog.len(),
                stress: layout.stress(),
            });
        }
        Command::Variance { model, n, trials } => {
            let spec = model.build_spec()?;
            let summary = empirical_matrix_distance(&spec, n, trials, cli.seed)?;
            emit(&VarianceJson {
                m: spec.num_candidates(),
                n,
                trials,
                mean: summary.mean,
                q10: summary.q10,
                q90: summary.q90,
            });
        }
        Command::Kemeny { election } => {
            let e = load_election(&election)?;
            let estimate = kemeny_estimate(&e)?;
            emit(&KemenyJson {
                consensus: estimate.consensus.order().iter().map(|&c| c + 1).collect(),
                total_distance: estimate.total_distance,
                phi_hat: estimate.phi_hat,
                norm_phi_hat: estimate.norm_phi_hat,
            });
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("warning: could not configure thread pool: {e}");
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Domain(err)) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}
