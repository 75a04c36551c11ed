//! The map of distributions: a catalog of frequency matrices, the full
//! pairwise distance matrix, and a 2-D embedding by SMACOF stress
//! majorization with a canonical orientation.

use crate::compass::{affine_combination, compass_matrix, CompassKind};
use crate::error::{Error, Result};
use crate::matrix::FrequencyMatrix;
use crate::metric::npos;
use crate::models::{
    caterpillar_matrix, conitzer_matrix, mallows_filter_matrix_with_cap, mallows_matrix_with_cap,
    norm_phi_to_phi, reversal_mixture_matrix_with_cap, walsh_matrix, MallowsParams,
    DEFAULT_MALLOWS_CAP,
};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Labeled frequency matrices to be embedded together.
#[derive(Clone, Debug)]
pub struct MapCatalog {
    m: usize,
    points: Vec<(String, FrequencyMatrix)>,
}

impl MapCatalog {
    pub fn new(m: usize, points: Vec<(String, FrequencyMatrix)>) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for (label, matrix) in &points {
            if matrix.dim() != m {
                return Err(Error::DimensionMismatch {
                    left: matrix.dim(),
                    right: m,
                });
            }
            if !seen.insert(label.clone()) {
                return Err(Error::InvalidSpec(format!("duplicate label {label}")));
            }
        }
        Ok(Self { m, points })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[(String, FrequencyMatrix)] {
        &self.points
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.points.iter().map(|(l, _)| l.as_str())
    }
}

/// Dispersion grid used for the parametric families: `{0, 0.05, ..., 1}`.
fn phi_grid() -> Vec<f64> {
    (0..=20).map(|k| k as f64 * 0.05).collect()
}

/// Path grid strictly between two endpoint matrices: `{0.05, ..., 0.95}`.
fn alpha_grid() -> Vec<f64> {
    (1..=19).map(|k| k as f64 * 0.05).collect()
}

/// The standard catalog: the four compass matrices, convex paths between
/// every compass pair, the normalized-Mallows family, the half-reversal
/// mixture, the half-and-half blend of those two ("mallows-mix"), the
/// Mallows-filtered Conitzer and Walsh families, and the plain Conitzer,
/// Walsh and caterpillar matrices. Needs even `m` for the compass corners.
pub fn build_catalog(m: usize) -> Result<MapCatalog> {
    if m % 2 != 0 || m == 0 {
        return Err(Error::OddDimension {
            what: "map catalog",
            m,
        });
    }
    let cap = m.max(DEFAULT_MALLOWS_CAP);
    let mut points: Vec<(String, FrequencyMatrix)> = Vec::new();
    let compass: Vec<(&str, FrequencyMatrix)> = CompassKind::ALL
        .iter()
        .map(|&k| Ok((k.label(), compass_matrix(k, m)?)))
        .collect::<Result<_>>()?;
    for (label, matrix) in &compass {
        points.push((label.to_string(), matrix.clone()));
    }
    for a in 0..compass.len() {
        for b in (a + 1)..compass.len() {
            for alpha in alpha_grid() {
                let blend = affine_combination(&compass[a].1, &compass[b].1, alpha)?;
                points.push((
                    format!("{}-{}:{:.2}", compass[a].0, compass[b].0, alpha),
                    blend,
                ));
            }
        }
    }
    let conitzer = conitzer_matrix(m);
    let walsh = walsh_matrix(m);
    for norm_phi in phi_grid() {
        let phi = norm_phi_to_phi(m, norm_phi)?;
        let mallows = mallows_matrix_with_cap(&MallowsParams::new(m, phi), cap)?;
        let half_rev = reversal_mixture_matrix_with_cap(m, phi, phi, 0.5, None, cap)?;
        points.push((format!("mallows:{norm_phi:.2}"), mallows.clone()));
        points.push((format!("mallows-rev:{norm_phi:.2}"), half_rev.clone()));
        // equal-weight blend of the plain model and its half-reversal mixture
        points.push((format!("mallows-mix:{norm_phi:.2}"), mallows.blend(&half_rev, 0.5)));
        points.push((
            format!("phi-conitzer:{norm_phi:.2}"),
            mallows_filter_matrix_with_cap(&conitzer, phi, cap)?,
        ));
        points.push((
            format!("phi-walsh:{norm_phi:.2}"),
            mallows_filter_matrix_with_cap(&walsh, phi, cap)?,
        ));
    }
    points.push(("CON".to_string(), conitzer));
    points.push(("WAL".to_string(), walsh));
    points.push(("CAT".to_string(), caterpillar_matrix(m)));
    MapCatalog::new(m, points)
}

/// Full pairwise normalized positionwise distance matrix, computed in
/// parallel over the upper triangle.
pub fn distance_matrix(catalog: &MapCatalog) -> Result<Vec<Vec<f64>>> {
    let n = catalog.len();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .collect();
    let values: Result<Vec<f64>> = pairs
        .par_iter()
        .map(|&(i, j)| npos(&catalog.points()[i].1, &catalog.points()[j].1))
        .collect();
    let values = values?;
    let mut d = vec![vec![0.0; n]; n];
    for (&(i, j), v) in pairs.iter().zip(values) {
        d[i][j] = v;
        d[j][i] = v;
    }
    Ok(d)
}

/// A finished 2-D layout.
#[derive(Clone, Debug)]
pub struct EmbeddingLayout {
    labels: Vec<String>,
    coords: Vec<[f64; 2]>,
    /// Normalized final stress: `sqrt(sum (d - delta)^2 / sum delta^2)`.
    stress: f64,
    /// Raw stress after each majorization step.
    stress_history: Vec<f64>,
    /// The input distance matrix.
    distances: Vec<Vec<f64>>,
}

impl EmbeddingLayout {
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn coords(&self) -> &[[f64; 2]] {
        &self.coords
    }

    pub fn stress(&self) -> f64 {
        self.stress
    }

    pub fn stress_history(&self) -> &[f64] {
        &self.stress_history
    }

    pub fn distances(&self) -> &[Vec<f64>] {
        &self.distances
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    /// Euclidean distance between two embedded points.
    pub fn euclidean(&self, x: &str, y: &str) -> Result<f64> {
        let (i, j) = (self.index_of(x)?, self.index_of(y)?);
        Ok(point_distance(self.coords[i], self.coords[j]))
    }
}

fn point_distance(a: [f64; 2], b: [f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

fn raw_stress(coords: &[[f64; 2]], d: &[Vec<f64>]) -> f64 {
    let n = coords.len();
    let mut s = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let diff = point_distance(coords[i], coords[j]) - d[i][j];
            s += diff * diff;
        }
    }
    s
}

/// Classical-MDS initialization: double-center the squared distances and
/// take the top two eigenvectors by power iteration with deflation.
fn classical_mds_init(d: &[Vec<f64>]) -> Option<Vec<[f64; 2]>> {
    let n = d.len();
    let mut g = vec![vec![0.0; n]; n];
    let mut row_mean = vec![0.0; n];
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            let sq = d[i][j] * d[i][j];
            row_mean[i] += sq;
            total += sq;
        }
        row_mean[i] /= n as f64;
    }
    total /= (n * n) as f64;
    for i in 0..n {
        for j in 0..n {
            g[i][j] = -0.5 * (d[i][j] * d[i][j] - row_mean[i] - row_mean[j] + total);
        }
    }
    let (lambda1, v1) = power_iteration(&g, &[])?;
    if lambda1 <= 1e-12 {
        return None;
    }
    let mut coords = vec![[0.0; 2]; n];
    let scale1 = lambda1.sqrt();
    for i in 0..n {
        coords[i][0] = scale1 * v1[i];
    }
    let second = power_iteration(&g, &[(lambda1, v1)])?;
    if second.0 > 1e-12 * lambda1.max(1.0) {
        let scale2 = second.0.sqrt();
        for i in 0..n {
            coords[i][1] = scale2 * second.1[i];
        }
    } else {
        // (near-)collinear data: break the saddle with a deterministic
        // jitter that majorization can shrink back toward the line
        for (i, c) in coords.iter_mut().enumerate() {
            c[1] = 1e-7 * scale1 * ((3 * (i + 1)) as f64).sin();
        }
    }
    Some(coords)
}

/// Dominant eigenpair of a symmetric matrix after removing `deflated`
/// components. Deterministic start vector; `None` if it fails to converge.
fn power_iteration(g: &[Vec<f64>], deflated: &[(f64, Vec<f64>)]) -> Option<(f64, Vec<f64>)> {
    let n = g.len();
    let mut v: Vec<f64> = (0..n).map(|i| ((i + 1) as f64).sin()).collect();
    normalize(&mut v)?;
    let mut lambda = 0.0;
    for _ in 0..500 {
        let mut w = vec![0.0; n];
        for i in 0..n {
            let gi = &g[i];
            let mut acc = 0.0;
            for j in 0..n {
                acc += gi[j] * v[j];
            }
            w[i] = acc;
        }
        for (_lam, u) in deflated {
            // project out the converged eigenvector components
            let dot: f64 = u.iter().zip(&w).map(|(a, b)| a * b).sum();
            for i in 0..n {
                w[i] -= u[i] * dot;
            }
        }
        let new_lambda: f64 = v.iter().zip(&w).map(|(a, b)| a * b).sum();
        normalize(&mut w)?;
        let delta: f64 = v
            .iter()
            .zip(&w)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        v = w;
        if (new_lambda - lambda).abs() <= 1e-12 * (1.0 + new_lambda.abs()) && delta < 1e-10 {
            return Some((new_lambda, v));
        }
        lambda = new_lambda;
    }
    Some((lambda, v))
}

fn normalize(v: &mut [f64]) -> Option<()> {
    let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm < 1e-300 {
        return None;
    }
    for x in v.iter_mut() {
        *x /= norm;
    }
    Some(())
}

/// Embeds a catalog into the plane by SMACOF stress majorization.
///
/// Initialization is classical MDS (deterministic), falling back to seeded
/// random coordinates on degeneracy, so the seed only matters in the
/// degenerate case. The output is canonicalized: centroid at the origin,
/// first principal axis along x, and signs fixed against the ID point (or
/// the first point when ID is absent).
pub fn embed(
    catalog: &MapCatalog,
    seed: u64,
    max_iter: usize,
    eps: f64,
) -> Result<EmbeddingLayout> {
    let d = distance_matrix(catalog)?;
    embed_distances(
        catalog.labels().map(str::to_string).collect(),
        d,
        seed,
        max_iter,
        eps,
    )
}

/// SMACOF on a precomputed distance matrix.
pub fn embed_distances(
    labels: Vec<String>,
    distances: Vec<Vec<f64>>,
    seed: u64,
    max_iter: usize,
    eps: f64,
) -> Result<EmbeddingLayout> {
    let n = labels.len();
    if n < 3 {
        return Err(Error::InvalidSpec(format!(
            "embedding needs at least 3 points, got {n}"
        )));
    }
    let mut coords = classical_mds_init(&distances).unwrap_or_else(|| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| [rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5])
            .collect()
    });
    let mut history = Vec::with_capacity(max_iter + 1);
    let mut stress = raw_stress(&coords, &distances);
    history.push(stress);
    for _ in 0..max_iter {
        coords = guttman_step(&coords, &distances);
        let next = raw_stress(&coords, &distances);
        debug_assert!(next <= stress + 1e-9 * (1.0 + stress), "stress must not increase");
        history.push(next);
        let gain = (stress - next) / stress.max(f64::MIN_POSITIVE);
        stress = next;
        if gain < eps {
            break;
        }
    }
    canonicalize(&labels, &mut coords);
    let denom: f64 = {
        let mut s = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                s += distances[i][j] * distances[i][j];
            }
        }
        s
    };
    let normalized_stress = if denom > 0.0 {
        (stress / denom).sqrt()
    } else {
        0.0
    };
    Ok(EmbeddingLayout {
        labels,
        coords,
        stress: normalized_stress,
        stress_history: history,
        distances,
    })
}

/// One Guttman transform: `X <- B(X) X / n`, with zero-distance pairs
/// contributing nothing (coincident targets stay coincident).
fn guttman_step(coords: &[[f64; 2]], d: &[Vec<f64>]) -> Vec<[f64; 2]> {
    let n = coords.len();
    let mut next = vec![[0.0; 2]; n];
    for i in 0..n {
        let mut accx = 0.0;
        let mut accy = 0.0;
        for j in 0..n {
            if j == i {
                continue;
            }
            let dist = point_distance(coords[i], coords[j]);
            if dist > 1e-300 && d[i][j] > 0.0 {
                let ratio = d[i][j] / dist;
                accx += ratio * (coords[i][0] - coords[j][0]);
                accy += ratio * (coords[i][1] - coords[j][1]);
            }
        }
        next[i][0] = accx / n as f64;
        next[i][1] = accy / n as f64;
    }
    next
}

fn sum_axis(coords: &[[f64; 2]], axis: usize) -> f64 {
    coords.iter().map(|c| c[axis]).sum()
}

/// Centers, rotates to principal axes, and fixes the two sign ambiguities
/// against a reference point so repeated runs coincide.
fn canonicalize(labels: &[String], coords: &mut [[f64; 2]]) {
    let n = coords.len() as f64;
    let cx = sum_axis(coords, 0) / n;
    let cy = sum_axis(coords, 1) / n;
    for c in coords.iter_mut() {
        c[0] -= cx;
        c[1] -= cy;
    }
    // principal axis of the 2x2 covariance
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for c in coords.iter() {
        sxx += c[0] * c[0];
        sxy += c[0] * c[1];
        syy += c[1] * c[1];
    }
    let theta = 0.5 * (2.0 * sxy).atan2(sxx - syy);
    let (cos, sin) = (theta.cos(), theta.sin());
    for c in coords.iter_mut() {
        let x = cos * c[0] + sin * c[1];
        let y = -sin * c[0] + cos * c[1];
        c[0] = x;
        c[1] = y;
    }
    let reference = labels.iter().position(|l| l == "ID").unwrap_or(0);
    if coords[reference][0] > 0.0 {
        for c in coords.iter_mut() {
            c[0] = -c[0];
            c[1] = -c[1];
        }
    }
    if coords[reference][1] > 0.0 {
        for c in coords.iter_mut() {
            c[1] = -c[1];
        }
    }
}

/// Misrepresentation ratio of a pair: embedded distance (normalized by the
/// embedded ID-UN distance) over the true normalized positionwise distance.
pub fn misrepresentation(layout: &EmbeddingLayout, x: &str, y: &str) -> Result<f64> {
    let npos = layout.distances[layout.index_of(x)?][layout.index_of(y)?];
    if npos < 1e-9 {
        return Err(Error::UndefinedRatio(x.to_string(), y.to_string()));
    }
    let unit = layout.euclidean("ID", "UN")?;
    Ok(layout.euclidean(x, y)? / unit / npos)
}

/// All pairwise ratios with positive positionwise distance:
/// `(label_a, label_b, npos, normalized euclidean, ratio)`.
pub fn misrepresentation_ratios(
    layout: &EmbeddingLayout,
) -> Result<Vec<(String, String, f64, f64, f64)>> {
    let unit = layout.euclidean("ID", "UN")?;
    let n = layout.labels().len();
    let mut out = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let npos = layout.distances()[i][j];
            if npos < 1e-9 {
                continue;
            }
            let euc = point_distance(layout.coords()[i], layout.coords()[j]) / unit;
            out.push((
                layout.labels()[i].clone(),
                layout.labels()[j].clone(),
                npos,
                euc,
                euc / npos,
            ));
        }
    }
    Ok(out)
}
