//! The codes X_σ as microstate spaces: distances, weight spectra,
//! approximate codewords, clusters, local marginals and cancellation checks.

mod cancellation;
mod cluster;
mod local;

pub use cancellation::{
    detect_double_cover, near_cancellation_search, select_check_set, transpose_kernel_dim, NearCancellationReport,
};
pub use cluster::{
    cluster_decomposition, cluster_decomposition_linear, shattering_scan, ClusterReport, ShatteringReport,
    ShatteringTrial, MAX_PAIRWISE_POINTS,
};
pub use local::{
    edge_marginal_tv, localized_marginal, proper_fraction, property_m_entropy, LocalProjector, ProperReport,
};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factor_graph::FactorGraph;
use crate::gf2::{BitVec, LinearCode, MAX_ENUMERATION_DIM};

/// Largest word length for exhaustive scans over all of `{0,1}^n`.
pub const MAX_EXHAUSTIVE_N: usize = 25;

/// Fraction of coordinates where `x` and `y` differ.
pub fn normalized_hamming(x: &BitVec, y: &BitVec) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch { left: x.len(), right: y.len() });
    }
    if x.is_empty() {
        return Ok(0.0);
    }
    Ok(x.distance(y) as f64 / x.len() as f64)
}

/// Minimum nonzero weight of `code`, which for a linear code equals its
/// minimum pairwise distance. `None` for the zero code.
pub fn min_distance(code: &LinearCode) -> Result<Option<usize>> {
    code.min_weight()
}

/// Summary of one code X_σ.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CodeStats {
    pub n: usize,
    pub d: usize,
    pub k: usize,
    pub dimension: usize,
    /// Exact minimum weight when enumerable, otherwise the smallest sampled weight.
    pub min_weight: Option<usize>,
    pub min_weight_exact: bool,
    /// Exact spectrum when enumerable, otherwise a histogram of sampled weights.
    pub spectrum: Vec<u64>,
    pub spectrum_exact: bool,
}

impl CodeStats {
    /// Enumerates the code when `dim ≤ 25`, otherwise draws `samples`
    /// uniform codewords.
    pub fn compute<R: Rng + ?Sized>(graph: &FactorGraph, code: &LinearCode, samples: usize, rng: &mut R) -> Result<Self> {
        let n = graph.n();
        let (spectrum, exact) = if code.dimension() <= MAX_ENUMERATION_DIM {
            (code.weight_spectrum()?, true)
        } else {
            let mut hist = vec![0u64; n + 1];
            for _ in 0..samples {
                hist[code.uniform_codeword(rng).weight()] += 1;
            }
            (hist, false)
        };
        let min_weight = spectrum.iter().enumerate().skip(1).find(|(_, &c)| c > 0).map(|(w, _)| w);
        Ok(CodeStats {
            n,
            d: graph.d(),
            k: graph.k(),
            dimension: code.dimension(),
            min_weight,
            min_weight_exact: exact,
            spectrum,
            spectrum_exact: exact,
        })
    }
}

/// Integer weight range `[lo·n, hi·n)` of a closed-open normalized band.
pub fn band_weights(n: usize, lo: f64, hi: f64) -> std::ops::Range<usize> {
    let start = (lo * n as f64 - 1e-9).ceil().max(0.0) as usize;
    let end = ((hi * n as f64 - 1e-9).ceil().max(0.0) as usize).min(n + 1);
    start..end.max(start)
}

/// Sum of `spectrum[w]` over the band `[lo, hi)` in normalized units.
pub fn count_in_band(spectrum: &[u64], lo: f64, hi: f64) -> u64 {
    let n = spectrum.len() - 1;
    band_weights(n, lo, hi).map(|w| spectrum[w]).sum()
}

fn check_masks(graph: &FactorGraph) -> Result<Vec<u32>> {
    if graph.n() > MAX_EXHAUSTIVE_N {
        return Err(Error::resource(format!("exhaustive scan needs n <= {MAX_EXHAUSTIVE_N}, got {}", graph.n())));
    }
    Ok(graph.checks().iter().map(|c| c.iter().fold(0u32, |m, &v| m | 1 << v)).collect())
}

/// Whether `x` violates at most `⌊η n/k⌋` checks of every part.
fn within_eta(x: u32, masks: &[u32], part: usize, allowed: usize) -> bool {
    masks.chunks(part).all(|ms| ms.iter().filter(|&&m| (x & m).count_ones() % 2 == 1).count() <= allowed)
}

fn allowed_violations(graph: &FactorGraph, eta: f64) -> Result<usize> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::invalid(format!("eta must lie in [0, 1], got {eta}")));
    }
    Ok((eta * graph.part_size() as f64 + 1e-9).floor() as usize)
}

/// Exact weight spectrum of X_σ^η: words whose fraction of violated checks
/// in every part is at most `η`. Requires `n ≤ 25`.
pub fn approximate_codewords_exhaustive(graph: &FactorGraph, eta: f64) -> Result<Vec<u64>> {
    let masks = check_masks(graph)?;
    let allowed = allowed_violations(graph, eta)?;
    let (n, part) = (graph.n(), graph.part_size());
    let total = 1u64 << n;
    let chunk = 1u64 << n.saturating_sub(8).min(16);
    let spectrum = (0..total.div_ceil(chunk))
        .into_par_iter()
        .map(|c| {
            let mut counts = vec![0u64; n + 1];
            for x in c * chunk..((c + 1) * chunk).min(total) {
                let x = x as u32;
                if within_eta(x, &masks, part, allowed) {
                    counts[x.count_ones() as usize] += 1;
                }
            }
            counts
        })
        .reduce(
            || vec![0u64; n + 1],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    Ok(spectrum)
}

/// Monte Carlo estimate of `|X_σ^η ∩ band| / 2^n` from uniform words.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApproxEstimate {
    pub samples: u64,
    pub hits: u64,
    pub fraction: f64,
    /// 95% Wilson score interval for `fraction`.
    pub ci_low: f64,
    pub ci_high: f64,
}

fn wilson_interval(hits: u64, samples: u64) -> (f64, f64) {
    let z = 1.959_963_984_540_054;
    let n = samples as f64;
    let p = hits as f64 / n;
    let denom = 1.0 + z * z / n;
    let centre = (p + z * z / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Uniform-sampling estimate of the density of X_σ^η words in the weight
/// band `[lo, hi)`.
pub fn approximate_codewords_sampled<R: Rng + ?Sized>(
    graph: &FactorGraph,
    eta: f64,
    lo: f64,
    hi: f64,
    samples: u64,
    rng: &mut R,
) -> Result<ApproxEstimate> {
    if samples == 0 {
        return Err(Error::invalid("need at least one sample"));
    }
    let allowed = allowed_violations(graph, eta)?;
    let (n, part) = (graph.n(), graph.part_size());
    let band = band_weights(n, lo, hi);
    let mut hits = 0;
    for _ in 0..samples {
        let x = BitVec::from_bools(&(0..n).map(|_| rng.gen::<bool>()).collect::<Vec<_>>());
        if !band.contains(&x.weight()) {
            continue;
        }
        let ok = graph.checks().chunks(part).all(|cs| {
            cs.iter().filter(|c| c.iter().filter(|&&v| x.get(v as usize)).count() % 2 == 1).count() <= allowed
        });
        if ok {
            hits += 1;
        }
    }
    let (ci_low, ci_high) = wilson_interval(hits, samples);
    Ok(ApproxEstimate { samples, hits, fraction: hits as f64 / samples as f64, ci_low, ci_high })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factor_graph::sample_permutation_model;
    use crate::rng::seeded;

    #[test]
    fn hamming_examples() {
        let x = BitVec::from_indices(10, [1, 4, 7]);
        assert_eq!(normalized_hamming(&x, &x).unwrap(), 0.0);
        let mut y = x.clone();
        y.xor_assign(&BitVec::ones(10));
        assert_eq!(normalized_hamming(&x, &y).unwrap(), 1.0);
        assert!((normalized_hamming(&x, &BitVec::zeros(10)).unwrap() - 0.3).abs() < 1e-15);
        assert!(normalized_hamming(&x, &BitVec::zeros(9)).is_err());
    }

    #[test]
    fn band_endpoints() {
        assert_eq!(band_weights(40, 0.05, 0.112159), 2..5);
        assert_eq!(band_weights(40, 0.0, 0.05), 0..2);
        assert_eq!(band_weights(10, 0.0, 1.1), 0..11);
    }

    #[test]
    fn eta_extremes() {
        let mut rng = seeded(3);
        let (_, graph) = sample_permutation_model(16, 3, 4, &mut rng).unwrap();
        let all = approximate_codewords_exhaustive(&graph, 1.0).unwrap();
        assert_eq!(all.iter().sum::<u64>(), 1 << 16);
        let exact = approximate_codewords_exhaustive(&graph, 0.0).unwrap();
        let code = graph.parity_check_matrix().kernel_basis();
        assert_eq!(exact, code.weight_spectrum().unwrap());
        let loose = approximate_codewords_exhaustive(&graph, 0.25).unwrap();
        assert!(loose.iter().zip(&exact).all(|(a, b)| a >= b));
    }

    #[test]
    fn exhaustive_cap() {
        let mut rng = seeded(4);
        let (_, graph) = sample_permutation_model(28, 3, 4, &mut rng).unwrap();
        assert!(matches!(approximate_codewords_exhaustive(&graph, 0.0), Err(Error::Resource(_))));
    }

    #[test]
    fn sampled_estimate_covers_exact_density() {
        let mut rng = seeded(5);
        let (_, graph) = sample_permutation_model(16, 3, 4, &mut rng).unwrap();
        let spectrum = approximate_codewords_exhaustive(&graph, 0.5).unwrap();
        let exact = count_in_band(&spectrum, 0.0, 1.01) as f64 / (1u64 << 16) as f64;
        let est = approximate_codewords_sampled(&graph, 0.5, 0.0, 1.01, 20_000, &mut rng).unwrap();
        assert!(est.ci_low <= exact && exact <= est.ci_high, "{exact} not in {est:?}");
    }

    #[test]
    fn stats_dimension_bound() {
        let mut rng = seeded(6);
        let (_, graph) = sample_permutation_model(40, 3, 4, &mut rng).unwrap();
        let code = graph.parity_check_matrix().kernel_basis();
        let stats = CodeStats::compute(&graph, &code, 0, &mut rng).unwrap();
        assert!(stats.dimension >= 10);
        assert_eq!(stats.spectrum[0], 1);
        assert!(stats.spectrum_exact);
        assert_eq!(stats.min_weight, min_distance(&code).unwrap());
    }
}
