use petgraph::unionfind::UnionFind;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{approximate_codewords_exhaustive, count_in_band};
use crate::error::{Error, Result};
use crate::factor_graph::FactorGraph;
use crate::gf2::{BitVec, LinearCode};

/// Cap on the number of points for the quadratic pairwise decomposition.
pub const MAX_PAIRWISE_POINTS: usize = 10_000;

/// Clusters under δ-connectivity (`d(x, y) < δ` links `x` and `y`) together
/// with the pairwise distance histogram.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterReport {
    pub epsilon: f64,
    pub delta: f64,
    pub word_length: usize,
    pub points: u64,
    /// `distance_histogram[m]` = unordered pairs at Hamming distance `m`.
    pub distance_histogram: Vec<u64>,
    /// No pair at normalized distance in `[ε, δ)`.
    pub gap_empty: bool,
    pub cluster_count: u64,
    /// `(size, how many clusters have that size)`, largest first.
    pub cluster_sizes: Vec<(u64, u64)>,
}

fn check_thresholds(epsilon: f64, delta: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&epsilon) || !(0.0..=1.0).contains(&delta) || epsilon > delta {
        return Err(Error::invalid(format!("need 0 <= eps <= delta <= 1, got eps={epsilon}, delta={delta}")));
    }
    Ok(())
}

fn gap_empty(hist: &[u64], n: usize, epsilon: f64, delta: f64) -> bool {
    hist.iter().enumerate().skip(1).all(|(m, &c)| {
        let dist = m as f64 / n as f64;
        c == 0 || !(epsilon..delta).contains(&dist)
    })
}

fn size_histogram(mut sizes: Vec<u64>) -> Vec<(u64, u64)> {
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    let mut out: Vec<(u64, u64)> = Vec::new();
    for s in sizes {
        match out.last_mut() {
            Some((size, count)) if *size == s => *count += 1,
            _ => out.push((s, 1)),
        }
    }
    out
}

/// Pairwise union-find decomposition of arbitrary points.
pub fn cluster_decomposition(points: &[BitVec], epsilon: f64, delta: f64) -> Result<ClusterReport> {
    check_thresholds(epsilon, delta)?;
    if points.len() > MAX_PAIRWISE_POINTS {
        return Err(Error::resource(format!("{} points exceed the pairwise cap {MAX_PAIRWISE_POINTS}", points.len())));
    }
    let n = points.first().map_or(0, |p| p.len());
    if points.iter().any(|p| p.len() != n) {
        return Err(Error::invalid("points have different lengths"));
    }
    let mut uf = UnionFind::<usize>::new(points.len());
    let mut hist = vec![0u64; n + 1];
    for a in 0..points.len() {
        for b in a + 1..points.len() {
            let m = points[a].distance(&points[b]);
            hist[m] += 1;
            if n == 0 || (m as f64 / n as f64) < delta {
                uf.union(a, b);
            }
        }
    }
    let labels = uf.into_labeling();
    let mut counts = std::collections::HashMap::new();
    for l in labels {
        *counts.entry(l).or_insert(0u64) += 1;
    }
    Ok(ClusterReport {
        epsilon,
        delta,
        word_length: n,
        points: points.len() as u64,
        gap_empty: n == 0 || gap_empty(&hist, n, epsilon, delta),
        distance_histogram: hist,
        cluster_count: counts.len() as u64,
        cluster_sizes: size_histogram(counts.into_values().collect()),
    })
}

/// Decomposition of a whole linear code: δ-clusters are the cosets of the
/// span of codewords lighter than `δn`, and pair distances are weights of
/// differences. Requires an enumerable code.
pub fn cluster_decomposition_linear(code: &LinearCode, epsilon: f64, delta: f64) -> Result<ClusterReport> {
    check_thresholds(epsilon, delta)?;
    let n = code.len();
    let limit = delta * n as f64;
    let mut spectrum = vec![0u64; n + 1];
    let mut light = Vec::new();
    code.for_each_codeword(|x| {
        let w = x.weight();
        spectrum[w] += 1;
        if w > 0 && (w as f64) < limit {
            light.push(x.clone());
        }
    })?;
    let span = LinearCode::from_generators(n, light).dimension();
    let dim = code.dimension();
    let half = if dim == 0 { 0 } else { 1u64 << (dim - 1) };
    let mut hist: Vec<u64> = spectrum.iter().map(|&c| c * half).collect();
    hist[0] = 0;
    Ok(ClusterReport {
        epsilon,
        delta,
        word_length: n,
        points: 1u64 << dim,
        gap_empty: n == 0 || gap_empty(&hist, n, epsilon, delta),
        distance_histogram: hist,
        cluster_count: 1u64 << (dim - span),
        cluster_sizes: vec![(1u64 << span, 1u64 << (dim - span))],
    })
}

/// One σ of a shattering scan.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShatteringTrial {
    pub trial: usize,
    pub dimension: usize,
    pub min_weight: Option<usize>,
    /// Words of X_σ^η with weight in the band.
    pub band_count: u64,
    pub band_empty: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShatteringReport {
    pub epsilon: f64,
    pub delta: f64,
    pub eta: f64,
    pub pass_fraction: f64,
    pub trials: Vec<ShatteringTrial>,
}

/// For each graph, whether X_σ^η has no word of normalized weight in
/// `[ε, δ)`. With `η = 0` the code is enumerated through a kernel basis;
/// otherwise all of `{0,1}^n` is scanned.
pub fn shattering_scan(graphs: &[FactorGraph], epsilon: f64, delta: f64, eta: f64) -> Result<ShatteringReport> {
    check_thresholds(epsilon, delta)?;
    let trials = graphs
        .par_iter()
        .enumerate()
        .map(|(trial, graph)| {
            let code = graph.parity_check_matrix().kernel_basis();
            let spectrum =
                if eta == 0.0 { code.weight_spectrum()? } else { approximate_codewords_exhaustive(graph, eta)? };
            let band_count = count_in_band(&spectrum, epsilon, delta);
            let min_weight = spectrum.iter().enumerate().skip(1).find(|(_, &c)| c > 0).map(|(w, _)| w);
            Ok(ShatteringTrial { trial, dimension: code.dimension(), min_weight, band_count, band_empty: band_count == 0 })
        })
        .collect::<Result<Vec<_>>>()?;
    let passed = trials.iter().filter(|t| t.band_empty).count();
    let pass_fraction = if trials.is_empty() { 0.0 } else { passed as f64 / trials.len() as f64 };
    Ok(ShatteringReport { epsilon, delta, eta, pass_fraction, trials })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factor_graph::sample_permutation_model;
    use crate::rng::seeded;

    #[test]
    fn trivial_cluster_counts() {
        let x = BitVec::from_indices(10, [0]);
        let r = cluster_decomposition(std::slice::from_ref(&x), 0.1, 0.2).unwrap();
        assert_eq!(r.cluster_count, 1);
        let y = BitVec::from_indices(10, [1, 2, 3]);
        let r = cluster_decomposition(&[x, y], 0.1, 0.2).unwrap();
        assert_eq!(r.cluster_count, 2);
        assert!(r.gap_empty);
        assert_eq!(r.distance_histogram[4], 1);
    }

    #[test]
    fn threshold_validation() {
        assert!(cluster_decomposition(&[], 0.3, 0.2).is_err());
        assert!(cluster_decomposition_linear(&LinearCode::zero(4), 0.0, 1.5).is_err());
    }

    #[test]
    fn linear_matches_pairwise_on_small_codes() {
        let mut rng = seeded(21);
        for _ in 0..10 {
            let (_, graph) = sample_permutation_model(24, 3, 4, &mut rng).unwrap();
            let code = graph.parity_check_matrix().kernel_basis();
            if code.dimension() > 11 {
                continue;
            }
            let mut words = Vec::new();
            code.for_each_codeword(|x| words.push(x.clone())).unwrap();
            for (eps, delta) in [(0.05, 0.1), (0.1, 0.3), (0.2, 0.5)] {
                let a = cluster_decomposition(&words, eps, delta).unwrap();
                let b = cluster_decomposition_linear(&code, eps, delta).unwrap();
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn separated_code_gives_singletons() {
        let code = LinearCode::from_generators(24, vec![BitVec::ones(24)]);
        let r = cluster_decomposition_linear(&code, 0.1, 0.5).unwrap();
        assert_eq!(r.cluster_count, 2);
        assert_eq!(r.cluster_sizes, vec![(1, 2)]);
    }

    #[test]
    fn scan_with_band_above_odd_k_codewords() {
        let mut rng = seeded(22);
        let graphs: Vec<_> =
            (0..5).map(|_| sample_permutation_model(15, 2, 3, &mut rng).unwrap().1).collect();
        // every codeword has weight at most 2n/3 when k = 3
        let r = shattering_scan(&graphs, 0.7, 1.0, 0.0).unwrap();
        assert_eq!(r.pass_fraction, 1.0);
    }
}
