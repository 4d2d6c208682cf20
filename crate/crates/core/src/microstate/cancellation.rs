use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factor_graph::FactorGraph;
use crate::gf2::BitVec;

/// dim ker 𝐇ᵀ over GF(2), i.e. the number of checks minus rank 𝐇.
pub fn transpose_kernel_dim(graph: &FactorGraph) -> usize {
    graph.num_checks() - graph.parity_check_matrix().rank()
}

/// Whether some check subset `E'` with `𝐇ᵀ e_{E'} = 0` covers every vertex
/// exactly twice. Enumerates ker 𝐇ᵀ, so its dimension must be at most 25.
pub fn detect_double_cover(graph: &FactorGraph) -> Result<bool> {
    let kernel = graph.parity_check_matrix().transpose().kernel_basis();
    let mut found = false;
    let mut coverage = vec![0u32; graph.n()];
    kernel.for_each_codeword(|y| {
        if found || y.is_zero() || y.weight() * graph.k() != 2 * graph.n() {
            return;
        }
        coverage.iter_mut().for_each(|c| *c = 0);
        for e in y.iter_ones() {
            for &v in graph.check(e) {
                coverage[v as usize] += 1;
            }
        }
        found = coverage.iter().all(|&c| c == 2);
    })?;
    Ok(found)
}

/// Picks checks round-robin over the parts, uniformly within each part,
/// until their vertex union has at least `target` vertices.
pub fn select_check_set<R: Rng + ?Sized>(graph: &FactorGraph, target: usize, rng: &mut R) -> Result<Vec<usize>> {
    if target > graph.n() {
        return Err(Error::invalid(format!("target {target} exceeds n = {}", graph.n())));
    }
    let mut chosen = vec![false; graph.num_checks()];
    let mut covered = vec![false; graph.n()];
    let mut count = 0;
    let mut out = Vec::new();
    let mut part = 0;
    while count < target {
        let range = graph.part_range(part);
        let free: Vec<usize> = range.filter(|&e| !chosen[e]).collect();
        if let Some(&e) = free.get(rng.gen_range(0..free.len().max(1))) {
            chosen[e] = true;
            out.push(e);
            for &v in graph.check(e) {
                if !std::mem::replace(&mut covered[v as usize], true) {
                    count += 1;
                }
            }
        }
        part = (part + 1) % graph.d();
    }
    out.sort_unstable();
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NearCancellationReport {
    /// |W| = |Vert(F)|.
    pub w: usize,
    pub kernel_dim: usize,
    pub examined: u64,
    pub flagged: u64,
    /// The threshold `εδn/k` on part weights.
    pub threshold: f64,
}

/// Enumerates `y` over `E∖F` with `(𝐇ᵀ y)_{V∖W} = 0` and counts those
/// whose part weights `ℓ_i` satisfy `min{ℓ_i, |E_i∖F_i| - ℓ_i} ≥ εδn/k`
/// for some part.
pub fn near_cancellation_search(graph: &FactorGraph, f: &[usize], epsilon: f64, delta: f64) -> Result<NearCancellationReport> {
    if !graph.is_partitioned() {
        return Err(Error::invalid("near-cancellation search needs a partitioned factor graph"));
    }
    let (n, d, k) = (graph.n(), graph.d(), graph.k());
    let mut in_f = vec![false; graph.num_checks()];
    for &e in f {
        *in_f.get_mut(e).ok_or_else(|| Error::invalid(format!("check {e} out of range")))? = true;
    }
    let mut in_w = vec![false; n];
    for (e, _) in in_f.iter().enumerate().filter(|(_, &b)| b) {
        for &v in graph.check(e) {
            in_w[v as usize] = true;
        }
    }
    let rows: Vec<usize> = (0..graph.num_checks()).filter(|&e| !in_f[e]).collect();
    let cols: Vec<usize> = (0..n).filter(|&v| !in_w[v]).collect();
    let sub = graph.parity_check_matrix().select_rows(&rows).select_columns(&cols);
    let kernel = sub.transpose().kernel_basis();

    let mut free_per_part = vec![0usize; d];
    let part_masks: Vec<BitVec> = (0..d)
        .map(|i| {
            let idx: Vec<usize> =
                rows.iter().enumerate().filter(|(_, &e)| graph.part_of(e) == i).map(|(j, _)| j).collect();
            free_per_part[i] = idx.len();
            BitVec::from_indices(rows.len(), idx)
        })
        .collect();
    let threshold = epsilon * delta * n as f64 / k as f64;
    let mut examined = 0u64;
    let mut flagged = 0u64;
    kernel.for_each_codeword(|y| {
        examined += 1;
        let hit = part_masks.iter().zip(&free_per_part).any(|(mask, &free)| {
            let l: usize = y.words().iter().zip(mask.words()).map(|(a, b)| (a & b).count_ones() as usize).sum();
            (l.min(free - l) as f64) >= threshold
        });
        if hit {
            flagged += 1;
        }
    })?;
    Ok(NearCancellationReport {
        w: in_w.iter().filter(|&&b| b).count(),
        kernel_dim: kernel.dimension(),
        examined,
        flagged,
        threshold,
    })
}
