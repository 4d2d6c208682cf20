//! Random k-uniform homomorphisms Γ_{d,k} → Sym(n) and their factor graphs.
//!
//! A factor graph has `d·n/k` check nodes. In the partitioned (permutation)
//! model check `e = i·(n/k) + t` is the `t`-th node of part `E_i`, and its
//! vertex tuple lists one orbit of `σ_i` in cyclic order, so `σ` can be read
//! back from the graph.

mod neighborhood;

pub use neighborhood::{
    check_neighborhood, greedy_separated_set, orbit_map_injective, sigma_distance, vert_neighborhood,
    Distance, NodeSet,
};

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVec};
use crate::group::GroupWord;

/// Default number of stub matchings tried by [`sample_uniform_model`].
pub const DEFAULT_UNIFORM_RETRIES: usize = 10_000;

fn check_model_params(n: usize, d: usize, k: usize) -> Result<()> {
    if k < 2 || d < 1 {
        return Err(Error::invalid(format!("need d >= 1 and k >= 2, got d={d}, k={k}")));
    }
    if n < k || n % k != 0 {
        return Err(Error::invalid(format!("n={n} must be a positive multiple of k={k}")));
    }
    if n > u32::MAX as usize {
        return Err(Error::invalid("n does not fit in u32"));
    }
    Ok(())
}

/// A homomorphism σ: Γ_{d,k} → Sym(n) whose generator images consist of
/// k-cycles only.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UniformHomomorphism {
    n: usize,
    d: usize,
    k: usize,
    perms: Vec<Vec<u32>>,
}

impl UniformHomomorphism {
    /// Validates that each `perms[i]` is a permutation of cycle type `[k^{n/k}]`.
    pub fn new(n: usize, d: usize, k: usize, perms: Vec<Vec<u32>>) -> Result<Self> {
        check_model_params(n, d, k)?;
        if perms.len() != d {
            return Err(Error::invalid(format!("expected {d} generator images, got {}", perms.len())));
        }
        for (i, p) in perms.iter().enumerate() {
            if p.len() != n || p.iter().any(|&x| x as usize >= n) {
                return Err(Error::invalid(format!("generator {i} is not a map on [n]")));
            }
            let mut seen = vec![false; n];
            for start in 0..n {
                if seen[start] {
                    continue;
                }
                let mut len = 0;
                let mut v = start;
                loop {
                    if seen[v] {
                        return Err(Error::invalid(format!("generator {i} is not a permutation")));
                    }
                    seen[v] = true;
                    len += 1;
                    v = p[v] as usize;
                    if v == start {
                        break;
                    }
                    if len > k {
                        break;
                    }
                }
                if len != k {
                    return Err(Error::invalid(format!("generator {i} has a cycle of length {len} != {k}")));
                }
            }
        }
        Ok(UniformHomomorphism { n, d, k, perms })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// The permutation σ(s_i) as an image table.
    pub fn generator_image(&self, i: usize) -> &[u32] {
        &self.perms[i]
    }

    #[inline]
    pub fn apply(&self, i: usize, v: usize) -> usize {
        self.perms[i][v] as usize
    }

    /// σ(s_i^j) v.
    #[inline]
    pub fn apply_power(&self, i: usize, j: usize, v: usize) -> usize {
        (0..j % self.k).fold(v, |u, _| self.apply(i, u))
    }

    /// σ(g) v, where σ(gh) = σ(g)σ(h).
    pub fn act(&self, g: &GroupWord, v: usize) -> usize {
        g.letters().iter().rev().fold(v, |u, l| self.apply_power(l.generator, l.power, u))
    }

    /// The pullback coordinate σ(g⁻¹) v, i.e. the vertex whose label the
    /// pullback name at `v` reads at position `g`.
    pub fn pullback_coordinate(&self, g: &GroupWord, v: usize) -> usize {
        g.letters().iter().fold(v, |u, l| self.apply_power(l.generator, self.k - l.power, u))
    }

    /// `[v, σ_i v, ..., σ_i^{k-1} v]`.
    pub fn orbit(&self, i: usize, v: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.k);
        let mut u = v;
        for _ in 0..self.k {
            out.push(u);
            u = self.apply(i, u);
        }
        out
    }
}

/// Bipartite incidence between `n` vertices and `d·n/k` check nodes, each
/// check holding a k-tuple of distinct vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorGraph {
    n: usize,
    d: usize,
    k: usize,
    checks: Vec<Vec<u32>>,
    partitioned: bool,
    vertex_checks: Vec<Vec<u32>>,
}

impl FactorGraph {
    /// Builds and validates a factor graph. With `partitioned`, check block
    /// `i` must partition the vertex set; otherwise every vertex must simply
    /// have degree `d`.
    pub fn from_checks(n: usize, d: usize, k: usize, checks: Vec<Vec<u32>>, partitioned: bool) -> Result<Self> {
        check_model_params(n, d, k)?;
        let m = n / k;
        if checks.len() != d * m {
            return Err(Error::invalid(format!("expected {} checks, got {}", d * m, checks.len())));
        }
        let mut vertex_checks = vec![Vec::with_capacity(d); n];
        for (e, c) in checks.iter().enumerate() {
            if c.len() != k {
                return Err(Error::invalid(format!("check {e} has {} vertices, expected {k}", c.len())));
            }
            for (a, &v) in c.iter().enumerate() {
                if v as usize >= n {
                    return Err(Error::invalid(format!("check {e} names vertex {v} >= n")));
                }
                if c[..a].contains(&v) {
                    return Err(Error::invalid(format!("check {e} repeats vertex {v}")));
                }
                vertex_checks[v as usize].push(e as u32);
            }
        }
        for (v, list) in vertex_checks.iter().enumerate() {
            if list.len() != d {
                return Err(Error::invalid(format!("vertex {v} has degree {} != {d}", list.len())));
            }
            if partitioned && list.iter().enumerate().any(|(i, &e)| e as usize / m != i) {
                return Err(Error::invalid(format!("vertex {v} is not covered once by every part")));
            }
        }
        Ok(FactorGraph { n, d, k, checks, partitioned, vertex_checks })
    }

    /// Labels the orbits of each `σ_i` by `E_i` through a uniformly random
    /// bijection.
    pub fn from_homomorphism<R: Rng + ?Sized>(sigma: &UniformHomomorphism, rng: &mut R) -> Self {
        let (n, d, k) = (sigma.n, sigma.d, sigma.k);
        let mut checks = Vec::with_capacity(d * n / k);
        for i in 0..d {
            let mut seen = vec![false; n];
            let mut orbits = Vec::with_capacity(n / k);
            for v in 0..n {
                if !seen[v] {
                    let orbit = sigma.orbit(i, v);
                    for &u in &orbit {
                        seen[u] = true;
                    }
                    orbits.push(orbit.into_iter().map(|u| u as u32).collect::<Vec<_>>());
                }
            }
            orbits.shuffle(rng);
            checks.extend(orbits);
        }
        FactorGraph::from_checks(n, d, k, checks, true).expect("orbits of a uniform homomorphism form a factor graph")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// |E_i| = n/k.
    pub fn part_size(&self) -> usize {
        self.n / self.k
    }

    pub fn num_checks(&self) -> usize {
        self.checks.len()
    }

    pub fn is_partitioned(&self) -> bool {
        self.partitioned
    }

    pub fn checks(&self) -> &[Vec<u32>] {
        &self.checks
    }

    pub fn check(&self, e: usize) -> &[u32] {
        &self.checks[e]
    }

    /// Part index of check `e` (meaningful for partitioned graphs).
    pub fn part_of(&self, e: usize) -> usize {
        e / self.part_size()
    }

    /// Global check indices of part `E_i`.
    pub fn part_range(&self, i: usize) -> std::ops::Range<usize> {
        i * self.part_size()..(i + 1) * self.part_size()
    }

    /// Checks incident to vertex `v` (for partitioned graphs, the `i`-th entry
    /// lies in `E_i`).
    pub fn vertex_checks(&self, v: usize) -> &[u32] {
        &self.vertex_checks[v]
    }

    /// Reads σ back from the cyclic order of each check tuple.
    pub fn to_homomorphism(&self) -> Result<UniformHomomorphism> {
        if !self.partitioned {
            return Err(Error::invalid("an unpartitioned factor graph does not determine a homomorphism"));
        }
        let mut perms = vec![vec![0u32; self.n]; self.d];
        for (e, c) in self.checks.iter().enumerate() {
            let p = &mut perms[self.part_of(e)];
            for j in 0..self.k {
                p[c[j] as usize] = c[(j + 1) % self.k];
            }
        }
        UniformHomomorphism::new(self.n, self.d, self.k, perms)
    }

    /// The (dn/k) × n parity-check matrix; row `e` is the indicator of check `e`.
    pub fn parity_check_matrix(&self) -> BitMatrix {
        let rows: Vec<BitVec> = self
            .checks
            .iter()
            .map(|c| BitVec::from_indices(self.n, c.iter().map(|&v| v as usize)))
            .collect();
        BitMatrix::from_rows(self.n, &rows)
    }

    /// The partial factor graph `H ∩ (F × V)`.
    pub fn restrict(&self, checks: &[usize]) -> Result<PartialFactorGraph> {
        let fixed = checks.iter().map(|&e| (e, self.checks[e].clone())).collect();
        PartialFactorGraph::new(self.n, self.d, self.k, fixed)
    }

    pub fn to_json(&self) -> FactorGraphJson {
        let m = self.part_size();
        FactorGraphJson {
            n: self.n,
            d: self.d,
            k: self.k,
            partitioned: self.partitioned,
            checks: self.checks.chunks(m).map(|c| c.to_vec()).collect(),
        }
    }

    pub fn from_json(j: FactorGraphJson) -> Result<Self> {
        if j.checks.len() != j.d {
            return Err(Error::invalid(format!("expected {} check groups, got {}", j.d, j.checks.len())));
        }
        let checks = j.checks.into_iter().flatten().collect();
        FactorGraph::from_checks(j.n, j.d, j.k, checks, j.partitioned)
    }
}

/// Serialized form of a [`FactorGraph`]: checks grouped by part.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorGraphJson {
    pub n: usize,
    pub d: usize,
    pub k: usize,
    #[serde(default = "default_true")]
    pub partitioned: bool,
    pub checks: Vec<Vec<Vec<u32>>>,
}

fn default_true() -> bool {
    true
}

/// A subset `F ⊆ E` of check nodes together with their vertex tuples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialFactorGraph {
    n: usize,
    d: usize,
    k: usize,
    fixed: Vec<(usize, Vec<u32>)>,
}

impl PartialFactorGraph {
    pub fn new(n: usize, d: usize, k: usize, mut fixed: Vec<(usize, Vec<u32>)>) -> Result<Self> {
        check_model_params(n, d, k)?;
        let m = n / k;
        fixed.sort_by_key(|(e, _)| *e);
        let mut covered = vec![vec![false; n]; d];
        for (t, (e, tuple)) in fixed.iter().enumerate() {
            if *e >= d * m {
                return Err(Error::invalid(format!("check index {e} out of range")));
            }
            if t > 0 && fixed[t - 1].0 == *e {
                return Err(Error::invalid(format!("check {e} listed twice")));
            }
            if tuple.len() != k {
                return Err(Error::invalid(format!("check {e} has {} vertices, expected {k}", tuple.len())));
            }
            for &v in tuple {
                let slot = covered[e / m].get_mut(v as usize).ok_or_else(|| Error::invalid("vertex out of range"))?;
                if *slot {
                    return Err(Error::invalid(format!("vertex {v} meets part {} twice", e / m)));
                }
                *slot = true;
            }
        }
        Ok(PartialFactorGraph { n, d, k, fixed })
    }

    pub fn empty(n: usize, d: usize, k: usize) -> Result<Self> {
        Self::new(n, d, k, Vec::new())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Fixed checks as `(global check index, vertex tuple)`, sorted by index.
    pub fn fixed(&self) -> &[(usize, Vec<u32>)] {
        &self.fixed
    }

    pub fn check_indices(&self) -> Vec<usize> {
        self.fixed.iter().map(|(e, _)| *e).collect()
    }

    /// Vert(M; F_i) as a sorted list.
    pub fn part_vertices(&self, i: usize) -> Vec<usize> {
        let m = self.n / self.k;
        let mut out: Vec<usize> = self
            .fixed
            .iter()
            .filter(|(e, _)| e / m == i)
            .flat_map(|(_, c)| c.iter().map(|&v| v as usize))
            .collect();
        out.sort_unstable();
        out
    }

    /// W = Vert(M; F) as a sorted list.
    pub fn vertices(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self.fixed.iter().flat_map(|(_, c)| c.iter().map(|&v| v as usize)).collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// Cuts a uniformly shuffled vertex list into consecutive k-blocks.
fn shuffled_blocks<R: Rng + ?Sized>(mut vertices: Vec<u32>, k: usize, rng: &mut R) -> Vec<Vec<u32>> {
    vertices.shuffle(rng);
    vertices.chunks(k).map(|c| c.to_vec()).collect()
}

/// Draws `(σ, H)` from the permutation model: each `σ_i` is uniform among
/// permutations of cycle type `[k^{n/k}]` and its orbits are labelled by
/// `E_i` through a uniform bijection.
pub fn sample_permutation_model<R: Rng + ?Sized>(
    n: usize,
    d: usize,
    k: usize,
    rng: &mut R,
) -> Result<(UniformHomomorphism, FactorGraph)> {
    check_model_params(n, d, k)?;
    let mut checks = Vec::with_capacity(d * n / k);
    for _ in 0..d {
        checks.extend(shuffled_blocks((0..n as u32).collect(), k, rng));
    }
    let graph = FactorGraph::from_checks(n, d, k, checks, true)?;
    let sigma = graph.to_homomorphism()?;
    Ok((sigma, graph))
}

/// Uniform simple k-row, d-column regular factor graph by stub matching,
/// rejecting matchings that put a vertex twice into one check.
pub fn sample_uniform_model<R: Rng + ?Sized>(
    n: usize,
    d: usize,
    k: usize,
    max_retries: usize,
    rng: &mut R,
) -> Result<FactorGraph> {
    check_model_params(n, d, k)?;
    let stubs: Vec<u32> = (0..n as u32).flat_map(|v| std::iter::repeat(v).take(d)).collect();
    for _ in 0..max_retries.max(1) {
        let blocks = shuffled_blocks(stubs.clone(), k, rng);
        let simple = blocks.iter().all(|b| (1..b.len()).all(|a| !b[..a].contains(&b[a])));
        if simple {
            return FactorGraph::from_checks(n, d, k, blocks, false);
        }
    }
    Err(Error::resource(format!("no simple factor graph found in {max_retries} stub matchings")))
}

/// Draws `(σ, H)` conditioned on `H ∩ (F × V) = M`: for every part the
/// vertices outside `Vert(M; F_i)` are split by a uniform labelled partition
/// into k-sets, each with a uniform cyclic order.
pub fn sample_conditioned<R: Rng + ?Sized>(
    partial: &PartialFactorGraph,
    rng: &mut R,
) -> Result<(UniformHomomorphism, FactorGraph)> {
    let (n, d, k) = (partial.n, partial.d, partial.k);
    let m = n / k;
    let mut checks: Vec<Option<Vec<u32>>> = vec![None; d * m];
    for (e, tuple) in &partial.fixed {
        checks[*e] = Some(tuple.clone());
    }
    for i in 0..d {
        let used = partial.part_vertices(i);
        let mut is_used = vec![false; n];
        for &v in &used {
            is_used[v] = true;
        }
        let free: Vec<u32> = (0..n as u32).filter(|&v| !is_used[v as usize]).collect();
        if free.len() % k != 0 {
            return Err(Error::invalid(format!("part {i}: {} uncovered vertices not divisible by k", free.len())));
        }
        let mut blocks = shuffled_blocks(free, k, rng).into_iter();
        for slot in &mut checks[i * m..(i + 1) * m] {
            if slot.is_none() {
                *slot = blocks.next();
            }
        }
    }
    let checks = checks.into_iter().map(|c| c.expect("every label filled")).collect();
    let graph = FactorGraph::from_checks(n, d, k, checks, true)?;
    let sigma = graph.to_homomorphism()?;
    Ok((sigma, graph))
}

/// GF(2) parity-check matrix of `graph`.
pub fn parity_check_matrix(graph: &FactorGraph) -> BitMatrix {
    graph.parity_check_matrix()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use std::collections::HashMap;

    #[test]
    fn rejects_bad_sizes() {
        let mut rng = seeded(0);
        assert!(sample_permutation_model(10, 3, 4, &mut rng).is_err());
        assert!(sample_permutation_model(2, 3, 4, &mut rng).is_err());
        assert!(sample_uniform_model(10, 3, 4, 10, &mut rng).is_err());
    }

    #[test]
    fn generators_have_order_k() {
        let mut rng = seeded(1);
        let (sigma, graph) = sample_permutation_model(24, 3, 4, &mut rng).unwrap();
        for i in 0..3 {
            for v in 0..24 {
                assert_eq!(sigma.apply_power(i, 4, v), v);
                assert_ne!(sigma.apply(i, v), v);
            }
        }
        assert_eq!(graph.to_homomorphism().unwrap(), sigma);
    }

    #[test]
    fn parity_check_matrix_weights() {
        let mut rng = seeded(2);
        let (_, graph) = sample_permutation_model(36, 3, 6, &mut rng).unwrap();
        let h = graph.parity_check_matrix();
        assert_eq!((h.rows(), h.cols()), (18, 36));
        assert!((0..h.rows()).all(|e| h.row_weight(e) == 6));
        assert!((0..h.cols()).all(|v| h.col_weight(v) == 3));
        for i in 0..3 {
            let mut sum = BitVec::zeros(36);
            for e in graph.part_range(i) {
                sum.xor_assign(&h.row_vec(e));
            }
            assert_eq!(sum, BitVec::ones(36));
        }
        assert!(h.rank() <= 18 - 2);
    }

    #[test]
    fn homomorphism_validation() {
        assert!(UniformHomomorphism::new(4, 1, 2, vec![vec![1, 0, 3, 2]]).is_ok());
        assert!(UniformHomomorphism::new(4, 1, 2, vec![vec![0, 1, 3, 2]]).is_err());
        assert!(UniformHomomorphism::new(4, 1, 4, vec![vec![1, 0, 3, 2]]).is_err());
        assert!(UniformHomomorphism::new(4, 1, 2, vec![vec![1, 1, 3, 2]]).is_err());
    }

    #[test]
    fn act_and_pullback_are_inverse() {
        let mut rng = seeded(3);
        let (sigma, _) = sample_permutation_model(60, 3, 4, &mut rng).unwrap();
        for g in crate::group::enumerate_ball(3, 4, 2).unwrap() {
            for v in [0, 17, 59] {
                assert_eq!(sigma.act(&g, sigma.pullback_coordinate(&g, v)), v);
                assert_eq!(sigma.pullback_coordinate(&g, v), sigma.act(&g.inverse(4), v));
            }
        }
    }

    #[test]
    fn uniform_model_degrees() {
        let mut rng = seeded(4);
        let g = sample_uniform_model(120, 3, 4, DEFAULT_UNIFORM_RETRIES, &mut rng).unwrap();
        assert!(!g.is_partitioned());
        let h = g.parity_check_matrix();
        assert!((0..h.rows()).all(|e| h.row_weight(e) == 4));
        assert!((0..h.cols()).all(|v| h.col_weight(v) == 3));
        assert!(g.to_homomorphism().is_err());
    }

    #[test]
    fn uniform_model_minimal_size() {
        let mut rng = seeded(5);
        for _ in 0..20 {
            let g = sample_uniform_model(12, 3, 4, DEFAULT_UNIFORM_RETRIES, &mut rng).unwrap();
            assert_eq!(g.num_checks(), 9);
        }
    }

    #[test]
    fn conditioned_on_everything_returns_the_graph() {
        let mut rng = seeded(6);
        let (_, graph) = sample_permutation_model(24, 3, 4, &mut rng).unwrap();
        let all: Vec<usize> = (0..graph.num_checks()).collect();
        let m = graph.restrict(&all).unwrap();
        let (_, again) = sample_conditioned(&m, &mut rng).unwrap();
        assert_eq!(again, graph);
    }

    #[test]
    fn conditioned_keeps_fixed_checks() {
        let mut rng = seeded(7);
        let (_, graph) = sample_permutation_model(48, 3, 4, &mut rng).unwrap();
        let m = graph.restrict(&[0, 5, 13, 30]).unwrap();
        for _ in 0..10 {
            let (_, h) = sample_conditioned(&m, &mut rng).unwrap();
            for (e, tuple) in m.fixed() {
                assert_eq!(h.check(*e), tuple.as_slice());
            }
        }
    }

    #[test]
    fn partial_graph_validation() {
        assert!(PartialFactorGraph::new(8, 2, 4, vec![(0, vec![0, 1, 2, 3]), (1, vec![3, 4, 5, 6])]).is_err());
        assert!(PartialFactorGraph::new(8, 2, 4, vec![(0, vec![0, 1, 2, 3]), (2, vec![3, 4, 5, 6])]).is_ok());
        assert!(PartialFactorGraph::new(8, 2, 4, vec![(9, vec![0, 1, 2, 3])]).is_err());
        assert!(PartialFactorGraph::new(8, 2, 4, vec![(0, vec![0, 1, 2])]).is_err());
    }

    /// With one check of E_1 fixed at n=6, k=3, the rest of E_1 is forced up
    /// to its cyclic order: two completions, each with frequency 1/2.
    #[test]
    fn conditioned_completion_of_one_part() {
        let m = PartialFactorGraph::new(6, 2, 3, vec![(0, vec![0, 1, 2])]).unwrap();
        let mut rng = seeded(8);
        let mut freq: HashMap<Vec<u32>, usize> = HashMap::new();
        let draws = 20_000;
        for _ in 0..draws {
            let (sigma, h) = sample_conditioned(&m, &mut rng).unwrap();
            let mut block = h.check(1).to_vec();
            let rot = block.iter().position(|&v| v == 3).unwrap();
            block.rotate_left(rot);
            *freq.entry(block).or_default() += 1;
            assert_eq!(sigma.orbit(0, 0), vec![0, 1, 2]);
        }
        assert_eq!(freq.len(), 2);
        for &c in freq.values() {
            // 5 binomial sigmas around draws/2
            assert!((c as f64 - draws as f64 / 2.0).abs() < 5.0 * (draws as f64 * 0.25).sqrt());
        }
    }

    #[test]
    fn json_roundtrip_and_grouping() {
        let mut rng = seeded(9);
        let (_, graph) = sample_permutation_model(12, 3, 4, &mut rng).unwrap();
        let j = graph.to_json();
        assert_eq!(j.checks.len(), 3);
        assert!(j.checks.iter().all(|part| part.len() == 3));
        let text = serde_json::to_string(&j).unwrap();
        let back = FactorGraph::from_json(serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back, graph);
    }
}
