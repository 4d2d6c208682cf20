use crate::entropy::info::shannon_entropy;
use crate::error::{Error, Result};
use crate::factor_graph::UniformHomomorphism;
use crate::gf2::BitVec;

/// Tolerance for the consistency condition between edge and vertex weights.
pub const CONSISTENCY_TOL: f64 = 1e-9;

/// Index of a k-tuple `a` over an alphabet of size `q`: `Σ_j a(j) q^j`.
pub fn tuple_index(a: &[usize], q: usize) -> usize {
    a.iter().rev().fold(0, |acc, &x| acc * q + x)
}

/// Inverse of [`tuple_index`].
pub fn tuple_from_index(mut idx: usize, k: usize, q: usize) -> Vec<usize> {
    (0..k)
        .map(|_| {
            let x = idx % q;
            idx /= q;
            x
        })
        .collect()
}

/// Cyclic shift `(a(1), ..., a(k-1), a(0))` on tuple indices.
pub fn rotate_index(idx: usize, k: usize, q: usize) -> usize {
    let mut a = tuple_from_index(idx, k, q);
    a.rotate_left(1);
    tuple_index(&a, q)
}

/// A hyper-edge weight: one distribution on `A^{Z_k}` per part plus a
/// vertex distribution on `A`.
#[derive(Clone, Debug, PartialEq)]
pub struct HyperedgeWeight {
    d: usize,
    k: usize,
    alphabet: usize,
    edge_weights: Vec<Vec<f64>>,
    vertex_weight: Vec<f64>,
}

impl HyperedgeWeight {
    /// Validates normalization and the consistency condition
    /// `Σ_{a : a(j) = b} W(a; i) = W(b)` for every `i`, `j`, `b`.
    pub fn new(d: usize, k: usize, alphabet: usize, edge_weights: Vec<Vec<f64>>, vertex_weight: Vec<f64>) -> Result<Self> {
        if d == 0 || k == 0 || alphabet == 0 {
            return Err(Error::invalid("d, k and the alphabet size must be positive"));
        }
        let size = alphabet
            .checked_pow(k as u32)
            .filter(|&s| s <= 1 << 26)
            .ok_or_else(|| Error::resource("edge weight table too large"))?;
        if edge_weights.len() != d {
            return Err(Error::LengthMismatch { left: d, right: edge_weights.len() });
        }
        if vertex_weight.len() != alphabet {
            return Err(Error::LengthMismatch { left: alphabet, right: vertex_weight.len() });
        }
        shannon_entropy(&vertex_weight)?;
        for w in &edge_weights {
            if w.len() != size {
                return Err(Error::LengthMismatch { left: size, right: w.len() });
            }
            shannon_entropy(w)?;
        }
        let weight = HyperedgeWeight { d, k, alphabet, edge_weights, vertex_weight };
        weight.check_consistency()?;
        Ok(weight)
    }

    fn check_consistency(&self) -> Result<()> {
        for (i, w) in self.edge_weights.iter().enumerate() {
            for j in 0..self.k {
                let m = self.position_marginal(w, j);
                for (b, (&x, &y)) in m.iter().zip(&self.vertex_weight).enumerate() {
                    if (x - y).abs() > CONSISTENCY_TOL {
                        return Err(Error::InconsistentWeight(format!(
                            "part {i}, position {j}, symbol {b}: edge marginal {x} != vertex weight {y}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    fn position_marginal(&self, w: &[f64], j: usize) -> Vec<f64> {
        let mut m = vec![0.0; self.alphabet];
        let stride = self.alphabet.pow(j as u32);
        for (idx, &p) in w.iter().enumerate() {
            m[(idx / stride) % self.alphabet] += p;
        }
        m
    }

    /// Binary weight with vertex weight uniform and every part uniform on
    /// even-parity k-tuples.
    pub fn haar(d: usize, k: usize) -> Result<Self> {
        let size = 1usize << k;
        let p = 1.0 / (size / 2) as f64;
        let w: Vec<f64> = (0..size).map(|a| if a.count_ones() % 2 == 0 { p } else { 0.0 }).collect();
        HyperedgeWeight::new(d, k, 2, vec![w; d], vec![0.5, 0.5])
    }

    /// The i.i.d. weight `W(a; i) = ∏_j p(a(j))`.
    pub fn product(d: usize, k: usize, p: &[f64]) -> Result<Self> {
        let q = p.len();
        let size = q.checked_pow(k as u32).ok_or_else(|| Error::resource("edge weight table too large"))?;
        let w: Vec<f64> = (0..size).map(|idx| tuple_from_index(idx, k, q).iter().map(|&a| p[a]).product()).collect();
        HyperedgeWeight::new(d, k, q, vec![w; d], p.to_vec())
    }

    /// Point mass at the constant tuple `(b, ..., b)`.
    pub fn point_mass(d: usize, k: usize, alphabet: usize, b: usize) -> Result<Self> {
        if b >= alphabet {
            return Err(Error::invalid("symbol outside the alphabet"));
        }
        let mut w = vec![0.0; alphabet.pow(k as u32)];
        w[tuple_index(&vec![b; k], alphabet)] = 1.0;
        let mut v = vec![0.0; alphabet];
        v[b] = 1.0;
        HyperedgeWeight::new(d, k, alphabet, vec![w; d], v)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    /// W(·; i), indexed by [`tuple_index`].
    pub fn edge_weight(&self, i: usize) -> &[f64] {
        &self.edge_weights[i]
    }

    /// W(·).
    pub fn vertex_weight(&self) -> &[f64] {
        &self.vertex_weight
    }

    pub fn is_cyclically_invariant(&self, tol: f64) -> bool {
        self.edge_weights.iter().all(|w| {
            (0..w.len()).all(|idx| (w[idx] - w[rotate_index(idx, self.k, self.alphabet)]).abs() <= tol)
        })
    }

    /// Whether every part vanishes off the even-parity tuples (binary only).
    pub fn is_even_parity_supported(&self, tol: f64) -> bool {
        self.alphabet == 2
            && self
                .edge_weights
                .iter()
                .all(|w| w.iter().enumerate().all(|(a, &p)| (a as u64).count_ones() % 2 == 0 || p.abs() <= tol))
    }
}

/// H_K(W) = (1-d) H(W(·)) + (1/k) Σ_i H(W(·; i)), in nats.
pub fn kikuchi_entropy(w: &HyperedgeWeight) -> Result<f64> {
    w.check_consistency()?;
    let vertex = shannon_entropy(&w.vertex_weight)?;
    let mut edges = 0.0;
    for e in &w.edge_weights {
        edges += shannon_entropy(e)?;
    }
    Ok((1.0 - w.d as f64) * vertex + edges / w.k as f64)
}

/// The weight W_{x,σ}: part `i` is the empirical law over `v` of
/// `(x(v), x(σ_i v), ..., x(σ_i^{k-1} v))`.
pub fn empirical_weight(x: &BitVec, sigma: &UniformHomomorphism) -> Result<HyperedgeWeight> {
    let (n, d, k) = (sigma.n(), sigma.d(), sigma.k());
    if x.len() != n {
        return Err(Error::LengthMismatch { left: n, right: x.len() });
    }
    let counts = empirical_counts(x, sigma);
    let scale = 1.0 / n as f64;
    let ones = x.weight() as f64 * scale;
    let edges = counts.iter().map(|c| c.iter().map(|&m| m as f64 * scale).collect()).collect();
    let w = HyperedgeWeight { d, k, alphabet: 2, edge_weights: edges, vertex_weight: vec![1.0 - ones, ones] };
    Ok(w)
}

/// Per part, the number of vertices `v` whose orbit reads each binary k-tuple.
pub(crate) fn empirical_counts(x: &BitVec, sigma: &UniformHomomorphism) -> Vec<Vec<u64>> {
    let (n, d, k) = (sigma.n(), sigma.d(), sigma.k());
    let mut counts = vec![vec![0u64; 1 << k]; d];
    for (i, c) in counts.iter_mut().enumerate() {
        let image = sigma.generator_image(i);
        for v in 0..n {
            let mut idx = 0usize;
            let mut u = v;
            for j in 0..k {
                if x.get(u) {
                    idx |= 1 << j;
                }
                u = image[u] as usize;
            }
            c[idx] += 1;
        }
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::info::binary_entropy;
    use crate::factor_graph::sample_permutation_model;
    use crate::rng::seeded;
    use std::f64::consts::LN_2;

    #[test]
    fn tuple_indexing_roundtrip() {
        for idx in 0..81 {
            assert_eq!(tuple_index(&tuple_from_index(idx, 4, 3), 3), idx);
        }
        assert_eq!(tuple_index(&[1, 0, 0], 2), 1);
        assert_eq!(rotate_index(1, 3, 2), 4);
    }

    #[test]
    fn haar_kikuchi_value() {
        let w = HyperedgeWeight::haar(3, 4).unwrap();
        assert!((kikuchi_entropy(&w).unwrap() - 0.25 * LN_2).abs() < 1e-12);
        assert!(w.is_cyclically_invariant(0.0));
        assert!(w.is_even_parity_supported(0.0));
    }

    #[test]
    fn point_mass_has_zero_entropy() {
        for b in 0..2 {
            let w = HyperedgeWeight::point_mass(3, 4, 2, b).unwrap();
            assert_eq!(kikuchi_entropy(&w).unwrap(), 0.0);
        }
    }

    #[test]
    fn product_weight_reduction() {
        let (d, k) = (3usize, 4usize);
        let w = HyperedgeWeight::product(d, k, &[0.7, 0.3]).unwrap();
        let expected = (1.0 - d as f64 + d as f64) * binary_entropy(0.3);
        assert!((kikuchi_entropy(&w).unwrap() - expected).abs() < 1e-12);
        assert!(!w.is_even_parity_supported(1e-12));
    }

    #[test]
    fn inconsistent_weight_rejected() {
        let w = vec![0.5, 0.0, 0.0, 0.5];
        let r = HyperedgeWeight::new(1, 2, 2, vec![w], vec![0.3, 0.7]);
        assert!(matches!(r, Err(Error::InconsistentWeight(_))));
        let skew = vec![0.5, 0.5, 0.0, 0.0];
        assert!(HyperedgeWeight::new(1, 2, 2, vec![skew], vec![0.5, 0.5]).is_err());
    }

    #[test]
    fn empirical_weight_of_constants_and_codewords() {
        let mut rng = seeded(11);
        let (sigma, graph) = sample_permutation_model(48, 3, 4, &mut rng).unwrap();
        let zero = empirical_weight(&BitVec::zeros(48), &sigma).unwrap();
        assert_eq!(zero, HyperedgeWeight::point_mass(3, 4, 2, 0).unwrap());
        let ones = empirical_weight(&BitVec::ones(48), &sigma).unwrap();
        assert_eq!(ones, HyperedgeWeight::point_mass(3, 4, 2, 1).unwrap());
        let code = graph.parity_check_matrix().kernel_basis();
        for _ in 0..20 {
            let x = code.uniform_codeword(&mut rng);
            let w = empirical_weight(&x, &sigma).unwrap();
            assert!(w.is_even_parity_supported(0.0));
            assert!(w.is_cyclically_invariant(1e-12));
            assert!(kikuchi_entropy(&w).unwrap().is_finite());
        }
    }
}
