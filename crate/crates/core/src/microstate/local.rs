use std::f64::consts::LN_2;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entropy::weight::empirical_counts;
use crate::error::{Error, Result};
use crate::factor_graph::{vert_neighborhood, FactorGraph, NodeSet, UniformHomomorphism};
use crate::gf2::{BitMatrix, LinearCode};
use crate::group::{BallCode, GroupWord};

/// Pullback coordinates `σ(g⁻¹) v` for `g` in `ball`, in ball order.
fn pullback_coords(sigma: &UniformHomomorphism, v: usize, ball: &[GroupWord]) -> Vec<usize> {
    ball.iter().map(|g| sigma.pullback_coordinate(g, v)).collect()
}

/// The projection of `code` onto the pullback coordinates of `v`, aligned
/// with the order of `ball`. Repeated coordinates give tied positions.
pub fn localized_marginal(sigma: &UniformHomomorphism, code: &LinearCode, v: usize, ball: &[GroupWord]) -> LinearCode {
    code.project(&pullback_coords(sigma, v, ball))
}

/// Caches the coordinate matrix of a code so that projection dimensions
/// are ranks of row subsets.
#[derive(Clone, Debug)]
pub struct LocalProjector {
    coords: BitMatrix,
}

impl LocalProjector {
    pub fn new(code: &LinearCode) -> Self {
        LocalProjector { coords: code.coordinate_matrix() }
    }

    pub fn projection_dim(&self, coords: &[usize]) -> usize {
        self.coords.select_rows(coords).rank()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProperReport {
    pub n: usize,
    pub radius: usize,
    pub ball_dimension: usize,
    pub proper: usize,
    /// Vertices whose orbit map is injective on the ball.
    pub injective: usize,
    pub fraction: f64,
}

/// Fraction of `r`-proper vertices: those whose localized marginal equals
/// the ball code. With an injective orbit map the marginal is contained in
/// the ball code, so equal dimension suffices; otherwise the two subspaces
/// are compared directly.
pub fn proper_fraction(sigma: &UniformHomomorphism, code: &LinearCode, ball: &BallCode) -> Result<ProperReport> {
    if ball.d() != sigma.d() || ball.k() != sigma.k() {
        return Err(Error::invalid("ball code and homomorphism disagree on (d, k)"));
    }
    if code.len() != sigma.n() {
        return Err(Error::LengthMismatch { left: sigma.n(), right: code.len() });
    }
    let projector = LocalProjector::new(code);
    let ball_code = ball.code();
    let words = ball.vertices();
    let (proper, injective) = (0..sigma.n())
        .into_par_iter()
        .map(|v| {
            let coords = pullback_coords(sigma, v, words);
            let mut sorted = coords.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() == coords.len() {
                ((projector.projection_dim(&coords) == ball.dimension()) as usize, 1)
            } else {
                ((code.project(&coords) == ball_code) as usize, 0)
            }
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    Ok(ProperReport {
        n: sigma.n(),
        radius: ball.radius(),
        ball_dimension: ball.dimension(),
        proper,
        injective,
        fraction: proper as f64 / sigma.n() as f64,
    })
}

/// `log 2 · dim` of the projection of `code` onto `Vert_r(S)`; zero for
/// empty `S`.
pub fn property_m_entropy(graph: &FactorGraph, code: &LinearCode, s: &[usize], r: usize) -> Result<f64> {
    if s.is_empty() {
        return Ok(0.0);
    }
    let coords = vert_neighborhood(graph, &NodeSet::Vertices(s.to_vec()), r)?;
    Ok(LN_2 * code.projection_dim(&coords) as f64)
}

/// Per part, the total variation distance between the hyper-edge marginal
/// averaged over `samples` uniform codewords and the uniform law on
/// even-parity k-tuples.
pub fn edge_marginal_tv<R: Rng + ?Sized>(
    sigma: &UniformHomomorphism,
    code: &LinearCode,
    samples: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    if samples == 0 {
        return Err(Error::invalid("need at least one codeword sample"));
    }
    let k = sigma.k();
    let mut totals = vec![vec![0u64; 1 << k]; sigma.d()];
    for _ in 0..samples {
        let x = code.uniform_codeword(rng);
        for (t, c) in totals.iter_mut().zip(empirical_counts(&x, sigma)) {
            t.iter_mut().zip(c).for_each(|(a, b)| *a += b);
        }
    }
    let mass = (samples * sigma.n()) as f64;
    let haar = 1.0 / (1u64 << (k - 1)) as f64;
    Ok(totals
        .iter()
        .map(|t| {
            0.5 * t
                .iter()
                .enumerate()
                .map(|(a, &c)| {
                    let q = if a.count_ones() % 2 == 0 { haar } else { 0.0 };
                    (c as f64 / mass - q).abs()
                })
                .sum::<f64>()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factor_graph::{greedy_separated_set, sample_permutation_model, FactorGraph};
    use crate::rng::seeded;

    #[test]
    fn radius_zero_marginal() {
        let mut rng = seeded(31);
        let (sigma, graph) = sample_permutation_model(40, 3, 4, &mut rng).unwrap();
        let code = graph.parity_check_matrix().kernel_basis();
        let ball = BallCode::new(3, 4, 0).unwrap();
        for v in 0..40 {
            let m = localized_marginal(&sigma, &code, v, ball.vertices());
            let forced = code.basis().iter().all(|b| !b.get(v));
            assert_eq!(m.dimension(), if forced { 0 } else { 1 });
        }
    }

    #[test]
    fn injective_marginals_sit_inside_ball_code() {
        let mut rng = seeded(32);
        let (sigma, graph) = sample_permutation_model(600, 3, 4, &mut rng).unwrap();
        let code = graph.parity_check_matrix().kernel_basis();
        let ball = BallCode::new(3, 4, 1).unwrap();
        let ball_code = ball.code();
        for v in 0..100 {
            if crate::factor_graph::orbit_map_injective(&sigma, v, ball.vertices()) {
                let m = localized_marginal(&sigma, &code, v, ball.vertices());
                assert!(m.is_subspace_of(&ball_code));
            }
        }
    }

    #[test]
    fn radius_zero_properness_is_unforced_bits() {
        let checks = vec![
            vec![0, 1, 2, 3],
            vec![4, 5, 6, 7],
            vec![8, 9, 10, 11],
            vec![0, 4, 5, 6],
            vec![1, 2, 8, 9],
            vec![3, 7, 10, 11],
            vec![0, 7, 8, 9],
            vec![1, 4, 10, 11],
            vec![2, 3, 5, 6],
        ];
        let graph = FactorGraph::from_checks(12, 3, 4, checks, true).unwrap();
        let sigma = graph.to_homomorphism().unwrap();
        let code = graph.parity_check_matrix().kernel_basis();
        let ball = BallCode::new(3, 4, 0).unwrap();
        let report = proper_fraction(&sigma, &code, &ball).unwrap();
        let unforced = (0..12).filter(|&v| code.basis().iter().any(|b| b.get(v))).count();
        assert_eq!(report.ball_dimension, 1);
        assert_eq!(report.injective, 12);
        assert_eq!(report.proper, unforced);
    }

    #[test]
    fn short_cycle_makes_vertex_improper() {
        // σ_0 = σ_1 on the first block: vertex 0 sees the same check twice.
        let checks = vec![
            vec![0, 1, 2, 3],
            vec![4, 5, 6, 7],
            vec![0, 1, 2, 3],
            vec![4, 5, 6, 7],
        ];
        let graph = FactorGraph::from_checks(8, 2, 4, checks, true).unwrap();
        let sigma = graph.to_homomorphism().unwrap();
        let code = graph.parity_check_matrix().kernel_basis();
        let ball = BallCode::new(2, 4, 1).unwrap();
        let report = proper_fraction(&sigma, &code, &ball).unwrap();
        assert_eq!(report.proper, 0);
        assert_eq!(report.injective, 0);
        let local = localized_marginal(&sigma, &code, 0, ball.vertices());
        assert!(local.dimension() + 1 <= ball.dimension());
    }

    #[test]
    fn property_m_single_vertex_and_empty() {
        let mut rng = seeded(33);
        let (sigma, graph) = sample_permutation_model(3000, 3, 4, &mut rng).unwrap();
        let code = graph.parity_check_matrix().kernel_basis();
        assert_eq!(property_m_entropy(&graph, &code, &[], 1).unwrap(), 0.0);
        let ball = BallCode::new(3, 4, 1).unwrap();
        let order: Vec<usize> = (0..3000).collect();
        let v = greedy_separated_set(&sigma, 2, &order, Some(1))[0];
        if crate::factor_graph::orbit_map_injective(&sigma, v, ball.vertices()) {
            let h = property_m_entropy(&graph, &code, &[v], 1).unwrap();
            let local = localized_marginal(&sigma, &code, v, ball.vertices());
            assert!((h - LN_2 * local.dimension() as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn edge_tv_is_small_for_large_n() {
        let mut rng = seeded(34);
        let (sigma, graph) = sample_permutation_model(3000, 3, 4, &mut rng).unwrap();
        let code = graph.parity_check_matrix().kernel_basis();
        let tv = edge_marginal_tv(&sigma, &code, 16, &mut rng).unwrap();
        assert_eq!(tv.len(), 3);
        assert!(tv.iter().all(|&x| x < 0.03), "{tv:?}");
    }
}
