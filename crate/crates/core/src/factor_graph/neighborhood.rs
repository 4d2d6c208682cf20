use std::collections::VecDeque;

use super::{FactorGraph, UniformHomomorphism};
use crate::error::{Error, Result};
use crate::group::GroupWord;

/// Seed set of a neighborhood query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NodeSet {
    Vertices(Vec<usize>),
    Checks(Vec<usize>),
}

/// Graph distance with a sentinel for "farther than the search radius".
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Distance {
    Within(usize),
    Beyond,
}

fn mask_to_list(mask: &[bool]) -> Vec<usize> {
    mask.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect()
}

fn vert_of_checks(h: &FactorGraph, checks: &[bool]) -> Vec<bool> {
    let mut out = vec![false; h.n()];
    for (e, _) in checks.iter().enumerate().filter(|(_, &b)| b) {
        for &v in h.check(e) {
            out[v as usize] = true;
        }
    }
    out
}

fn checks_of_verts(h: &FactorGraph, verts: &[bool]) -> Vec<bool> {
    let mut out = vec![false; h.num_checks()];
    for (v, _) in verts.iter().enumerate().filter(|(_, &b)| b) {
        for &e in h.vertex_checks(v) {
            out[e as usize] = true;
        }
    }
    out
}

fn seed_masks(h: &FactorGraph, seeds: &NodeSet) -> Result<(Option<Vec<bool>>, Option<Vec<bool>>)> {
    match seeds {
        NodeSet::Vertices(vs) => {
            let mut m = vec![false; h.n()];
            for &v in vs {
                *m.get_mut(v).ok_or_else(|| Error::invalid(format!("vertex {v} out of range")))? = true;
            }
            Ok((Some(m), None))
        }
        NodeSet::Checks(es) => {
            let mut m = vec![false; h.num_checks()];
            for &e in es {
                *m.get_mut(e).ok_or_else(|| Error::invalid(format!("check {e} out of range")))? = true;
            }
            Ok((None, Some(m)))
        }
    }
}

fn check_radius(r: usize) -> Result<()> {
    if r == 0 {
        return Err(Error::invalid("neighborhood radius must be at least 1"));
    }
    Ok(())
}

/// `Vert_r(S)`: for vertex seeds the vertices within distance `2r`, for check
/// seeds those within `2r - 1`. Sorted.
pub fn vert_neighborhood(h: &FactorGraph, seeds: &NodeSet, r: usize) -> Result<Vec<usize>> {
    check_radius(r)?;
    let mut verts = match seed_masks(h, seeds)? {
        (Some(v), _) => vert_of_checks(h, &checks_of_verts(h, &v)),
        (_, Some(c)) => vert_of_checks(h, &c),
        _ => unreachable!(),
    };
    for _ in 1..r {
        verts = vert_of_checks(h, &checks_of_verts(h, &verts));
    }
    Ok(mask_to_list(&verts))
}

/// `Check_r(S)`: for vertex seeds the checks within distance `2r - 1`, for
/// check seeds those within `2r`. Sorted.
pub fn check_neighborhood(h: &FactorGraph, seeds: &NodeSet, r: usize) -> Result<Vec<usize>> {
    check_radius(r)?;
    let mut checks = match seed_masks(h, seeds)? {
        (Some(v), _) => checks_of_verts(h, &v),
        (_, Some(c)) => checks_of_verts(h, &vert_of_checks(h, &c)),
        _ => unreachable!(),
    };
    for _ in 1..r {
        checks = checks_of_verts(h, &vert_of_checks(h, &checks));
    }
    Ok(mask_to_list(&checks))
}

/// Breadth-first distances from `v` in the Schreier graph of σ (one step is
/// any `σ_i^j`, `j ≠ 0`), truncated at `r_max`.
fn bfs(sigma: &UniformHomomorphism, v: usize, r_max: usize, mut visit: impl FnMut(usize, usize) -> bool) {
    let mut dist = vec![usize::MAX; sigma.n()];
    let mut queue = VecDeque::from([v]);
    dist[v] = 0;
    if !visit(v, 0) {
        return;
    }
    while let Some(u) = queue.pop_front() {
        if dist[u] == r_max {
            continue;
        }
        for i in 0..sigma.d() {
            let mut w = u;
            for _ in 1..sigma.k() {
                w = sigma.apply(i, w);
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    if !visit(w, dist[w]) {
                        return;
                    }
                    queue.push_back(w);
                }
            }
        }
    }
}

/// Word-metric distance between vertices `v` and `w` under σ, or
/// [`Distance::Beyond`] if it exceeds `r_max`.
pub fn sigma_distance(sigma: &UniformHomomorphism, v: usize, w: usize, r_max: usize) -> Distance {
    let mut found = Distance::Beyond;
    bfs(sigma, v, r_max, |u, du| {
        if u == w {
            found = Distance::Within(du);
            false
        } else {
            true
        }
    });
    found
}

/// Scans `order` and keeps each vertex farther than `separation` from all
/// previously kept ones, stopping after `limit` vertices if given.
pub fn greedy_separated_set(
    sigma: &UniformHomomorphism,
    separation: usize,
    order: &[usize],
    limit: Option<usize>,
) -> Vec<usize> {
    let mut blocked = vec![false; sigma.n()];
    let mut chosen = Vec::new();
    for &v in order {
        if limit.is_some_and(|l| chosen.len() >= l) {
            break;
        }
        if blocked[v] {
            continue;
        }
        chosen.push(v);
        bfs(sigma, v, separation, |u, _| {
            blocked[u] = true;
            true
        });
    }
    chosen
}

/// Whether `g ↦ σ(g⁻¹) v` is injective on `ball`.
pub fn orbit_map_injective(sigma: &UniformHomomorphism, v: usize, ball: &[GroupWord]) -> bool {
    let mut seen = vec![false; sigma.n()];
    for g in ball {
        let u = sigma.pullback_coordinate(g, v);
        if std::mem::replace(&mut seen[u], true) {
            return false;
        }
    }
    true
}
