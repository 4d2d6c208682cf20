use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::entropy::weight::{empirical_counts, rotate_index, HyperedgeWeight};
use crate::error::{Error, Result};
use crate::factor_graph::UniformHomomorphism;
use crate::gf2::BitVec;

/// Tolerance used when reading integer counts off a floating-point weight.
const INTEGRALITY_TOL: f64 = 1e-9;

/// A weight with denominator `N = kn`, stored as exact integer counts:
/// `vertex_counts[b] = N·W(b)` and `edge_counts[i][a] = N·W(a; i)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeightCounts {
    d: usize,
    k: usize,
    alphabet: usize,
    vertex_counts: Vec<u64>,
    edge_counts: Vec<Vec<u64>>,
}

impl WeightCounts {
    /// Validates totals and the exact consistency condition.
    pub fn new(d: usize, k: usize, alphabet: usize, vertex_counts: Vec<u64>, edge_counts: Vec<Vec<u64>>) -> Result<Self> {
        if d == 0 || k < 2 || alphabet == 0 || vertex_counts.len() != alphabet || edge_counts.len() != d {
            return Err(Error::invalid("weight counts have the wrong shape"));
        }
        let size = alphabet.pow(k as u32);
        let total: u64 = vertex_counts.iter().sum();
        if total == 0 || total % k as u64 != 0 {
            return Err(Error::NonIntegerDenominator {
                denominator: total as usize,
                detail: format!("vertex total must be a positive multiple of k={k}"),
            });
        }
        for (i, e) in edge_counts.iter().enumerate() {
            if e.len() != size {
                return Err(Error::LengthMismatch { left: size, right: e.len() });
            }
            for j in 0..k {
                let stride = alphabet.pow(j as u32);
                let mut m = vec![0u64; alphabet];
                for (idx, &c) in e.iter().enumerate() {
                    m[(idx / stride) % alphabet] += c;
                }
                if m != vertex_counts {
                    return Err(Error::InconsistentWeight(format!("part {i}, position {j}: {m:?} != {vertex_counts:?}")));
                }
            }
        }
        Ok(WeightCounts { d, k, alphabet, vertex_counts, edge_counts })
    }

    /// Reads `kn·W` off a floating-point weight.
    pub fn from_weight(w: &HyperedgeWeight, n: usize) -> Result<Self> {
        let total = w.k() * n;
        let to_count = |p: f64, what: &str| -> Result<u64> {
            let c = p * total as f64;
            if (c - c.round()).abs() > INTEGRALITY_TOL * total as f64 {
                return Err(Error::NonIntegerDenominator { denominator: total, detail: format!("{what} = {p}") });
            }
            Ok(c.round() as u64)
        };
        let vertex = w.vertex_weight().iter().map(|&p| to_count(p, "vertex weight")).collect::<Result<Vec<_>>>()?;
        let edges = (0..w.d())
            .map(|i| w.edge_weight(i).iter().map(|&p| to_count(p, "edge weight")).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        WeightCounts::new(w.d(), w.k(), w.alphabet(), vertex, edges)
    }

    /// The counts of W_{x,σ}.
    pub fn from_labeling(x: &BitVec, sigma: &UniformHomomorphism) -> Result<Self> {
        if x.len() != sigma.n() {
            return Err(Error::LengthMismatch { left: sigma.n(), right: x.len() });
        }
        let ones = x.weight() as u64;
        let vertex = vec![sigma.n() as u64 - ones, ones];
        WeightCounts::new(sigma.d(), sigma.k(), 2, vertex, empirical_counts(x, sigma))
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// N = kn.
    pub fn total(&self) -> u64 {
        self.vertex_counts.iter().sum()
    }

    pub fn vertex_counts(&self) -> &[u64] {
        &self.vertex_counts
    }

    pub fn edge_counts(&self, i: usize) -> &[u64] {
        &self.edge_counts[i]
    }

    pub fn to_weight(&self) -> Result<HyperedgeWeight> {
        let t = self.total() as f64;
        let scale = |c: &[u64]| c.iter().map(|&x| x as f64 / t).collect::<Vec<_>>();
        HyperedgeWeight::new(
            self.d,
            self.k,
            self.alphabet,
            self.edge_counts.iter().map(|e| scale(e)).collect(),
            scale(&self.vertex_counts),
        )
    }
}

fn factorial(n: u64) -> BigUint {
    (2..=n).fold(BigUint::one(), |acc, m| acc * m)
}

/// Orbits of cyclic rotation on `A^{Z_k}` as `(representative, orbit size)`.
fn rotation_classes(k: usize, alphabet: usize) -> Vec<(usize, usize)> {
    let size = alphabet.pow(k as u32);
    let mut seen = vec![false; size];
    let mut out = Vec::new();
    for idx in 0..size {
        if seen[idx] {
            continue;
        }
        let mut len = 0;
        let mut a = idx;
        while !seen[a] {
            seen[a] = true;
            len += 1;
            a = rotate_index(a, k, alphabet);
        }
        out.push((idx, len));
    }
    out
}

/// Number of σ_i with cycle type `[k^n]` whose orbit tuples under the fixed
/// labeling reproduce `edge`, or `None` if no such σ_i exists.
fn pattern_orbit_size(edge: &[u64], vertex_counts: &[u64], k: usize, alphabet: usize) -> Option<BigRational> {
    let mut stab = BigUint::one();
    for (rep, len) in rotation_classes(k, alphabet) {
        let c = edge[rep];
        let mut a = rotate_index(rep, k, alphabet);
        for _ in 1..len {
            if edge[a] != c {
                return None;
            }
            a = rotate_index(a, k, alphabet);
        }
        if (c * len as u64) % k as u64 != 0 {
            return None;
        }
        let m = c * len as u64 / k as u64;
        stab *= factorial(m) * BigUint::from(k / len).pow(m as u32);
    }
    let g: BigUint = vertex_counts.iter().map(|&c| factorial(c)).product();
    Some(BigRational::new(g.into(), stab.into()))
}

/// E_σ |{x : W_{x,σ} = W}| over the permutation model on `kn` vertices,
/// exactly. Zero when no labeling and homomorphism realize `W`.
pub fn exact_expected_count(w: &WeightCounts) -> BigRational {
    let (k, total) = (w.k as u64, w.total());
    let n = total / k;
    let mut value = BigRational::from_integer(factorial(total).into());
    for &c in &w.vertex_counts {
        value /= BigRational::from_integer(factorial(c).into());
    }
    let per_generator = factorial(total) / (factorial(n) * BigUint::from(k).pow(n as u32));
    for e in &w.edge_counts {
        match pattern_orbit_size(e, &w.vertex_counts, w.k, w.alphabet) {
            Some(g) => value = value * g / BigRational::from_integer(per_generator.clone().into()),
            None => return BigRational::zero(),
        }
    }
    value
}

/// Natural log of a nonnegative big rational; `-inf` for zero.
pub fn ln_big_rational(x: &BigRational) -> f64 {
    fn ln_big(x: &BigUint) -> f64 {
        let bits = x.bits();
        if bits < 1000 {
            return x.to_f64().unwrap_or(f64::INFINITY).ln();
        }
        let shift = bits - 64;
        (x >> shift).to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
    }
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let (num, den) = (x.numer().magnitude(), x.denom().magnitude());
    ln_big(num) - ln_big(den)
}

/// Every binary weight of denominator `kn` realized by some labeling and
/// some σ in the permutation model.
pub fn enumerate_realizable_weights(d: usize, k: usize, n: usize) -> Result<Vec<WeightCounts>> {
    if d == 0 || k < 2 || n == 0 || k > 16 {
        return Err(Error::invalid("need d >= 1, 2 <= k <= 16, n >= 1"));
    }
    let classes: Vec<(usize, usize, u64)> =
        rotation_classes(k, 2).into_iter().map(|(rep, len)| (rep, len, rep.count_ones() as u64)).collect();
    let total = (k * n) as u64;
    let mut out = Vec::new();
    for ones in 0..=total {
        let mut parts = Vec::new();
        let mut mult = vec![0u64; classes.len()];
        collect_parts(&classes, 0, n as u64, ones, &mut mult, k, &mut parts);
        if parts.is_empty() {
            continue;
        }
        let mut choice = vec![0usize; d];
        loop {
            let edges = choice.iter().map(|&c| parts[c].clone()).collect();
            out.push(WeightCounts::new(d, k, 2, vec![total - ones, ones], edges)?);
            let mut j = 0;
            while j < d {
                choice[j] += 1;
                if choice[j] < parts.len() {
                    break;
                }
                choice[j] = 0;
                j += 1;
            }
            if j == d {
                break;
            }
        }
        if out.len() > 10_000_000 {
            return Err(Error::resource("too many realizable weights"));
        }
    }
    Ok(out)
}

/// Cycle-class multiplicities with `cycles` cycles carrying `ones` ones in
/// total, expanded into per-tuple vertex counts.
fn collect_parts(
    classes: &[(usize, usize, u64)],
    idx: usize,
    cycles: u64,
    ones: u64,
    mult: &mut Vec<u64>,
    k: usize,
    out: &mut Vec<Vec<u64>>,
) {
    if idx == classes.len() {
        if cycles == 0 && ones == 0 {
            let mut edge = vec![0u64; 1 << k];
            for (&(rep, len, _), &m) in classes.iter().zip(mult.iter()) {
                let mut a = rep;
                for _ in 0..len {
                    edge[a] = m * (k / len) as u64;
                    a = rotate_index(a, k, 2);
                }
            }
            out.push(edge);
        }
        return;
    }
    let (_, _, w) = classes[idx];
    let mut m = 0;
    while m <= cycles && m * w <= ones {
        mult[idx] = m;
        collect_parts(classes, idx + 1, cycles - m, ones - m * w, mult, k, out);
        m += 1;
    }
    mult[idx] = 0;
}

/// All permutations of `[total]` made of `total / k` disjoint k-cycles.
pub fn enumerate_uniform_permutations(total: usize, k: usize) -> Result<Vec<Vec<u32>>> {
    if k < 2 || total % k != 0 || total > 12 {
        return Err(Error::invalid("exhaustive permutation enumeration needs k | total <= 12"));
    }
    fn extend(perm: &mut Vec<u32>, used: &mut Vec<bool>, k: usize, out: &mut Vec<Vec<u32>>) {
        let Some(start) = used.iter().position(|&u| !u) else {
            out.push(perm.clone());
            return;
        };
        used[start] = true;
        let mut cycle = vec![start];
        grow(perm, used, k, &mut cycle, out);
        used[start] = false;
    }
    fn grow(perm: &mut Vec<u32>, used: &mut Vec<bool>, k: usize, cycle: &mut Vec<usize>, out: &mut Vec<Vec<u32>>) {
        if cycle.len() == k {
            for j in 0..k {
                perm[cycle[j]] = cycle[(j + 1) % k] as u32;
            }
            extend(perm, used, k, out);
            return;
        }
        for v in 0..used.len() {
            if !used[v] {
                used[v] = true;
                cycle.push(v);
                grow(perm, used, k, cycle, out);
                cycle.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    extend(&mut vec![0; total], &mut vec![false; total], k, &mut out);
    Ok(out)
}

/// E_σ |{x : W_{x,σ} = W}| for every weight that occurs, by running over all
/// homomorphisms and all labelings. Feasible only for tiny `total`.
pub fn brute_force_expected_counts(d: usize, k: usize, total: usize) -> Result<HashMap<WeightCounts, BigRational>> {
    let perms = enumerate_uniform_permutations(total, k)?;
    let work = (perms.len() as f64).powi(d as i32) * (1u64 << total) as f64;
    if work > 5e7 {
        return Err(Error::resource(format!("brute force needs {work:.0} evaluations")));
    }
    let mut tally: HashMap<WeightCounts, u64> = HashMap::new();
    let mut choice = vec![0usize; d];
    let mut homs = 0u64;
    loop {
        let sigma = UniformHomomorphism::new(total, d, k, choice.iter().map(|&c| perms[c].clone()).collect())?;
        homs += 1;
        for bits in 0..1u64 << total {
            let x = BitVec::from_indices(total, (0..total).filter(|&v| bits >> v & 1 == 1));
            *tally.entry(WeightCounts::from_labeling(&x, &sigma)?).or_default() += 1;
        }
        let mut j = 0;
        while j < d {
            choice[j] += 1;
            if choice[j] < perms.len() {
                break;
            }
            choice[j] = 0;
            j += 1;
        }
        if j == d {
            break;
        }
    }
    let denom = BigInt::from(homs);
    Ok(tally.into_iter().map(|(w, c)| (w, BigRational::new(BigInt::from(c), denom.clone()))).collect())
}
