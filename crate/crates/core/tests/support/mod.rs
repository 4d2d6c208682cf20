#![allow(dead_code)]

use std::collections::HashMap;

use rand::Rng;

/// Dense 0/1 matrix, one byte per entry.
pub type Dense = Vec<Vec<u8>>;

pub fn random_dense<R: Rng + ?Sized>(rows: usize, cols: usize, density: f64, rng: &mut R) -> Dense {
    (0..rows).map(|_| (0..cols).map(|_| rng.gen_bool(density) as u8).collect()).collect()
}

/// Row echelon form by plain per-entry elimination; returns the pivot columns.
pub fn naive_echelon(m: &mut Dense, cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for c in 0..cols {
        let Some(p) = (row..m.len()).find(|&r| m[r][c] == 1) else { continue };
        m.swap(row, p);
        for r in 0..m.len() {
            if r != row && m[r][c] == 1 {
                for j in 0..cols {
                    m[r][j] ^= m[row][j];
                }
            }
        }
        pivots.push(c);
        row += 1;
    }
    pivots
}

pub fn naive_rank(m: &Dense, cols: usize) -> usize {
    naive_echelon(&mut m.clone(), cols).len()
}

pub fn naive_mul(m: &Dense, x: &[u8]) -> Vec<u8> {
    m.iter().map(|row| row.iter().zip(x).fold(0, |acc, (a, b)| acc ^ (a & b))).collect()
}

/// Kernel basis read off the reduced echelon form: one vector per free column.
pub fn naive_kernel(m: &Dense, cols: usize) -> Dense {
    let mut e = m.clone();
    let pivots = naive_echelon(&mut e, cols);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![0u8; cols];
            x[f] = 1;
            for (r, &p) in pivots.iter().enumerate() {
                x[p] = e[r][f];
            }
            x
        })
        .collect()
}

pub fn columns(m: &Dense, keep: &[usize]) -> Dense {
    m.iter().map(|row| keep.iter().map(|&c| row[c]).collect()).collect()
}

/// All permutations of `0..n` whose cycles all have length `k`, found by
/// filtering every permutation.
pub fn k_uniform_permutations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn heap(p: &mut Vec<usize>, m: usize, out: &mut Vec<Vec<usize>>) {
        if m <= 1 {
            out.push(p.clone());
            return;
        }
        for i in 0..m {
            heap(p, m - 1, out);
            if m % 2 == 0 {
                p.swap(i, m - 1);
            } else {
                p.swap(0, m - 1);
            }
        }
    }
    let mut all = Vec::new();
    heap(&mut (0..n).collect(), n, &mut all);
    all.retain(|p| {
        (0..n).all(|v| {
            let mut u = p[v];
            let mut len = 1;
            while u != v {
                u = p[u];
                len += 1;
            }
            len == k
        })
    });
    all
}

/// Key of a labeled homomorphism: number of ones, then for each generator
/// the histogram of the k-tuples read along σ_i from every vertex.
pub type CountKey = (u64, Vec<Vec<u64>>);

/// Number of (homomorphism, labeling) pairs per key, and the number of
/// homomorphisms.
pub fn brute_force_tally(d: usize, k: usize, n: usize) -> (HashMap<CountKey, u64>, u64) {
    let perms = k_uniform_permutations(n, k);
    let mut tally = HashMap::new();
    let homs = (perms.len() as u64).pow(d as u32);
    for code in 0..homs {
        let mut c = code;
        let sigma: Vec<&Vec<usize>> = (0..d)
            .map(|_| {
                let p = &perms[(c % perms.len() as u64) as usize];
                c /= perms.len() as u64;
                p
            })
            .collect();
        for x in 0u32..1 << n {
            let bit = |v: usize| (x >> v & 1) as usize;
            let hist: Vec<Vec<u64>> = sigma
                .iter()
                .map(|p| {
                    let mut h = vec![0u64; 1 << k];
                    for v in 0..n {
                        let (mut u, mut idx) = (v, 0);
                        for j in 0..k {
                            idx += bit(u) << j;
                            u = p[u];
                        }
                        h[idx] += 1;
                    }
                    h
                })
                .collect();
            *tally.entry((x.count_ones() as u64, hist)).or_insert(0) += 1;
        }
    }
    (tally, homs)
}

/// Entropy in nats of a probability vector, 0 log 0 = 0.
pub fn entropy(p: &[f64]) -> f64 {
    -p.iter().filter(|&&x| x > 0.0).map(|&x| x * x.ln()).sum::<f64>()
}

fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap();
        a.swap(c, p);
        b.swap(c, p);
        for r in 0..n {
            if r != c {
                let f = a[r][c] / a[c][c];
                for j in c..n {
                    a[r][j] -= f * a[c][j];
                }
                b[r] -= f * b[c];
            }
        }
    }
    (0..n).map(|i| b[i] / a[i][i]).collect()
}

/// max H(p) over distributions on even-parity 4-bit tuples whose every
/// position has marginal P(bit = 1) = t, by projected gradient ascent with
/// backtracking. Returns the maximal entropy in nats.
pub fn max_even_parity_entropy(t: f64) -> f64 {
    let k = 4;
    let support: Vec<usize> = (0..1usize << k).filter(|a| a.count_ones() % 2 == 0).collect();
    let m = support.len();
    let mut rows: Vec<Vec<f64>> = vec![vec![1.0; m]];
    for j in 0..k {
        rows.push(support.iter().map(|&a| (a >> j & 1) as f64).collect());
    }
    let gram: Vec<Vec<f64>> =
        rows.iter().map(|r| rows.iter().map(|s| r.iter().zip(s).map(|(x, y)| x * y).sum()).collect()).collect();
    let project = |g: &[f64]| -> Vec<f64> {
        let ag: Vec<f64> = rows.iter().map(|r| r.iter().zip(g).map(|(x, y)| x * y).sum()).collect();
        let lambda = solve(gram.clone(), ag);
        (0..m).map(|i| g[i] - rows.iter().zip(&lambda).map(|(r, l)| r[i] * l).sum::<f64>()).collect()
    };
    // strictly positive feasible start: 10% of the density on the all-ones
    // tuple, the rest spread over weight-2 tuples
    let mut p: Vec<f64> = support
        .iter()
        .map(|&a| match a.count_ones() {
            0 => 1.0 - 1.9 * t,
            2 => 0.3 * t,
            _ => 0.1 * t,
        })
        .collect();
    let mut h = entropy(&p);
    for _ in 0..100_000 {
        let grad: Vec<f64> = p.iter().map(|&x| -(x.ln() + 1.0)).collect();
        let dir = project(&grad);
        let norm = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < 1e-12 {
            break;
        }
        let mut step = 1.0;
        loop {
            let q: Vec<f64> = p.iter().zip(&dir).map(|(a, b)| a + step * b).collect();
            if q.iter().all(|&x| x > 0.0) {
                let hq = entropy(&q);
                if hq >= h {
                    p = q;
                    h = hq;
                    break;
                }
            }
            step /= 2.0;
            if step < 1e-18 {
                return h;
            }
        }
    }
    h
}

/// sup of the Kikuchi entropy over even-parity weights of density t, k = 4.
pub fn variational_growth(d: usize, t: f64) -> f64 {
    let (df, kf) = (d as f64, 4.0);
    (1.0 - df) * entropy(&[t, 1.0 - t]) + df / kf * max_even_parity_entropy(t)
}

/// G along the parametrization, written from the closed-form partition
/// function Z(s) = ((1+s)^k + (1-s)^k) / 2.
pub fn closed_form_point(d: usize, k: usize, s: f64) -> (f64, f64) {
    let (df, kf) = (d as f64, k as f64);
    let z = ((1.0 + s).powi(k as i32) + (1.0 - s).powi(k as i32)) / 2.0;
    let t = s * ((1.0 + s).powi(k as i32 - 1) - (1.0 - s).powi(k as i32 - 1)) / (2.0 * z);
    let g = (1.0 - df) * entropy(&[t, 1.0 - t]) + df / kf * (z.ln() - kf * t * s.ln());
    (t, g)
}
