//! The free product Γ = Z_k * ... * Z_k (d factors) near the identity.
//!
//! Words are kept in normal form: a sequence of letters `s_i^j` with
//! `1 <= j < k` and no two adjacent letters on the same generator. Word length
//! counts letters, i.e. the metric uses every power `s_i^j` as a generator.
//! Generators are 0-based internally and printed 1-based (`s1^2.s3^1`).

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVec, LinearCode};

/// Default cap on the number of ball vertices.
pub const DEFAULT_BALL_CAP: usize = 1_000_000;

/// Balls up to this size also have their dimension confirmed by a dense
/// GF(2) rank computation.
pub const RANK_CHECK_MAX_VERTICES: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub generator: usize,
    pub power: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupWord {
    letters: Vec<Letter>,
}

impl GroupWord {
    pub fn identity() -> Self {
        GroupWord::default()
    }

    /// Builds a word, rejecting anything not in normal form for Γ_{d,k}.
    pub fn from_letters(d: usize, k: usize, letters: Vec<Letter>) -> Result<Self> {
        for (t, l) in letters.iter().enumerate() {
            if l.generator >= d || l.power == 0 || l.power >= k {
                return Err(Error::invalid(format!("letter {t} out of range for d={d}, k={k}")));
            }
            if t > 0 && letters[t - 1].generator == l.generator {
                return Err(Error::invalid(format!("letters {} and {t} share a generator", t - 1)));
            }
        }
        Ok(GroupWord { letters })
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    /// Word length.
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn last_generator(&self) -> Option<usize> {
        self.letters.last().map(|l| l.generator)
    }

    /// The product `self · s_generator^power`, reduced to normal form.
    pub fn right_mul(&self, generator: usize, power: usize, k: usize) -> GroupWord {
        let power = power % k;
        let mut letters = self.letters.clone();
        if power == 0 {
            return GroupWord { letters };
        }
        match letters.last_mut() {
            Some(last) if last.generator == generator => {
                last.power = (last.power + power) % k;
                if last.power == 0 {
                    letters.pop();
                }
            }
            _ => letters.push(Letter { generator, power }),
        }
        GroupWord { letters }
    }

    pub fn inverse(&self, k: usize) -> GroupWord {
        let letters = self
            .letters
            .iter()
            .rev()
            .map(|l| Letter { generator: l.generator, power: k - l.power })
            .collect();
        GroupWord { letters }
    }
}

impl fmt::Display for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "e");
        }
        for (t, l) in self.letters.iter().enumerate() {
            if t > 0 {
                write!(f, ".")?;
            }
            write!(f, "s{}^{}", l.generator + 1, l.power)?;
        }
        Ok(())
    }
}

impl FromStr for GroupWord {
    type Err = Error;

    /// Parses the printed form without range checks; use
    /// [`GroupWord::from_letters`] to validate against `(d, k)`.
    fn from_str(s: &str) -> Result<Self> {
        if s == "e" {
            return Ok(GroupWord::identity());
        }
        let letters = s
            .split('.')
            .map(|part| {
                let bad = || Error::invalid(format!("malformed letter '{part}'"));
                let (g, p) = part.strip_prefix('s').and_then(|r| r.split_once('^')).ok_or_else(bad)?;
                let generator: usize = g.parse().map_err(|_| bad())?;
                let power: usize = p.parse().map_err(|_| bad())?;
                if generator == 0 {
                    return Err(bad());
                }
                Ok(Letter { generator: generator - 1, power })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(GroupWord { letters })
    }
}

fn check_params(d: usize, k: usize) -> Result<()> {
    if d < 1 || k < 2 {
        return Err(Error::invalid(format!("need d >= 1 and k >= 2, got d={d}, k={k}")));
    }
    Ok(())
}

/// |B_r| = 1 + d(k-1) Σ_{j<r} ((d-1)(k-1))^j, or `None` on overflow.
pub fn ball_size(d: usize, k: usize, r: usize) -> Option<usize> {
    let branch = (d - 1).checked_mul(k - 1)?;
    let mut shell = d.checked_mul(k - 1)?;
    let mut total = 1usize;
    for _ in 0..r {
        total = total.checked_add(shell)?;
        shell = shell.checked_mul(branch)?;
    }
    Some(total)
}

/// All words of length at most `r`, identity first, ordered by length and
/// then lexicographically by their `(generator, power)` letters.
pub fn enumerate_ball(d: usize, k: usize, r: usize) -> Result<Vec<GroupWord>> {
    enumerate_ball_capped(d, k, r, DEFAULT_BALL_CAP)
}

pub fn enumerate_ball_capped(d: usize, k: usize, r: usize, cap: usize) -> Result<Vec<GroupWord>> {
    check_params(d, k)?;
    match ball_size(d, k, r) {
        Some(size) if size <= cap => {}
        _ => return Err(Error::resource(format!("ball B_{r} for d={d}, k={k} exceeds cap {cap}"))),
    }
    let mut ball = vec![GroupWord::identity()];
    let mut level_start = 0;
    for _ in 0..r {
        let level_end = ball.len();
        for w in level_start..level_end {
            let last = ball[w].last_generator();
            for generator in (0..d).filter(|&g| Some(g) != last) {
                for power in 1..k {
                    let next = ball[w].right_mul(generator, power, k);
                    ball.push(next);
                }
            }
        }
        level_start = level_end;
    }
    Ok(ball)
}

/// The limit code restricted to the ball B_r: all labelings of B_r whose sum
/// over every hyperedge `{g, g s_i, ..., g s_i^{k-1}}` lying inside B_r is
/// even.
#[derive(Clone, Debug)]
pub struct BallCode {
    d: usize,
    k: usize,
    r: usize,
    vertices: Vec<GroupWord>,
    hyperedges: Vec<Vec<usize>>,
    dimension: usize,
    index: HashMap<GroupWord, usize>,
}

impl BallCode {
    pub fn new(d: usize, k: usize, r: usize) -> Result<Self> {
        Self::with_cap(d, k, r, DEFAULT_BALL_CAP)
    }

    pub fn with_cap(d: usize, k: usize, r: usize, cap: usize) -> Result<Self> {
        let vertices = enumerate_ball_capped(d, k, r, cap)?;
        let index: HashMap<GroupWord, usize> =
            vertices.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();

        // An orbit g<s_i> lies in B_r iff its shortest member (the one not
        // ending in s_i) has length < r.
        let mut hyperedges = Vec::new();
        for base in vertices.iter().filter(|w| w.len() < r) {
            for generator in (0..d).filter(|&g| Some(g) != base.last_generator()) {
                let edge = (0..k).map(|j| index[&base.right_mul(generator, j, k)]).collect();
                hyperedges.push(edge);
            }
        }

        let dimension = vertices.len() - hyperedges.len();
        let code = BallCode { d, k, r, vertices, hyperedges, dimension, index };
        if code.vertices.len() <= RANK_CHECK_MAX_VERTICES {
            let rank = code.check_matrix().rank();
            if rank != code.hyperedges.len() {
                return Err(Error::Invariant(format!(
                    "ball checks not independent: rank {rank} vs {} hyperedges",
                    code.hyperedges.len()
                )));
            }
        }
        Ok(code)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn radius(&self) -> usize {
        self.r
    }

    pub fn vertices(&self) -> &[GroupWord] {
        &self.vertices
    }

    /// Internal hyperedges as vertex-index lists `[g, g s_i, ..., g s_i^{k-1}]`.
    pub fn hyperedges(&self) -> &[Vec<usize>] {
        &self.hyperedges
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn index_of(&self, word: &GroupWord) -> Option<usize> {
        self.index.get(word).copied()
    }

    /// One row per internal hyperedge, one column per ball vertex.
    pub fn check_matrix(&self) -> BitMatrix {
        let n = self.vertices.len();
        let rows: Vec<BitVec> =
            self.hyperedges.iter().map(|e| BitVec::from_indices(n, e.iter().copied())).collect();
        BitMatrix::from_rows(n, &rows)
    }

    /// Kernel basis of the internal checks.
    pub fn code(&self) -> LinearCode {
        self.check_matrix().kernel_basis()
    }

    /// Entropy of the Haar marginal on B_r: `dim · log 2` nats.
    pub fn haar_marginal_entropy(&self) -> f64 {
        self.dimension as f64 * std::f64::consts::LN_2
    }

    pub fn to_json(&self) -> BallCodeJson {
        BallCodeJson {
            d: self.d,
            k: self.k,
            r: self.r,
            vertex_words: self.vertices.iter().map(|w| w.to_string()).collect(),
            hyperedges: self.hyperedges.clone(),
            dimension: self.dimension,
        }
    }
}

pub fn ball_code(d: usize, k: usize, r: usize) -> Result<BallCode> {
    BallCode::new(d, k, r)
}

pub fn haar_marginal_entropy(code: &BallCode) -> f64 {
    code.haar_marginal_entropy()
}

/// Serialized form of a [`BallCode`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BallCodeJson {
    pub d: usize,
    pub k: usize,
    pub r: usize,
    pub vertex_words: Vec<String>,
    pub hyperedges: Vec<Vec<usize>>,
    pub dimension: usize,
}
