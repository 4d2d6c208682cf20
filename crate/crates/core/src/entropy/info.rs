use std::collections::HashMap;

use crate::error::{Error, Result};

/// Tolerance on the total mass of a probability vector.
pub const NORMALIZATION_TOL: f64 = 1e-9;

#[inline]
fn plogp(p: f64) -> f64 {
    if p > 0.0 {
        -p * p.ln()
    } else {
        0.0
    }
}

fn check_distribution(p: &[f64]) -> Result<()> {
    if p.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
        return Err(Error::invalid("probabilities must be finite and nonnegative"));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::NotNormalized(total));
    }
    Ok(())
}

/// Shannon entropy in nats, with 0·log 0 = 0.
pub fn shannon_entropy(p: &[f64]) -> Result<f64> {
    check_distribution(p)?;
    Ok(p.iter().map(|&x| plogp(x)).sum())
}

/// H(t) = -t log t - (1-t) log(1-t), accurate for tiny `t`.
pub fn binary_entropy(t: f64) -> f64 {
    if t <= 0.0 || t >= 1.0 {
        return 0.0;
    }
    -t * t.ln() - (1.0 - t) * (-t).ln_1p()
}

/// A joint distribution on a product of finite alphabets, stored row-major
/// with the last variable varying fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct JointDistribution {
    shape: Vec<usize>,
    probs: Vec<f64>,
}

impl JointDistribution {
    pub fn new(shape: Vec<usize>, probs: Vec<f64>) -> Result<Self> {
        let size: usize = shape.iter().product();
        if shape.is_empty() || size != probs.len() {
            return Err(Error::LengthMismatch { left: size, right: probs.len() });
        }
        check_distribution(&probs)?;
        Ok(JointDistribution { shape, probs })
    }

    /// The empirical distribution of `samples`, each a tuple of symbols with
    /// `samples[s][j] < shape[j]`.
    pub fn from_samples(shape: Vec<usize>, samples: &[Vec<usize>]) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::invalid("empirical table needs at least one sample"));
        }
        let size: usize = shape.iter().product();
        let mut probs = vec![0.0; size];
        let w = 1.0 / samples.len() as f64;
        for s in samples {
            if s.len() != shape.len() {
                return Err(Error::LengthMismatch { left: shape.len(), right: s.len() });
            }
            let mut idx = 0;
            for (&a, &m) in s.iter().zip(&shape) {
                if a >= m {
                    return Err(Error::OutOfRange { value: a as f64, lo: 0.0, hi: m as f64 });
                }
                idx = idx * m + a;
            }
            probs[idx] += w;
        }
        Ok(JointDistribution { shape, probs })
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn entropy(&self) -> f64 {
        self.probs.iter().map(|&p| plogp(p)).sum()
    }

    /// Joint marginal of the variables in `axes` (kept in the given order).
    pub fn marginal(&self, axes: &[usize]) -> JointDistribution {
        let shape: Vec<usize> = axes.iter().map(|&a| self.shape[a]).collect();
        let mut probs = vec![0.0; shape.iter().product()];
        let mut digits = vec![0usize; self.shape.len()];
        for &p in &self.probs {
            let idx = axes.iter().fold(0, |acc, &a| acc * self.shape[a] + digits[a]);
            probs[idx] += p;
            for j in (0..digits.len()).rev() {
                digits[j] += 1;
                if digits[j] < self.shape[j] {
                    break;
                }
                digits[j] = 0;
            }
        }
        JointDistribution { shape, probs }
    }

    /// Pushforward under coordinate-wise maps, `maps[j][a]` the image of
    /// symbol `a` of variable `j` in an alphabet of size `new_shape[j]`.
    pub fn map_coordinates(&self, new_shape: Vec<usize>, maps: &[Vec<usize>]) -> Result<JointDistribution> {
        if maps.len() != self.shape.len() || new_shape.len() != self.shape.len() {
            return Err(Error::LengthMismatch { left: self.shape.len(), right: maps.len() });
        }
        let mut out: HashMap<usize, f64> = HashMap::new();
        let mut digits = vec![0usize; self.shape.len()];
        for &p in &self.probs {
            let mut idx = 0;
            for j in 0..digits.len() {
                let b = maps[j][digits[j]];
                if b >= new_shape[j] {
                    return Err(Error::invalid("coordinate map leaves the target alphabet"));
                }
                idx = idx * new_shape[j] + b;
            }
            *out.entry(idx).or_default() += p;
            for j in (0..digits.len()).rev() {
                digits[j] += 1;
                if digits[j] < self.shape[j] {
                    break;
                }
                digits[j] = 0;
            }
        }
        let mut probs = vec![0.0; new_shape.iter().product()];
        for (i, p) in out {
            probs[i] = p;
        }
        Ok(JointDistribution { shape: new_shape, probs })
    }
}

/// TC(X_1; ...; X_m) = Σ H(X_j) - H(X_1, ..., X_m).
pub fn total_correlation(joint: &JointDistribution) -> f64 {
    let singles: f64 = (0..joint.shape.len()).map(|j| joint.marginal(&[j]).entropy()).sum();
    singles - joint.entropy()
}

/// H(X|Y) + H(Y|X) for a joint table of two variables.
pub fn rokhlin_distance(joint: &JointDistribution) -> Result<f64> {
    if joint.shape.len() != 2 {
        return Err(Error::invalid("Rokhlin distance needs a joint table of exactly two variables"));
    }
    let h = joint.entropy();
    Ok(2.0 * h - joint.marginal(&[0]).entropy() - joint.marginal(&[1]).entropy())
}
