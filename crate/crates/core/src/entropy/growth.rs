use serde::{Deserialize, Serialize};

use crate::entropy::info::binary_entropy;
use crate::entropy::weight::HyperedgeWeight;
use crate::error::{Error, Result};

pub const DEFAULT_S_MAX: f64 = 50.0;
const BISECTION_ITERATIONS: usize = 200;
const DENSITY_TOL: f64 = 1e-10;
const MONOTONE_GRID: usize = 2000;

/// One point `(s, t(s), Z(s), G(s))` of the parametrized growth curve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthCurvePoint {
    pub s: f64,
    pub t: f64,
    pub z: f64,
    pub g: f64,
}

fn binomial(k: usize, m: usize) -> f64 {
    (0..m).fold(1.0, |acc, j| acc * (k - j) as f64 / (j + 1) as f64)
}

/// `(Z - 1, Σ_m m C(k,m) s^m)` over even `m`.
fn partition_sums(k: usize, s: f64) -> (f64, f64) {
    let mut z_minus_one = 0.0;
    let mut moment = 0.0;
    for m in (2..=k).step_by(2) {
        let term = binomial(k, m) * s.powi(m as i32);
        z_minus_one += term;
        moment += m as f64 * term;
    }
    (z_minus_one, moment)
}

fn check_dk(d: usize, k: usize) -> Result<()> {
    if d == 0 || k < 2 {
        return Err(Error::invalid(format!("need d >= 1 and k >= 2, got d={d}, k={k}")));
    }
    Ok(())
}

/// Evaluates the curve at parameter `s ≥ 0`; `s = 0` is the limit point.
pub fn growth_point(d: usize, k: usize, s: f64) -> Result<GrowthCurvePoint> {
    check_dk(d, k)?;
    if !(s >= 0.0) || !s.is_finite() {
        return Err(Error::invalid(format!("s must be finite and nonnegative, got {s}")));
    }
    if s == 0.0 {
        return Ok(GrowthCurvePoint { s, t: 0.0, z: 1.0, g: 0.0 });
    }
    let (z1, moment) = partition_sums(k, s);
    let z = 1.0 + z1;
    let t = moment / (k as f64 * z);
    let (d, kf) = (d as f64, k as f64);
    let g = (1.0 - d) * binary_entropy(t) + d / kf * (-kf * t * s.ln() + z1.ln_1p());
    Ok(GrowthCurvePoint { s, t, z, g })
}

/// The curve on `s_grid ⊆ [0, s_max]`. Fails if `t` is not increasing
/// along the (sorted) grid.
pub fn growth_curve(d: usize, k: usize, s_grid: &[f64], s_max: f64) -> Result<Vec<GrowthCurvePoint>> {
    if let Some(&s) = s_grid.iter().find(|&&s| !(0.0..=s_max).contains(&s)) {
        return Err(Error::OutOfRange { value: s, lo: 0.0, hi: s_max });
    }
    let points = s_grid.iter().map(|&s| growth_point(d, k, s)).collect::<Result<Vec<_>>>()?;
    let mut sorted: Vec<&GrowthCurvePoint> = points.iter().collect();
    sorted.sort_by(|a, b| a.s.total_cmp(&b.s));
    for w in sorted.windows(2) {
        if w[1].s > w[0].s && w[1].t <= w[0].t {
            return Err(Error::Invariant(format!("t(s) not increasing between s={} and s={}", w[0].s, w[1].s)));
        }
    }
    Ok(points)
}

/// `n + 1` evenly spaced parameters on `[0, s_max]`.
pub fn uniform_s_grid(s_max: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|j| s_max * j as f64 / n as f64).collect()
}

fn density(k: usize, s: f64) -> f64 {
    if s == 0.0 {
        return 0.0;
    }
    let (z1, moment) = partition_sums(k, s);
    moment / (k as f64 * (1.0 + z1))
}

/// The attainable densities `[0, t(s_max)]`. Since `t(1) = 1/2` and, for even
/// `k`, `t(1/s) = 1 - t(s)`, the upper end tends to 1 for even `k` and to
/// `(k-1)/k` for odd `k` as `s_max → ∞`.
pub fn attainable_density_range(k: usize, s_max: f64) -> (f64, f64) {
    (0.0, density(k, s_max))
}

fn assert_monotone(k: usize, lo: f64, hi: f64) -> Result<()> {
    let mut prev = density(k, lo);
    for j in 1..=MONOTONE_GRID {
        let s = lo + (hi - lo) * j as f64 / MONOTONE_GRID as f64;
        let t = density(k, s);
        if t <= prev {
            return Err(Error::Invariant(format!("t(s) is not increasing near s={s} for k={k}")));
        }
        prev = t;
    }
    Ok(())
}

/// The parameter `s` with `t(s) = t`, by bisection on `[0, 1]` for `t ≤ 1/2`
/// and on `[1, s_max]` above.
pub fn invert_density(k: usize, t: f64, s_max: f64) -> Result<f64> {
    let (lo_t, hi_t) = attainable_density_range(k, s_max);
    if !(lo_t..=hi_t).contains(&t) {
        return Err(Error::OutOfRange { value: t, lo: lo_t, hi: hi_t });
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let (mut lo, mut hi) = if t <= 0.5 { (0.0, 1.0) } else { (1.0, s_max) };
    assert_monotone(k, lo, hi)?;
    for _ in 0..BISECTION_ITERATIONS {
        let mid = 0.5 * (lo + hi);
        if density(k, mid) < t {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    let s = 0.5 * (lo + hi);
    let err = (density(k, s) - t).abs();
    if err > DENSITY_TOL {
        return Err(Error::Invariant(format!("density inversion missed t={t} by {err}")));
    }
    Ok(s)
}

/// G_cw(t) with the default `s_max`.
pub fn growth_rate_at_density(d: usize, k: usize, t: f64) -> Result<f64> {
    growth_rate_at_density_with_max(d, k, t, DEFAULT_S_MAX)
}

pub fn growth_rate_at_density_with_max(d: usize, k: usize, t: f64, s_max: f64) -> Result<f64> {
    check_dk(d, k)?;
    let s = invert_density(k, t, s_max)?;
    Ok(growth_point(d, k, s)?.g)
}

/// ½ t (d log(k-1) - d + 2 + (d-2) log t), the small-density expansion
/// without its O(t²) term.
pub fn growth_rate_asymptotic(d: usize, k: usize, t: f64) -> Result<f64> {
    check_dk(d, k)?;
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::OutOfRange { value: t, lo: 0.0, hi: 1.0 });
    }
    let (d, k) = (d as f64, k as f64);
    Ok(0.5 * t * (d * (k - 1.0).ln() - d + 2.0 + (d - 2.0) * t.ln()))
}

/// The smallest `t > 0` where G_cw turns from negative to nonnegative, or
/// `None` when G_cw is not negative just above zero (e.g. `d ≤ 2`).
pub fn growth_sign_change(d: usize, k: usize) -> Result<Option<f64>> {
    check_dk(d, k)?;
    let steps = 20_000;
    let g = |t: f64| growth_rate_at_density(d, k, t);
    let first = 0.5 / steps as f64;
    if g(first)? >= 0.0 {
        return Ok(None);
    }
    let mut prev = first;
    for j in 2..=steps {
        let t = 0.5 * j as f64 / steps as f64;
        if g(t)? >= 0.0 {
            let (mut lo, mut hi) = (prev, t);
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if g(mid)? < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Ok(Some(0.5 * (lo + hi)));
        }
        prev = t;
    }
    Ok(None)
}

/// The even-parity weight `W(a; i) = s^{|a|} / Z` with density `t`, at which
/// the Kikuchi entropy equals G_cw(t).
pub fn growth_maximizer_weight(d: usize, k: usize, t: f64) -> Result<HyperedgeWeight> {
    check_dk(d, k)?;
    if k > 20 {
        return Err(Error::resource("edge weight table too large"));
    }
    let s = invert_density(k, t, DEFAULT_S_MAX)?;
    let z = 1.0 + partition_sums(k, s).0;
    let w: Vec<f64> = (0..1usize << k)
        .map(|a| {
            let m = a.count_ones();
            if m % 2 == 0 {
                s.powi(m as i32) / z
            } else {
                0.0
            }
        })
        .collect();
    let ones = density(k, s);
    HyperedgeWeight::new(d, k, 2, vec![w; d], vec![1.0 - ones, ones])
}

/// f(t, α', α'') = (1 - 1/k) H((1-t)α' + tα'') - (1-t)(1 - 1/d) H(α') - t H(α'').
pub fn cancellation_exponent(d: usize, k: usize, t: f64, alpha1: f64, alpha2: f64) -> Result<f64> {
    check_dk(d, k)?;
    for (name, x) in [("t", t), ("alpha'", alpha1), ("alpha''", alpha2)] {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::invalid(format!("{name} = {x} outside [0, 1]")));
        }
    }
    let (d, k) = (d as f64, k as f64);
    let mix = (1.0 - t) * alpha1 + t * alpha2;
    Ok((1.0 - 1.0 / k) * binary_entropy(mix) - (1.0 - t) * (1.0 - 1.0 / d) * binary_entropy(alpha1)
        - t * binary_entropy(alpha2))
}
