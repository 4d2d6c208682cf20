use std::f64::consts::LN_2;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde_json::json;

use super::{ExperimentConfig, ExperimentOutput};
use crate::entropy::{
    attainable_density_range, brute_force_expected_counts, enumerate_realizable_weights, exact_expected_count,
    growth_curve, growth_rate_asymptotic, growth_rate_at_density, growth_sign_change, ln_big_rational,
};
use crate::error::{Error, Result};
use crate::factor_graph::{
    greedy_separated_set, sample_conditioned, sample_permutation_model, sample_uniform_model, FactorGraph,
    DEFAULT_UNIFORM_RETRIES,
};
use crate::group::BallCode;
use crate::microstate::{
    detect_double_cover, edge_marginal_tv, near_cancellation_search, proper_fraction, property_m_entropy,
    select_check_set, shattering_scan, transpose_kernel_dim,
};
use crate::rng::trial_rng;

/// Monte Carlo pass thresholds used by the runners. They are choices of
/// this harness, not constants of the underlying theory.
pub mod thresholds {
    pub const ENTROPY_BELOW: f64 = 0.01;
    pub const ENTROPY_ABOVE: f64 = 0.02;
    pub const SHATTERING_PASS: f64 = 0.9;
    pub const PROPER_MEAN: f64 = 0.99;
    pub const EDGE_TV_MEAN: f64 = 0.02;
    pub const PROPERTY_M_RATIO: f64 = 0.95;
    pub const DOUBLE_COVER_UNIFORM: f64 = 0.05;
    pub const NEAR_CANCELLATION: f64 = 0.05;
    pub const HALF_DENSITY_TOL: f64 = 1e-9;
    /// Density at which the sign of the growth curve near zero is read.
    pub const SMALL_DENSITY: f64 = 1e-3;
}

fn mean_ci(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, 1.96 * (var / n).sqrt())
}

fn cols(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

/// Runs `config.experiment` after validating the configuration.
pub fn run(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    use super::Experiment::*;
    let warnings = config.validate()?;
    let mut out = match config.experiment {
        EntropyValue => cmd_entropy_value(config),
        GrowthCurve => cmd_growth_curve(config),
        Shattering => cmd_shattering(config),
        ProperFraction => cmd_proper_fraction(config),
        PropertyM => cmd_property_m(config),
        Contiguity => cmd_contiguity(config),
        ExpectedCount => cmd_expected_count(config),
        NearCancellation => cmd_near_cancellation(config),
    }?;
    out.warnings.extend(warnings);
    Ok(out)
}

fn sample_graphs(c: &ExperimentConfig) -> Result<Vec<(crate::factor_graph::UniformHomomorphism, FactorGraph)>> {
    (0..c.trials)
        .into_par_iter()
        .map(|t| sample_permutation_model(c.n, c.d, c.k, &mut trial_rng(c.seed, t as u64)))
        .collect()
}

/// Per-trial normalized code entropy `(1/n) log |X_σ|` against `(1-d/k) log 2`.
pub fn cmd_entropy_value(c: &ExperimentConfig) -> Result<ExperimentOutput> {
    let target = (1.0 - c.d as f64 / c.k as f64) * LN_2;
    let dims: Vec<usize> = sample_graphs(c)?
        .par_iter()
        .map(|(_, g)| c.n - g.parity_check_matrix().rank())
        .collect();
    let rates: Vec<f64> = dims.iter().map(|&dim| dim as f64 * LN_2 / c.n as f64).collect();
    let bound_ok: Vec<bool> = dims.iter().map(|&dim| dim * c.k >= (c.k - c.d) * c.n).collect();
    let rows = (0..c.trials)
        .map(|t| vec![t.to_string(), dims[t].to_string(), rates[t].to_string(), target.to_string(), bound_ok[t].to_string()])
        .collect();
    let (mean, ci) = mean_ci(&rates);
    let all_bounds = bound_ok.iter().all(|&b| b);
    let in_band = mean >= target - thresholds::ENTROPY_BELOW && mean <= target + thresholds::ENTROPY_ABOVE;
    Ok(ExperimentOutput {
        columns: cols(&["trial", "dimension", "rate_nats", "target_nats", "dimension_bound_holds"]),
        units: "rate_nats = (1/n) log|X_sigma| in nats".into(),
        rows,
        summary: json!({
            "mean_rate_nats": mean,
            "ci95_half_width": ci,
            "target_nats": target,
            "accept_band": [target - thresholds::ENTROPY_BELOW, target + thresholds::ENTROPY_ABOVE],
            "dimension_bound_all_trials": all_bounds,
        }),
        passed: Some(in_band && all_bounds),
        warnings: Vec::new(),
    })
}

/// `n+1` parameters: half the grid on `[0, 1]`, half on `[1, s_max]`.
fn split_grid(s_max: f64, grid: usize) -> Vec<f64> {
    let low = grid.div_ceil(2);
    let high = grid - low;
    let mut s: Vec<f64> = (0..=low).map(|j| j as f64 / low as f64).collect();
    s.extend((1..=high).map(|j| 1.0 + (s_max - 1.0) * j as f64 / high as f64));
    s
}

/// The parametrized growth curve with its small-density asymptotic.
pub fn cmd_growth_curve(c: &ExperimentConfig) -> Result<ExperimentOutput> {
    let points = growth_curve(c.d, c.k, &split_grid(c.s_max, c.grid), c.s_max)?;
    let mut rows = Vec::with_capacity(points.len());
    for p in &points {
        let asym = if p.t > 0.0 && p.t < 1.0 { growth_rate_asymptotic(c.d, c.k, p.t)?.to_string() } else { String::new() };
        rows.push(vec![p.s.to_string(), p.t.to_string(), p.z.to_string(), p.g.to_string(), asym]);
    }
    let small = growth_rate_at_density(c.d, c.k, thresholds::SMALL_DENSITY)?;
    let negative_near_zero = small < 0.0;
    let sign_ok = negative_near_zero == (c.d > 2);
    let root = growth_sign_change(c.d, c.k)?;
    let minimum = points.iter().min_by(|a, b| a.g.total_cmp(&b.g)).expect("nonempty grid");
    let half = if c.k % 2 == 0 {
        let g = growth_rate_at_density(c.d, c.k, 0.5)?;
        Some((g, (g - (1.0 - c.d as f64 / c.k as f64) * LN_2).abs()))
    } else {
        None
    };
    let half_ok = half.is_none_or(|(_, err)| err <= thresholds::HALF_DENSITY_TOL);
    Ok(ExperimentOutput {
        columns: cols(&["s", "t", "Z", "G_exact", "G_asymptotic"]),
        units: "t = density of ones; G in nats per vertex".into(),
        rows,
        summary: json!({
            "attainable_density_range": attainable_density_range(c.k, c.s_max),
            "g_at_small_density": { "t": thresholds::SMALL_DENSITY, "g": small },
            "negative_near_zero": negative_near_zero,
            "sign_change_density": root,
            "grid_minimum": { "s": minimum.s, "t": minimum.t, "g": minimum.g },
            "g_at_half": half.map(|(g, err)| json!({ "g": g, "abs_error": err })),
        }),
        passed: Some(sign_ok && half_ok),
        warnings: Vec::new(),
    })
}

/// Resolves the upper band edge: the explicit `delta`, else the sign
/// change of the growth curve.
pub fn shattering_delta(c: &ExperimentConfig) -> Result<f64> {
    match c.delta {
        Some(d) => Ok(d),
        None => growth_sign_change(c.d, c.k)?.ok_or_else(|| {
            Error::invalid(format!("growth curve for d={}, k={} has no negative region; pass --delta", c.d, c.k))
        }),
    }
}

/// Emptiness of the weight band `[ε, δ)` in X_σ^η across trials.
pub fn cmd_shattering(c: &ExperimentConfig) -> Result<ExperimentOutput> {
    let delta = shattering_delta(c)?;
    let graphs: Vec<FactorGraph> = sample_graphs(c)?.into_iter().map(|(_, g)| g).collect();
    let report = shattering_scan(&graphs, c.eps, delta, c.eta)?;
    let rows = report
        .trials
        .iter()
        .map(|t| {
            vec![
                t.trial.to_string(),
                t.dimension.to_string(),
                t.min_weight.map_or(String::new(), |w| w.to_string()),
                t.band_count.to_string(),
                t.band_empty.to_string(),
            ]
        })
        .collect();
    let mut band_hist = std::collections::BTreeMap::new();
    for t in &report.trials {
        *band_hist.entry(t.band_count).or_insert(0u64) += 1;
    }
    Ok(ExperimentOutput {
        columns: cols(&["trial", "dimension", "min_weight", "band_count", "band_empty"]),
        units: "band = normalized weights [eps, delta) (closed-open); weights in coordinates".into(),
        rows,
        summary: json!({
            "eps": c.eps,
            "delta": delta,
            "eta": c.eta,
            "band_weights": [
                crate::microstate::band_weights(c.n, c.eps, delta).start,
                crate::microstate::band_weights(c.n, c.eps, delta).end,
            ],
            "pass_fraction": report.pass_fraction,
            "required_pass_fraction": thresholds::SHATTERING_PASS,
            "band_count_histogram": band_hist,
        }),
        passed: Some(report.pass_fraction >= thresholds::SHATTERING_PASS),
        warnings: Vec::new(),
    })
}

/// r-proper fraction and per-part edge-marginal TV to the Haar edge weight.
pub fn cmd_proper_fraction(c: &ExperimentConfig) -> Result<ExperimentOutput> {
    let ball = BallCode::new(c.d, c.k, c.r)?;
    let results = (0..c.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(c.seed, t as u64);
            let (sigma, graph) = sample_permutation_model(c.n, c.d, c.k, &mut rng)?;
            let code = graph.parity_check_matrix().kernel_basis();
            let report = proper_fraction(&sigma, &code, &ball)?;
            let tv = edge_marginal_tv(&sigma, &code, c.codeword_samples, &mut rng)?;
            Ok((report, tv))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    let mut fractions = Vec::new();
    let mut tvs = Vec::new();
    for (t, (report, tv)) in results.iter().enumerate() {
        let tv_mean = tv.iter().sum::<f64>() / tv.len() as f64;
        let tv_max = tv.iter().cloned().fold(0.0, f64::max);
        rows.push(vec![
            t.to_string(),
            report.fraction.to_string(),
            (report.injective as f64 / report.n as f64).to_string(),
            tv_mean.to_string(),
            tv_max.to_string(),
        ]);
        fractions.push(report.fraction);
        tvs.push(tv_mean);
    }
    let (mean_proper, ci_proper) = mean_ci(&fractions);
    let (mean_tv, ci_tv) = mean_ci(&tvs);
    Ok(ExperimentOutput {
        columns: cols(&["trial", "proper_fraction", "injective_fraction", "edge_tv_mean", "edge_tv_max"]),
        units: "fractions of vertices; TV distance between probability laws on k-tuples".into(),
        rows,
        summary: json!({
            "radius": c.r,
            "ball_dimension": ball.dimension(),
            "mean_proper_fraction": mean_proper,
            "ci95_proper": ci_proper,
            "mean_edge_tv": mean_tv,
            "ci95_edge_tv": ci_tv,
            "codeword_samples_per_trial": c.codeword_samples,
            "required_proper_fraction": thresholds::PROPER_MEAN,
            "max_edge_tv": thresholds::EDGE_TV_MEAN,
        }),
        passed: Some(mean_proper >= thresholds::PROPER_MEAN && mean_tv <= thresholds::EDGE_TV_MEAN),
        warnings: Vec::new(),
    })
}

/// Projected entropy on `Vert_r(S)` for a greedy `2r`-separated set `S`.
pub fn cmd_property_m(c: &ExperimentConfig) -> Result<ExperimentOutput> {
    let ball = BallCode::new(c.d, c.k, c.r)?;
    let h_ball = ball.haar_marginal_entropy();
    let target = (c.density * c.n as f64).ceil() as usize;
    let results = (0..c.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(c.seed, t as u64);
            let (sigma, graph) = sample_permutation_model(c.n, c.d, c.k, &mut rng)?;
            let code = graph.parity_check_matrix().kernel_basis();
            let mut order: Vec<usize> = (0..c.n).collect();
            order.shuffle(&mut rng);
            let s = greedy_separated_set(&sigma, 2 * c.r, &order, Some(target));
            let h = property_m_entropy(&graph, &code, &s, c.r)?;
            Ok((s.len(), h))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    let mut all_ok = true;
    let mut min_ratio = f64::INFINITY;
    for (t, &(size, h)) in results.iter().enumerate() {
        let full = size as f64 * h_ball;
        let ratio = if full > 0.0 { h / full } else { f64::NAN };
        let ok = size >= target && h >= thresholds::PROPERTY_M_RATIO * full;
        all_ok &= ok;
        min_ratio = min_ratio.min(ratio);
        rows.push(vec![t.to_string(), size.to_string(), h.to_string(), full.to_string(), ratio.to_string(), ok.to_string()]);
    }
    Ok(ExperimentOutput {
        columns: cols(&["trial", "set_size", "projected_entropy_nats", "size_times_ball_entropy_nats", "ratio", "passes"]),
        units: "entropies in nats".into(),
        rows,
        summary: json!({
            "radius": c.r,
            "target_set_size": target,
            "ball_entropy_nats": h_ball,
            "min_ratio": min_ratio,
            "required_ratio": thresholds::PROPERTY_M_RATIO,
        }),
        passed: Some(all_ok),
        warnings: Vec::new(),
    })
}

/// Double covers in ker 𝐇ᵀ for the permutation and the uniform model.
pub fn cmd_contiguity(c: &ExperimentConfig) -> Result<ExperimentOutput> {
    let results = (0..c.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(c.seed, t as u64);
            let (_, perm) = sample_permutation_model(c.n, c.d, c.k, &mut rng)?;
            let unif = sample_uniform_model(c.n, c.d, c.k, DEFAULT_UNIFORM_RETRIES, &mut rng)?;
            Ok([
                (transpose_kernel_dim(&perm), detect_double_cover(&perm)?),
                (transpose_kernel_dim(&unif), detect_double_cover(&unif)?),
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    for (t, pair) in results.iter().enumerate() {
        for (model, (dim, cover)) in ["permutation", "uniform"].iter().zip(pair) {
            rows.push(vec![t.to_string(), model.to_string(), dim.to_string(), cover.to_string()]);
        }
    }
    let frac = |m: usize| results.iter().filter(|p| p[m].1).count() as f64 / results.len() as f64;
    let (perm_frac, unif_frac) = (frac(0), frac(1));
    let min_perm_dim = results.iter().map(|p| p[0].0).min().unwrap_or(0);
    let unif_dims: Vec<usize> = results.iter().map(|p| p[1].0).collect();
    Ok(ExperimentOutput {
        columns: cols(&["trial", "model", "transpose_kernel_dim", "double_cover"]),
        units: "dimensions over GF(2)".into(),
        rows,
        summary: json!({
            "permutation_double_cover_fraction": perm_frac,
            "uniform_double_cover_fraction": unif_frac,
            "min_permutation_kernel_dim": min_perm_dim,
            "uniform_kernel_dims": unif_dims,
            "max_uniform_fraction": thresholds::DOUBLE_COVER_UNIFORM,
        }),
        passed: Some(perm_frac == 1.0 && unif_frac <= thresholds::DOUBLE_COVER_UNIFORM && min_perm_dim + 1 >= c.d),
        warnings: Vec::new(),
    })
}

/// Exact first moments for every realizable weight, cross-checked by
/// exhaustive enumeration when it is small enough.
pub fn cmd_expected_count(c: &ExperimentConfig) -> Result<ExperimentOutput> {
    let weights = enumerate_realizable_weights(c.d, c.k, c.n / c.k)?;
    let values: Vec<BigRational> = weights.par_iter().map(exact_expected_count).collect();
    let total: BigRational = values.iter().sum();
    let all_labelings = BigRational::from_integer(BigInt::from(2u32).pow(c.n as u32));
    let brute = match brute_force_expected_counts(c.d, c.k, c.n) {
        Ok(b) => Some(b),
        Err(Error::Resource(_)) | Err(Error::InvalidParameter(_)) => None,
        Err(e) => return Err(e),
    };
    let mut rows = Vec::new();
    let mut agree = true;
    for (i, (w, e)) in weights.iter().zip(&values).enumerate() {
        let brute_value = brute.as_ref().map(|b| b.get(w).cloned().unwrap_or_else(BigRational::zero));
        if let Some(b) = &brute_value {
            agree &= b == e;
        }
        rows.push(vec![
            i.to_string(),
            w.vertex_counts()[1].to_string(),
            e.to_string(),
            (ln_big_rational(e) / c.n as f64).to_string(),
            brute_value.map_or(String::new(), |b| b.to_string()),
        ]);
    }
    if let Some(b) = &brute {
        agree &= b.len() == weights.len();
    }
    let sum_ok = total == all_labelings;
    Ok(ExperimentOutput {
        columns: cols(&["weight_index", "ones", "expected_count", "log_expected_per_vertex_nats", "brute_force"]),
        units: "expected counts are exact rationals; logs in nats per vertex".into(),
        rows,
        summary: json!({
            "realizable_weights": weights.len(),
            "sum_of_expected_counts": total.to_string(),
            "sum_equals_all_labelings": sum_ok,
            "brute_force_checked": brute.is_some(),
            "brute_force_agrees": brute.as_ref().map(|_| agree),
        }),
        passed: Some(sum_ok && agree),
        warnings: Vec::new(),
    })
}

/// Flags near-cancellations in conditioned samples around a small check set.
pub fn cmd_near_cancellation(c: &ExperimentConfig) -> Result<ExperimentOutput> {
    let delta = c.delta.unwrap_or(0.01);
    let target = (c.density * c.n as f64).ceil() as usize;
    let reports = (0..c.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(c.seed, t as u64);
            let (_, base) = sample_permutation_model(c.n, c.d, c.k, &mut rng)?;
            let f = select_check_set(&base, target, &mut rng)?;
            let partial = base.restrict(&f)?;
            let (_, graph) = sample_conditioned(&partial, &mut rng)?;
            near_cancellation_search(&graph, &f, c.eps, delta)
        })
        .collect::<Result<Vec<_>>>()?;
    let rows = reports
        .iter()
        .enumerate()
        .map(|(t, r)| {
            vec![t.to_string(), r.w.to_string(), r.kernel_dim.to_string(), r.examined.to_string(), r.flagged.to_string()]
        })
        .collect();
    let flagged = reports.iter().filter(|r| r.flagged > 0).count() as f64 / reports.len() as f64;
    Ok(ExperimentOutput {
        columns: cols(&["trial", "w", "kernel_dim", "examined", "flagged"]),
        units: "counts of vertices, dimensions over GF(2), counts of kernel vectors".into(),
        rows,
        summary: json!({
            "eps": c.eps,
            "delta": delta,
            "target_w": target,
            "threshold": reports.first().map(|r| r.threshold),
            "flagged_trial_fraction": flagged,
            "max_flagged_fraction": thresholds::NEAR_CANCELLATION,
        }),
        passed: Some(flagged <= thresholds::NEAR_CANCELLATION),
        warnings: Vec::new(),
    })
}
