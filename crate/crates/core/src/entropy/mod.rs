//! Entropy functionals: Shannon quantities, hyper-edge weights and their
//! Kikuchi entropy, exact first-moment counts, and the codeword growth curve.
//! Everything is in nats.

mod count;
mod growth;
mod info;
pub(crate) mod weight;

pub use count::{
    brute_force_expected_counts, enumerate_realizable_weights, enumerate_uniform_permutations, exact_expected_count,
    ln_big_rational, WeightCounts,
};
pub use growth::{
    attainable_density_range, cancellation_exponent, growth_curve, growth_maximizer_weight, growth_point,
    growth_rate_asymptotic, growth_rate_at_density, growth_rate_at_density_with_max, growth_sign_change,
    invert_density, uniform_s_grid, GrowthCurvePoint, DEFAULT_S_MAX,
};
pub use info::{binary_entropy, rokhlin_distance, shannon_entropy, total_correlation, JointDistribution};
pub use weight::{
    empirical_weight, kikuchi_entropy, rotate_index, tuple_from_index, tuple_index, HyperedgeWeight,
    CONSISTENCY_TOL,
};
