#pragma once

// All numeric tolerances in one place.
namespace ndlhs::tol {

inline constexpr double boundary_guard = 1e-12;      // level bucketing near stratum edges
inline constexpr double reconstruction = 1e-12;      // decompose round trip
inline constexpr double integer_guard = 1e-12;       // order-statistic index alpha*n
inline constexpr double prob_sum = 1e-12;            // marginal probabilities total
inline constexpr double report_consistency = 1e-12;  // summary vs per-replicate rows on load
inline constexpr double pivot_min = 1e-11;           // simplex pivot breakdown
inline constexpr double reduced_cost = 1e-9;         // simplex optimality threshold
inline constexpr double primal_feas = 1e-8;          // scaled by 1 + |b|_inf
inline constexpr double dual_feas = 1e-8;            // scaled by 1 + |c|_inf
inline constexpr double duality_gap = 1e-7;          // scaled by 1 + |value|
inline constexpr double trend_flat = 1e-11;          // monotonicity probe deltas

}  // namespace ndlhs::tol
