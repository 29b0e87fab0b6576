#pragma once

#include <span>
#include <utility>

#include "core/types.hpp"

namespace merank {

// Coefficients of the five-parameter logistic score mapping
//
//   m(x) = beta1 * (1/2 - 1/(1 + exp(beta2 * (x - beta3)))) + beta4 * x + beta5
//
// together with the raw-score interval observed while fitting. The mapping
// is applied through logistic_map(), which clamps into the score range.
struct LogisticParams {
    double beta1 = 0.0;
    double beta2 = 1.0;
    double beta3 = 0.0;
    double beta4 = 1.0;
    double beta5 = 0.0;
    double raw_lo = 1.0;
    double raw_hi = 5.0;

    void validate() const;
};

// Applies the mapping and clamps the result into `range`.
// Throws InvalidArgument for non-finite input.
double logistic_map(double raw, const LogisticParams& params, ScoreRange range = {});

// True when the clamped mapping is non-decreasing on a uniform grid over
// [raw_lo, raw_hi].
bool monotone_on_grid(const LogisticParams& params, ScoreRange range, int grid_points = 1000);

// Least-squares fit of the mapping to (raw, gt) pairs via restarted
// Nelder-Mead simplex search. Requires at least 10 pairs, a non-degenerate
// raw column, and gt within `range`. If the optimum fails the monotone
// grid check the fit falls back to ordinary linear least squares
// (beta1 = 0), which always passes.
LogisticParams fit_logistic(std::span<const std::pair<double, double>> pairs,
                            ScoreRange range = {});

}  // namespace merank
