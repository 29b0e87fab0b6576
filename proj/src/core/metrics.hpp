#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "core/types.hpp"

namespace merank {

struct HistogramSpec {
    int bin_count = 100;
    ScoreRange range;

    void validate() const;
};

// Pearson linear correlation. Requires n >= 3 and non-constant inputs.
double plcc(std::span<const double> x, std::span<const double> y);

// Spearman rank correlation: Pearson over fractional (tie-averaged) ranks.
double srcc(std::span<const double> x, std::span<const double> y);

// Tie-averaged fractional ranks, 1-based.
std::vector<double> fractional_ranks(std::span<const double> x);

// Size-weighted average: sum(v_i * n_i) / sum(n_i).
double wavg(std::span<const double> values, std::span<const std::size_t> sizes);

// Normalized counts over equal-width bins; the last bin is right-closed.
// Out-of-range values are clamped with a warning.
std::vector<double> histogram(std::span<const double> values, const HistogramSpec& spec);

// Base-2 Jensen-Shannon divergence between probability vectors, in [0,1].
double js_divergence(std::span<const double> p, std::span<const double> q);

// Shannon entropy in nats and exp(entropy), the effective bin count.
struct EntropyResult {
    double entropy = 0.0;
    double effective_bins = 1.0;
};
EntropyResult entropy_and_effective_bins(std::span<const double> p);

// Full distribution-vs-reference summary for one prediction column.
struct EvalReport {
    double plcc = 0.0;
    double srcc = 0.0;
    double js = 0.0;
    double entropy = 0.0;
    double effective_bins = 1.0;
    std::size_t n = 0;
    std::vector<double> pred_hist;
    std::vector<double> ref_hist;
};
EvalReport evaluate(std::span<const double> predictions, std::span<const double> references,
                    const HistogramSpec& spec);

// Order-robustness harness: runs a caller-supplied pipeline closure on
// n_runs seeded permutations of [0, n_items) and reports mean and sample
// std of each metric the closure returns.
struct MetricSample {
    double plcc = 0.0;
    double srcc = 0.0;
};
struct RobustnessStat {
    double mean = 0.0;
    double stdev = 0.0;
};
struct RobustnessReport {
    RobustnessStat plcc;
    RobustnessStat srcc;
    int runs = 0;
};
RobustnessReport order_robustness(
    std::size_t n_items, int n_runs, std::uint64_t seed,
    const std::function<MetricSample(const std::vector<std::size_t>&)>& run_on_permutation);

}  // namespace merank
