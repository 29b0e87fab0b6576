#include "core/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "core/rng.hpp"

namespace merank {

namespace {

void check_pair(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        fail(ErrorCode::InvalidArgument, "correlation inputs must have equal length");
    }
    if (x.size() < 3) {
        fail(ErrorCode::InvalidArgument, "correlation needs at least 3 samples");
    }
}

void check_probability_vector(std::span<const double> p) {
    double sum = 0.0;
    for (double v : p) {
        if (v < 0.0) fail(ErrorCode::InvalidArgument, "probability vector has negative mass");
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        fail(ErrorCode::InvalidArgument, "probability vector does not sum to 1");
    }
}

}  // namespace

void HistogramSpec::validate() const {
    if (bin_count < 2) fail(ErrorCode::InvalidArgument, "histogram needs at least 2 bins");
    range.validate();
}

double plcc(std::span<const double> x, std::span<const double> y) {
    check_pair(x, y);
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx <= 0.0 || syy <= 0.0) {
        fail(ErrorCode::InvalidArgument, "correlation undefined for a constant input");
    }
    return sxy / std::sqrt(sxx * syy);
}

std::vector<double> fractional_ranks(std::span<const double> x) {
    const std::size_t n = x.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && x[order[j + 1]] == x[order[i]]) ++j;
        const double avg = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

double srcc(std::span<const double> x, std::span<const double> y) {
    check_pair(x, y);
    const auto rx = fractional_ranks(x);
    const auto ry = fractional_ranks(y);
    return plcc(rx, ry);
}

double wavg(std::span<const double> values, std::span<const std::size_t> sizes) {
    if (values.empty() || values.size() != sizes.size()) {
        fail(ErrorCode::InvalidArgument, "wavg needs matching nonempty value/size lists");
    }
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (sizes[i] == 0) fail(ErrorCode::InvalidArgument, "wavg sizes must be positive");
        num += values[i] * static_cast<double>(sizes[i]);
        den += static_cast<double>(sizes[i]);
    }
    return num / den;
}

std::vector<double> histogram(std::span<const double> values, const HistogramSpec& spec) {
    spec.validate();
    if (values.empty()) fail(ErrorCode::InvalidArgument, "histogram of empty sample");
    std::vector<double> counts(static_cast<std::size_t>(spec.bin_count), 0.0);
    const double width = spec.range.width() / spec.bin_count;
    bool clamped = false;
    for (double v : values) {
        if (!spec.range.contains(v)) {
            clamped = true;
            v = spec.range.clamp(v);
        }
        int b = static_cast<int>(std::floor((v - spec.range.lo) / width));
        b = std::clamp(b, 0, spec.bin_count - 1);
        counts[static_cast<std::size_t>(b)] += 1.0;
    }
    if (clamped) {
        std::fprintf(stderr, "merank: warning: histogram values outside range were clamped\n");
    }
    const double n = static_cast<double>(values.size());
    for (double& c : counts) c /= n;
    return counts;
}

double js_divergence(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) {
        fail(ErrorCode::InvalidArgument, "js_divergence inputs must have equal length");
    }
    check_probability_vector(p);
    check_probability_vector(q);
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double m = 0.5 * (p[i] + q[i]);
        if (p[i] > 0.0) acc += 0.5 * p[i] * std::log2(p[i] / m);
        if (q[i] > 0.0) acc += 0.5 * q[i] * std::log2(q[i] / m);
    }
    return acc;
}

EntropyResult entropy_and_effective_bins(std::span<const double> p) {
    check_probability_vector(p);
    double h = 0.0;
    for (double v : p) {
        if (v > 0.0) h -= v * std::log(v);
    }
    return {h, std::exp(h)};
}

EvalReport evaluate(std::span<const double> predictions, std::span<const double> references,
                    const HistogramSpec& spec) {
    EvalReport r;
    r.n = predictions.size();
    r.plcc = plcc(predictions, references);
    r.srcc = srcc(predictions, references);
    r.pred_hist = histogram(predictions, spec);
    r.ref_hist = histogram(references, spec);
    r.js = js_divergence(r.pred_hist, r.ref_hist);
    const auto ent = entropy_and_effective_bins(r.pred_hist);
    r.entropy = ent.entropy;
    r.effective_bins = ent.effective_bins;
    return r;
}

RobustnessReport order_robustness(
    std::size_t n_items, int n_runs, std::uint64_t seed,
    const std::function<MetricSample(const std::vector<std::size_t>&)>& run_on_permutation) {
    if (n_runs < 2) fail(ErrorCode::InvalidArgument, "order_robustness needs n_runs >= 2");
    if (n_items == 0) fail(ErrorCode::InvalidArgument, "order_robustness needs a nonempty stream");

    std::vector<double> plccs, srccs;
    for (int run = 0; run < n_runs; ++run) {
        std::vector<std::size_t> perm(n_items);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        Rng rng = derive_rng(seed, "permutation", std::to_string(run));
        rng.shuffle(perm);
        const MetricSample sample = run_on_permutation(perm);
        plccs.push_back(sample.plcc);
        srccs.push_back(sample.srcc);
    }

    auto stat = [](const std::vector<double>& v) {
        const double n = static_cast<double>(v.size());
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= n;
        double ss = 0.0;
        for (double x : v) ss += (x - mean) * (x - mean);
        return RobustnessStat{mean, std::sqrt(ss / (n - 1.0))};
    };
    return {stat(plccs), stat(srccs), n_runs};
}

}  // namespace merank
