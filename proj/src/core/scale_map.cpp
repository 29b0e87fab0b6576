#include "core/scale_map.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "core/rng.hpp"

namespace merank {

namespace {

// Logistic term 1/2 - 1/(1+exp(t)), evaluated without overflow. Equal to
// 0.5 * tanh(t/2), which is the numerically convenient form.
double logistic_term(double t) {
    return 0.5 * std::tanh(0.5 * t);
}

double map_unclamped(double raw, const LogisticParams& p) {
    return p.beta1 * logistic_term(p.beta2 * (raw - p.beta3)) + p.beta4 * raw + p.beta5;
}

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
};

LinearFit linear_least_squares(std::span<const std::pair<double, double>> pairs) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(pairs.size());
    for (const auto& [x, y] : pairs) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double denom = n * sxx - sx * sx;
    LinearFit f;
    if (std::abs(denom) < 1e-300) {
        f.slope = 0.0;
        f.intercept = sy / n;
    } else {
        f.slope = (n * sxy - sx * sy) / denom;
        f.intercept = (sy - f.slope * sx) / n;
    }
    return f;
}

double mse(const std::array<double, 5>& beta, std::span<const std::pair<double, double>> pairs,
           const LogisticParams& base, ScoreRange range) {
    LogisticParams p = base;
    p.beta1 = beta[0];
    p.beta2 = beta[1];
    p.beta3 = beta[2];
    p.beta4 = beta[3];
    p.beta5 = beta[4];
    double acc = 0.0;
    for (const auto& [x, y] : pairs) {
        const double d = range.clamp(map_unclamped(x, p)) - y;
        acc += d * d;
    }
    return acc / static_cast<double>(pairs.size());
}

// Nelder-Mead over the five coefficients. Plain reflect/expand/contract/
// shrink with standard coefficients; stops after max_iter or when the
// relative spread of simplex values drops below rel_tol.
std::array<double, 5> nelder_mead(const std::function<double(const std::array<double, 5>&)>& f,
                                  std::array<double, 5> start, double step, int max_iter,
                                  double rel_tol) {
    constexpr int n = 5;
    std::vector<std::array<double, 5>> pts(n + 1, start);
    std::vector<double> vals(n + 1);
    for (int i = 0; i < n; ++i) {
        pts[i + 1][i] += (start[i] != 0.0 ? 0.1 * std::abs(start[i]) + step : step);
    }
    for (int i = 0; i <= n; ++i) vals[i] = f(pts[i]);

    auto order = [&] {
        std::vector<int> idx(n + 1);
        for (int i = 0; i <= n; ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](int a, int b) { return vals[a] < vals[b]; });
        std::vector<std::array<double, 5>> p2(n + 1);
        std::vector<double> v2(n + 1);
        for (int i = 0; i <= n; ++i) {
            p2[i] = pts[idx[i]];
            v2[i] = vals[idx[i]];
        }
        pts.swap(p2);
        vals.swap(v2);
    };

    order();
    for (int iter = 0; iter < max_iter; ++iter) {
        const double spread = std::abs(vals[n] - vals[0]);
        if (spread <= rel_tol * (std::abs(vals[0]) + rel_tol)) break;

        std::array<double, 5> centroid{};
        for (int i = 0; i < n; ++i)
            for (int d = 0; d < n; ++d) centroid[d] += pts[i][d] / n;

        auto at = [&](double coef) {
            std::array<double, 5> q;
            for (int d = 0; d < n; ++d) q[d] = centroid[d] + coef * (pts[n][d] - centroid[d]);
            return q;
        };

        const auto refl = at(-1.0);
        const double f_refl = f(refl);
        if (f_refl < vals[0]) {
            const auto expd = at(-2.0);
            const double f_expd = f(expd);
            if (f_expd < f_refl) {
                pts[n] = expd;
                vals[n] = f_expd;
            } else {
                pts[n] = refl;
                vals[n] = f_refl;
            }
        } else if (f_refl < vals[n - 1]) {
            pts[n] = refl;
            vals[n] = f_refl;
        } else {
            const auto contr = at(f_refl < vals[n] ? -0.5 : 0.5);
            const double f_contr = f(contr);
            if (f_contr < std::min(f_refl, vals[n])) {
                pts[n] = contr;
                vals[n] = f_contr;
            } else {
                for (int i = 1; i <= n; ++i) {
                    for (int d = 0; d < n; ++d) pts[i][d] = pts[0][d] + 0.5 * (pts[i][d] - pts[0][d]);
                    vals[i] = f(pts[i]);
                }
            }
        }
        order();
    }
    return pts[0];
}

}  // namespace

void LogisticParams::validate() const {
    for (double b : {beta1, beta2, beta3, beta4, beta5, raw_lo, raw_hi}) {
        if (!std::isfinite(b)) {
            fail(ErrorCode::InvalidArgument, "logistic parameters must be finite");
        }
    }
    if (beta2 == 0.0) {
        fail(ErrorCode::InvalidArgument, "beta2 must be nonzero");
    }
}

double logistic_map(double raw, const LogisticParams& params, ScoreRange range) {
    if (!std::isfinite(raw)) {
        fail(ErrorCode::InvalidArgument, "logistic_map: raw score must be finite");
    }
    params.validate();
    return range.clamp(map_unclamped(raw, params));
}

bool monotone_on_grid(const LogisticParams& params, ScoreRange range, int grid_points) {
    if (grid_points < 2) grid_points = 2;
    const double step = (params.raw_hi - params.raw_lo) / (grid_points - 1);
    double prev = range.clamp(map_unclamped(params.raw_lo, params));
    for (int i = 1; i < grid_points; ++i) {
        const double cur = range.clamp(map_unclamped(params.raw_lo + i * step, params));
        if (cur < prev - 1e-12) return false;
        prev = cur;
    }
    return true;
}

LogisticParams fit_logistic(std::span<const std::pair<double, double>> pairs, ScoreRange range) {
    range.validate();
    if (pairs.size() < 10) {
        fail(ErrorCode::Data, "fit_logistic: need at least 10 (raw, gt) pairs");
    }

    double raw_lo = pairs[0].first, raw_hi = pairs[0].first;
    double gt_lo = pairs[0].second, gt_hi = pairs[0].second;
    std::vector<double> raws;
    raws.reserve(pairs.size());
    for (const auto& [x, y] : pairs) {
        if (!std::isfinite(x) || !std::isfinite(y)) {
            fail(ErrorCode::Data, "fit_logistic: non-finite pair");
        }
        if (!range.contains(y)) {
            fail(ErrorCode::Data, "fit_logistic: gt value outside the score range");
        }
        raw_lo = std::min(raw_lo, x);
        raw_hi = std::max(raw_hi, x);
        gt_lo = std::min(gt_lo, y);
        gt_hi = std::max(gt_hi, y);
        raws.push_back(x);
    }
    if (raw_hi - raw_lo < 1e-12) {
        fail(ErrorCode::Data, "fit_logistic: raw scores are all identical");
    }

    LogisticParams base;
    base.raw_lo = raw_lo;
    base.raw_hi = raw_hi;

    const LinearFit lin = linear_least_squares(pairs);
    std::nth_element(raws.begin(), raws.begin() + raws.size() / 2, raws.end());
    const double raw_median = raws[raws.size() / 2];

    const std::array<double, 5> init = {gt_hi - gt_lo, 1.0, raw_median, lin.slope, lin.intercept};
    auto objective = [&](const std::array<double, 5>& beta) { return mse(beta, pairs, base, range); };

    std::array<double, 5> best = init;
    double best_val = objective(init);
    Rng rng = derive_rng(0x5ca1ab1eull, "fit_logistic");
    for (int restart = 0; restart < 5; ++restart) {
        std::array<double, 5> start = init;
        if (restart > 0) {
            for (double& v : start) v += 0.3 * rng.next_gaussian() * (std::abs(v) + 0.5);
        }
        const auto cand = nelder_mead(objective, start, 0.25, 2000, 1e-10);
        const double val = objective(cand);
        if (val < best_val) {
            best_val = val;
            best = cand;
        }
    }

    LogisticParams fitted = base;
    fitted.beta1 = best[0];
    fitted.beta2 = best[1];
    fitted.beta3 = best[2];
    fitted.beta4 = best[3];
    fitted.beta5 = best[4];

    const bool shape_ok = std::isfinite(fitted.beta2) && fitted.beta2 != 0.0;
    if (!shape_ok || !monotone_on_grid(fitted, range)) {
        // Linear fallback: drop the logistic term entirely.
        fitted.beta1 = 0.0;
        fitted.beta2 = 1.0;
        fitted.beta3 = 0.0;
        fitted.beta4 = lin.slope;
        fitted.beta5 = lin.intercept;
        if (fitted.beta4 < 0.0) {
            // A decreasing linear fit cannot pass the grid check; flatten to
            // the mean-level constant map instead.
            fitted.beta4 = 0.0;
            fitted.beta5 = lin.intercept + lin.slope * 0.5 * (raw_lo + raw_hi);
        }
    }
    fitted.validate();
    return fitted;
}

}  // namespace merank
