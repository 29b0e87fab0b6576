#include "core/fusion.hpp"

#include <cmath>

namespace merank {

namespace {

void check_evidence(std::span<const PreferenceEvidence> evidence, double lambda) {
    if (lambda < 0.0) fail(ErrorCode::InvalidArgument, "fusion lambda must be >= 0");
    for (const auto& e : evidence) {
        if (!(e.preference > 0.0) || !(e.preference < 1.0)) {
            fail(ErrorCode::InvalidArgument,
                 "preference probabilities must lie strictly inside (0,1)");
        }
        if (!std::isfinite(e.neighbor_score)) {
            fail(ErrorCode::InvalidArgument, "neighbor score must be finite");
        }
    }
}

// phi(d) / Phi(d), the inverse Mills ratio, stable in both tails.
double mills(double d) {
    return std::exp(-0.5 * d * d - 0.9189385332046727418 - log_normal_cdf(d));
}

}  // namespace

void FusionConfig::validate() const {
    range.validate();
    if (lambda < 0.0) fail(ErrorCode::InvalidArgument, "fusion lambda must be >= 0");
    if (!(prob_clip > 0.0) || prob_clip >= 0.5) {
        fail(ErrorCode::InvalidArgument, "prob_clip must lie in (0, 0.5)");
    }
}

double objective(double s, double initial, std::span<const PreferenceEvidence> evidence,
                 double lambda) {
    check_evidence(evidence, lambda);
    double acc = 0.0;
    for (const auto& e : evidence) {
        const double d = s - e.neighbor_score;
        acc += -e.preference * log_normal_cdf(d) - (1.0 - e.preference) * log_normal_cdf(-d);
    }
    const double t = s - initial;
    return acc + lambda * t * t;
}

double gradient(double s, double initial, std::span<const PreferenceEvidence> evidence,
                double lambda) {
    check_evidence(evidence, lambda);
    double acc = 0.0;
    for (const auto& e : evidence) {
        const double d = s - e.neighbor_score;
        acc += -e.preference * mills(d) + (1.0 - e.preference) * mills(-d);
    }
    return acc + 2.0 * lambda * (s - initial);
}

double hessian(double s, double initial, std::span<const PreferenceEvidence> evidence,
               double lambda) {
    (void)initial;
    check_evidence(evidence, lambda);
    double acc = 0.0;
    for (const auto& e : evidence) {
        const double d = s - e.neighbor_score;
        const double a = mills(d);
        const double b = mills(-d);
        acc += e.preference * a * (d + a) + (1.0 - e.preference) * b * (b - d);
    }
    return acc + 2.0 * lambda;
}

double fuse_exact(double initial, std::span<const PreferenceEvidence> evidence,
                  const FusionConfig& cfg) {
    cfg.validate();
    check_evidence(evidence, cfg.lambda);
    if (evidence.empty()) {
        if (cfg.lambda > 0.0) return cfg.range.clamp(initial);
        fail(ErrorCode::InvalidArgument, "fuse_exact: evidence empty and lambda == 0");
    }

    double a = cfg.range.lo - 2.0;
    double b = cfg.range.hi + 2.0;
    if (gradient(a, initial, evidence, cfg.lambda) >= 0.0) return cfg.range.lo;
    if (gradient(b, initial, evidence, cfg.lambda) <= 0.0) return cfg.range.hi;

    double s = 0.5 * (a + b);
    for (int iter = 0; iter < 200; ++iter) {
        const double g = gradient(s, initial, evidence, cfg.lambda);
        if (std::abs(g) <= 1e-10) return cfg.range.clamp(s);
        if (g < 0.0) {
            a = s;
        } else {
            b = s;
        }
        // For extreme tether weights no representable point reaches the
        // gradient tolerance; a machine-width bracket pins the minimizer
        // just as exactly.
        if (b - a <= 1e-15 * (1.0 + std::abs(s))) return cfg.range.clamp(0.5 * (a + b));
        const double h = hessian(s, initial, evidence, cfg.lambda);
        double next = h > 0.0 ? s - g / h : s;
        if (!(next > a) || !(next < b)) next = 0.5 * (a + b);  // safeguard
        s = next;
    }
    fail(ErrorCode::Numeric, "fuse_exact: no convergence after 200 iterations");
}

double fuse_closed_form(double initial, std::span<const PreferenceEvidence> evidence,
                        const FusionConfig& cfg) {
    cfg.validate();
    check_evidence(evidence, cfg.lambda);
    if (evidence.empty() && cfg.lambda == 0.0) {
        fail(ErrorCode::InvalidArgument, "fuse_closed_form: evidence empty and lambda == 0");
    }
    // Kahan-compensated sum keeps the result correctly rounded even at
    // large neighborhood sizes.
    double sum_mu = 0.0, comp = 0.0;
    for (const auto& e : evidence) {
        const double mu = e.neighbor_score + normal_quantile(e.preference);
        const double y = mu - comp;
        const double t = sum_mu + y;
        comp = (t - sum_mu) - y;
        sum_mu = t;
    }
    const double k = static_cast<double>(evidence.size());
    return cfg.range.clamp((sum_mu + cfg.lambda * initial) / (k + cfg.lambda));
}

double fuse(double initial, std::span<const PreferenceEvidence> evidence,
            const FusionConfig& cfg) {
    return cfg.mode == FusionMode::Exact ? fuse_exact(initial, evidence, cfg)
                                         : fuse_closed_form(initial, evidence, cfg);
}

}  // namespace merank
