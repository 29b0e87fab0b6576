#pragma once

#include <span>

#include "core/probit.hpp"
#include "core/types.hpp"

namespace merank {

// One neighbor's contribution: its stored score (a fixed constant from
// memory) and the comparator's soft preference P(query > neighbor),
// already clipped strictly inside (0,1).
struct PreferenceEvidence {
    double neighbor_score = 0.0;
    double preference = 0.5;
};

enum class FusionMode { Exact, ClosedForm };

struct FusionConfig {
    double lambda = 0.01;     // tether weight toward the initial score
    double prob_clip = 1e-6;  // epsilon_p used when evidence is assembled
    FusionMode mode = FusionMode::Exact;
    ScoreRange range;         // refined scores are clamped into this range

    void validate() const;
};

// Binary cross-entropy of the probit model against the soft preferences,
// plus the quadratic tether:
//
//   sum_j [ -y_j log Phi(s - s_j) - (1-y_j) log(1 - Phi(s - s_j)) ]
//   + lambda (s - initial)^2
//
// Stable for |s - s_j| well beyond 30. Convex in s; strictly convex for
// lambda > 0.
double objective(double s, double initial, std::span<const PreferenceEvidence> evidence,
                 double lambda);

// d objective / d s, using inverse-Mills-ratio terms evaluated in log space.
double gradient(double s, double initial, std::span<const PreferenceEvidence> evidence,
                double lambda);

// d^2 objective / d s^2 (always >= 2*lambda).
double hessian(double s, double initial, std::span<const PreferenceEvidence> evidence,
               double lambda);

// Global minimizer of the objective: derivative sign change bracketed over
// [lo-2, hi+2], then safeguarded Newton/bisection to |gradient| <= 1e-10,
// clamped into the score range. Throws Numeric after 200 iterations
// without convergence (unreachable in practice; tests assert this).
double fuse_exact(double initial, std::span<const PreferenceEvidence> evidence,
                  const FusionConfig& cfg);

// Probit linearization: each preference becomes the pseudo-observation
// mu_j = s_j + Phi^-1(y_j), and the refined score is the ridge solution
// (sum_j mu_j + lambda * initial) / (K + lambda), clamped.
double fuse_closed_form(double initial, std::span<const PreferenceEvidence> evidence,
                        const FusionConfig& cfg);

// Dispatch on cfg.mode.
double fuse(double initial, std::span<const PreferenceEvidence> evidence,
            const FusionConfig& cfg);

}  // namespace merank
