#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "core/error.hpp"

namespace merank {

// Closed score interval, [1,5] unless configured otherwise.
struct ScoreRange {
    double lo = 1.0;
    double hi = 5.0;

    double clamp(double v) const { return v < lo ? lo : (v > hi ? hi : v); }
    bool contains(double v) const { return v >= lo && v <= hi; }
    double width() const { return hi - lo; }

    void validate() const {
        if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
            fail(ErrorCode::InvalidArgument, "score range must satisfy lo < hi and be finite");
        }
    }
};

// Opaque handle to an image. The payload is whatever the backend can
// resolve: a file path, a URL, or a synthetic-item key.
struct ImageRef {
    std::string id;
    std::string payload;
};

struct Assessment {
    std::string reasoning;
    double raw_score = 0.0;
};

struct Embedding {
    std::vector<double> values;

    std::size_t dim() const { return values.size(); }

    double norm() const {
        double s = 0.0;
        for (double v : values) s += v * v;
        return std::sqrt(s);
    }

    // Scales to unit L2 norm in place. A zero vector cannot be normalized.
    void normalize() {
        const double n = norm();
        if (n < 1e-300) {
            fail(ErrorCode::InvalidArgument, "cannot normalize zero-length embedding");
        }
        for (double& v : values) v /= n;
    }
};

}  // namespace merank
