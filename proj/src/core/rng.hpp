#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "core/probit.hpp"

namespace merank {

// 64-bit FNV-1a. Used wherever a platform-stable string hash is needed
// (std::hash is not reproducible across standard libraries).
constexpr std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Deterministic, platform-independent generator. All randomness in the
// project flows through this type so that seeded runs replay bit-exactly
// on any toolchain; none of the distribution adapters in <random> are
// used because their outputs are implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {
        // decorrelate trivially related seeds
        splitmix64(state_);
    }

    std::uint64_t next_u64() { return splitmix64(state_); }

    // Uniform in the open interval (0,1).
    double next_unit() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Standard normal via the inverse CDF of a single uniform.
    double next_gaussian() { return normal_quantile(next_unit()); }

    // Unbiased integer in [0, bound) by rejection.
    std::uint64_t next_below(std::uint64_t bound) {
        const std::uint64_t threshold = (~bound + 1) % bound;  // 2^64 mod bound
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(next_below(i));
            using std::swap;
            swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t state_;
};

// Derives an independent stream for (seed, domain, id). Identical inputs
// give identical streams; distinct domains or ids decorrelate.
inline Rng derive_rng(std::uint64_t seed, std::string_view domain, std::string_view id = {}) {
    std::uint64_t s = seed ^ 0x6a09e667f3bcc908ull;
    s = splitmix64(s) ^ fnv1a64(domain);
    s = splitmix64(s) ^ fnv1a64(id);
    return Rng(s);
}

}  // namespace merank
