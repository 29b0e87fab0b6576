#include <cmath>

#include "doctest.h"

#include "core/rng.hpp"

using merank::Rng;
using merank::derive_rng;

TEST_CASE("identical seeds replay identical streams") {
    Rng a = derive_rng(42, "test", "x");
    Rng b = derive_rng(42, "test", "x");
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("domain and id separation") {
    CHECK(derive_rng(1, "a").next_u64() != derive_rng(1, "b").next_u64());
    CHECK(derive_rng(1, "a", "x").next_u64() != derive_rng(1, "a", "y").next_u64());
    CHECK(derive_rng(1, "a").next_u64() != derive_rng(2, "a").next_u64());
}

TEST_CASE("next_unit stays in the open interval") {
    Rng rng(7);
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.next_unit();
        CHECK(u > 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("next_below is in range and hits every value") {
    Rng rng(3);
    bool seen[7] = {};
    for (int i = 0; i < 2000; ++i) {
        const std::uint64_t v = rng.next_below(7);
        REQUIRE(v < 7);
        seen[v] = true;
    }
    for (bool s : seen) CHECK(s);
}

TEST_CASE("gaussians have sane first moments") {
    Rng rng(11);
    double sum = 0.0, sumsq = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const double g = rng.next_gaussian();
        sum += g;
        sumsq += g * g;
    }
    CHECK(std::abs(sum / n) < 0.03);
    CHECK(sumsq / n == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("shuffle is a permutation and seed-stable") {
    std::vector<int> v{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    Rng rng(5);
    rng.shuffle(v);
    std::vector<int> sorted = v;
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted == std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9});

    std::vector<int> w{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    Rng rng2(5);
    rng2.shuffle(w);
    CHECK(v == w);
}

TEST_CASE("fnv1a64 reference value") {
    // Published FNV-1a test vector.
    CHECK(merank::fnv1a64("a") == 0xaf63dc4c8601ec8cull);
    CHECK(merank::fnv1a64("") == 0xcbf29ce484222325ull);
}
