#include <doctest.h>

#include <algorithm>
#include <atomic>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "qeeg/checksum.hpp"
#include "qeeg/parallel.hpp"
#include "qeeg/rng.hpp"

using namespace qeeg;

TEST_CASE("derived seeds are stable and distinct") {
    CHECK(derive_seed(1, {2, 3}) == derive_seed(1, {2, 3}));
    CHECK(derive_seed(1, {2, 3}) != derive_seed(1, {3, 2}));
    CHECK(derive_seed(1, {2}) != derive_seed(2, {2}));
    CHECK(splitmix64(0) != 0);
}

TEST_CASE("rng streams reproduce") {
    Rng a(42);
    Rng b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.normal() == b.normal());
    Rng c(42);
    for (int i = 0; i < 1000; ++i) {
        const double u = c.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        CHECK(c.below(7) < 7);
    }
}

TEST_CASE("normal moments") {
    Rng r(9);
    double s = 0.0;
    double s2 = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double x = r.normal();
        s += x;
        s2 += x * x;
    }
    CHECK(std::abs(s / n) < 0.01);
    CHECK(std::abs(s2 / n - 1.0) < 0.02);
}

TEST_CASE("shuffle is a permutation") {
    std::vector<int> v(50);
    std::iota(v.begin(), v.end(), 0);
    Rng r(1);
    r.shuffle(v);
    auto sorted = v;
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < 50; ++i) CHECK(sorted[static_cast<std::size_t>(i)] == i);
}

TEST_CASE("parallel_for covers every index once") {
    for (std::size_t workers : {1u, 2u, 8u, 0u}) {
        std::vector<std::atomic<int>> hits(257);
        parallel_for(hits.size(), workers, [&](std::size_t i) { hits[i]++; });
        for (auto& h : hits) CHECK(h.load() == 1);
    }
    parallel_for(0, 4, [](std::size_t) { FAIL("no work expected"); });
}

TEST_CASE("parallel_for rethrows") {
    CHECK_THROWS_AS(parallel_for(100, 4,
                                 [](std::size_t i) {
                                     if (i == 37) throw std::runtime_error("boom");
                                 }),
                    std::runtime_error);
}

TEST_CASE("fnv1a reference values") {
    CHECK(checksum_hex("") == "cbf29ce484222325");
    CHECK(checksum_hex("a") == "af63dc4c8601ec8c");
    CHECK(checksum_hex("foobar") == "85944171f73967e8");
}
