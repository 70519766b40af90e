#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "padic/catalog.hpp"
#include "padic/radii.hpp"

using namespace padic;

// The OpenMP kernels must agree with the serial reference paths and assemble
// results deterministically.

TEST_CASE("mul_parallel == mul_serial on large random operands") {
    std::mt19937_64 rng(404);
    std::uniform_int_distribution<int> e(-64, 64), c(-9, 9);
    for (int trial = 0; trial < 6; ++trial) {
        Laurent a(3), b(3);
        for (int k = 0; k < 120; ++k) {
            a.add_term({e(rng)}, Scalar(3, Rat(c(rng))));
            b.add_term({e(rng)}, Scalar(3, Rat(c(rng))));
        }
        CHECK(Laurent::mul_serial(a, b) == Laurent::mul_parallel(a, b));
    }
}

TEST_CASE("parallel profile equals a serial reference loop over the grid") {
    ExampleParams bp;
    bp.p = 5;
    DiffModule B = make_example("bessel", bp).module;
    std::vector<LogRadius> grid = {Rat(1, 4), Rat(1, 2), Rat(1), Rat(3, 2), Rat(2)};
    auto prof = radius_profile(B, 2, grid, 2);
    // serial reference: independent per-point evaluation in order
    for (size_t j = 0; j < grid.size(); ++j) {
        auto radii = newton_radii(B, grid[j], 2);
        auto ps = partial_sum(radii, 2);
        CHECK(prof.samples[j].lo == ps.lo);
        CHECK(prof.samples[j].hi == ps.hi);
        CHECK(prof.samples[j].exact == ps.exact);
    }
}

TEST_CASE("matrix product kernel matches a naive triple loop") {
    std::mt19937_64 rng(405);
    std::uniform_int_distribution<int> e(-3, 3), c(-5, 5);
    for (int trial = 0; trial < 4; ++trial) {
        unsigned n = 5;
        LMat A(n, n, 3), B(n, n, 3);
        for (unsigned i = 0; i < n; ++i)
            for (unsigned j = 0; j < n; ++j) {
                A.at(i, j) = Laurent::monomial(3, Scalar(3, Rat(c(rng))), e(rng));
                B.at(i, j) = Laurent::monomial(3, Scalar(3, Rat(c(rng))), e(rng));
            }
        LMat P = A * B;
        for (unsigned i = 0; i < n; ++i)
            for (unsigned j = 0; j < n; ++j) {
                Laurent acc(3);
                for (unsigned k = 0; k < n; ++k)
                    acc = acc + Laurent::mul_serial(A.at(i, k), B.at(k, j));
                CHECK(P.at(i, j) == acc);
            }
    }
}

TEST_CASE("thread count honors PADIC_ANNULUS_THREADS") {
    setenv("PADIC_ANNULUS_THREADS", "3", 1);
    CHECK(configured_threads() == 3);
    unsetenv("PADIC_ANNULUS_THREADS");
    CHECK(configured_threads() >= 1);
}
