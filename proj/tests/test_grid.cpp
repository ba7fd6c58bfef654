#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "tfa/grid.hpp"

using namespace tfa;
using namespace tfa::testing;

TEST_CASE("grid sizes are powers of two, at least 8") {
    CHECK(valid_grid_size(8));
    CHECK(valid_grid_size(64));
    CHECK(!valid_grid_size(0));
    CHECK(!valid_grid_size(4));
    CHECK(!valid_grid_size(48));
    CHECK_THROWS(grid_function(12));
}

TEST_CASE("constant function transforms to a delta at frequency zero") {
    grid_function f(16);
    for (int k = 0; k < 16; ++k) f[k] = cplx(3.5, -1.25);
    spectrum s = forward_transform(f);
    CHECK(std::abs(s.at(0) - cplx(3.5, -1.25)) < 1e-12);
    for (int xi = -8; xi < 8; ++xi) {
        if (xi != 0) CHECK(std::abs(s.at(xi)) < 1e-12);
    }
}

TEST_CASE("pure mode transforms to a unit coefficient at its frequency") {
    spectrum s = forward_transform(mode(16, 3));
    for (int xi = -8; xi < 8; ++xi) {
        cplx want = (xi == 3) ? cplx(1.0) : cplx(0.0);
        CHECK(std::abs(s.at(xi) - want) < 1e-12);
    }
    // Negative frequencies are honest members of the range, not aliases.
    spectrum s2 = forward_transform(mode(16, -8));
    CHECK(std::abs(s2.at(-8) - cplx(1.0)) < 1e-12);
}

TEST_CASE("point mass spreads evenly over the spectrum") {
    grid_function f(16);
    f[0] = 1.0;
    spectrum s = forward_transform(f);
    for (int xi = -8; xi < 8; ++xi) CHECK(std::abs(s.at(xi) - cplx(1.0 / 16.0)) < 1e-12);
}

TEST_CASE("transform agrees with the direct sum") {
    for (int n : {8, 32, 128}) {
        rng_stream rng(2024, n);
        grid_function f = random_function(n, rng);
        CHECK(max_abs_diff(forward_transform(f), dft_oracle(f)) < 1e-11);
    }
}

TEST_CASE("round trip reproduces samples within 1e-12") {
    for (int n : {8, 64, 256}) {
        rng_stream rng(7, n);
        grid_function f = random_function(n, rng);
        grid_function g = inverse_transform(forward_transform(f));
        CHECK(max_abs_diff(f, g) < 1e-12);
    }
}

TEST_CASE("modes are orthonormal under the normalized inner product") {
    const int n = 32;
    CHECK(std::abs(inner_product(mode(n, 5), mode(n, 5)) - cplx(1.0)) < 1e-12);
    CHECK(std::abs(inner_product(mode(n, 5), mode(n, -7))) < 1e-12);
    CHECK(std::abs(inner_product(mode(n, -16), mode(n, 0))) < 1e-12);
}

TEST_CASE("inner product is linear in the first slot, conjugate-linear in the second") {
    const int n = 16;
    rng_stream rng(11, 0);
    grid_function f = random_function(n, rng);
    grid_function g = random_function(n, rng);
    const cplx a(0.75, -2.0);
    grid_function af(n), ag(n);
    for (int k = 0; k < n; ++k) {
        af[k] = a * f[k];
        ag[k] = a * g[k];
    }
    CHECK(std::abs(inner_product(af, g) - a * inner_product(f, g)) < 1e-12);
    CHECK(std::abs(inner_product(f, ag) - std::conj(a) * inner_product(f, g)) < 1e-12);
}

TEST_CASE("Parseval holds at several sizes") {
    for (int n : {16, 64, 256}) {
        rng_stream rng(100, n);
        grid_function f = random_function(n, rng);
        double lhs = norm_l2(forward_transform(f));
        double rhs = norm_l2(f);
        CHECK(std::abs(lhs - rhs) < 1e-12);
    }
}

TEST_CASE("maximal function of a constant is its absolute value") {
    grid_function f(32);
    for (int k = 0; k < 32; ++k) f[k] = cplx(-2.0, 0.0);
    grid_function m = dyadic_maximal(f);
    for (int k = 0; k < 32; ++k) CHECK(m[k].real() == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("maximal function of a point mass follows the containing-interval sizes") {
    // f puts mass 8 at x_0 on an 8-point grid. The best interval for x_k is
    // the smallest dyadic interval containing both x_0 and x_k.
    grid_function f(8);
    f[0] = 8.0;
    grid_function m = dyadic_maximal(f);
    const double want[8] = {8.0, 4.0, 2.0, 2.0, 1.0, 1.0, 1.0, 1.0};
    for (int k = 0; k < 8; ++k) CHECK(m[k].real() == doctest::Approx(want[k]).epsilon(1e-12));
}

TEST_CASE("maximal function matches a containment-scan oracle") {
    const int n = 64;
    rng_stream rng(55, 0);
    grid_function f = random_function(n, rng);
    grid_function got = dyadic_maximal(f);
    // Oracle: test every dyadic interval for containment of x_k directly.
    for (int k = 0; k < n; ++k) {
        double best = 0.0;
        for (int l = 0; (1 << l) <= n; ++l) {
            int pieces = 1 << l;
            for (int mdx = 0; mdx < pieces; ++mdx) {
                double lo = double(mdx) / pieces, hi = double(mdx + 1) / pieces;
                double x = double(k) / n;
                if (!(x >= lo && x < hi)) continue;
                double acc = 0.0;
                int cnt = 0;
                for (int j = 0; j < n; ++j) {
                    double xj = double(j) / n;
                    if (xj >= lo && xj < hi) {
                        acc += std::abs(f[j]);
                        ++cnt;
                    }
                }
                best = std::max(best, acc / cnt);
            }
        }
        CHECK(std::abs(got[k].real() - best) < 1e-12);
    }
}

TEST_CASE("cutoff validation enforces the inclusive frequency range") {
    cutoff_function cut(16, 8);
    CHECK_NOTHROW(cut.validate());
    cut[3] = 9;
    CHECK_THROWS(cut.validate());
    cut[3] = -8;
    CHECK_NOTHROW(cut.validate());
    cut[3] = -9;
    CHECK_THROWS(cut.validate());
}
