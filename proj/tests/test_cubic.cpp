#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "mvg/cubic.hpp"
#include "mvg/rng.hpp"

using namespace mvg;

namespace {

double eval(double c3, double c2, double c1, double c0, double z) {
    return ((c3 * z + c2) * z + c1) * z + c0;
}

// Independent oracle: sign-change scan plus bisection over a wide bracket.
std::vector<double> bisect_roots(double c3, double c2, double c1, double c0) {
    std::vector<double> roots;
    const double lo = -1e4, hi = 1e4;
    const int cells = 400000;
    double prev_z = lo, prev_f = eval(c3, c2, c1, c0, lo);
    for (int k = 1; k <= cells; ++k) {
        const double z = lo + (hi - lo) * k / cells;
        const double f = eval(c3, c2, c1, c0, z);
        if (prev_f == 0.0) roots.push_back(prev_z);
        if (prev_f * f < 0.0) {
            double a = prev_z, b = z;
            for (int it = 0; it < 200; ++it) {
                const double m = 0.5 * (a + b);
                if (eval(c3, c2, c1, c0, a) * eval(c3, c2, c1, c0, m) <= 0.0)
                    b = m;
                else
                    a = m;
            }
            roots.push_back(0.5 * (a + b));
        }
        prev_z = z;
        prev_f = f;
    }
    return roots;
}

}  // namespace

TEST_CASE("distinct integer roots") {
    // (z-1)(z-2)(z-3) = z^3 - 6z^2 + 11z - 6
    const auto r = real_cubic_roots(1, -6, 11, -6);
    REQUIRE(r.size() == 3);
    CHECK(r[0] == doctest::Approx(1.0));
    CHECK(r[1] == doctest::Approx(2.0));
    CHECK(r[2] == doctest::Approx(3.0));
}

TEST_CASE("single real root") {
    // z^3 + z + 1 has one real root near -0.6823
    const auto r = real_cubic_roots(1, 0, 1, 1);
    REQUIRE(r.size() == 1);
    CHECK(eval(1, 0, 1, 1, r[0]) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("double root deduplicated") {
    // (z-2)^2 (z+1) = z^3 - 3z^2 + 4
    const auto r = real_cubic_roots(1, -3, 0, 4);
    REQUIRE(r.size() == 2);
    CHECK(r[0] == doctest::Approx(-1.0));
    CHECK(r[1] == doctest::Approx(2.0).epsilon(1e-5));
}

TEST_CASE("quadratic and linear fallbacks") {
    auto r = real_cubic_roots(0, 1, -3, 2);  // (z-1)(z-2)
    REQUIRE(r.size() == 2);
    CHECK(r[0] == doctest::Approx(1.0));
    CHECK(r[1] == doctest::Approx(2.0));

    r = real_cubic_roots(0, 0, 2, -4);
    REQUIRE(r.size() == 1);
    CHECK(r[0] == doctest::Approx(2.0));

    r = real_cubic_roots(0, 1, 0, 1);  // z^2 + 1: no real root
    CHECK(r.empty());
}

TEST_CASE("stable quadratic for large b") {
    // z^2 - 1e8 z + 1: roots ~1e8 and ~1e-8; naive formula loses the small one.
    const auto r = real_cubic_roots(0, 1, -1e8, 1);
    REQUIRE(r.size() == 2);
    CHECK(r[0] == doctest::Approx(1e-8).epsilon(1e-9));
    CHECK(r[1] == doctest::Approx(1e8).epsilon(1e-12));
}

TEST_CASE("random cubics agree with bisection oracle") {
    CounterRng rng(2024, 0);
    for (int trial = 0; trial < 50; ++trial) {
        const double c3 = 2.0 * rng.next_uniform() - 1.0;
        const double c2 = 10.0 * (2.0 * rng.next_uniform() - 1.0);
        const double c1 = 10.0 * (2.0 * rng.next_uniform() - 1.0);
        const double c0 = 10.0 * (2.0 * rng.next_uniform() - 1.0);
        if (std::abs(c3) < 0.05) continue;
        const auto got = real_cubic_roots(c3, c2, c1, c0);
        const auto want = bisect_roots(c3, c2, c1, c0);
        REQUIRE(got.size() >= want.size());  // oracle can miss tangential roots
        // Every bisection root must be matched.
        for (double w : want) {
            const bool found = std::any_of(got.begin(), got.end(), [&](double g) {
                return std::abs(g - w) < 1e-6 * std::max(1.0, std::abs(w));
            });
            CHECK(found);
        }
        for (double g : got)
            CHECK(cubic_rel_residual(c3, c2, c1, c0, g) < 1e-10);
    }
}

TEST_CASE("roots are sorted") {
    CounterRng rng(7, 1);
    for (int trial = 0; trial < 200; ++trial) {
        const double c3 = 2.0 * rng.next_uniform() - 1.0;
        const double c2 = 5.0 * (2.0 * rng.next_uniform() - 1.0);
        const double c1 = 5.0 * (2.0 * rng.next_uniform() - 1.0);
        const double c0 = 5.0 * (2.0 * rng.next_uniform() - 1.0);
        const auto r = real_cubic_roots(c3, c2, c1, c0);
        CHECK(std::is_sorted(r.begin(), r.end()));
    }
}
