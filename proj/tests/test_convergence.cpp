#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstddef>

#include "mvg/convergence.hpp"
#include "mvg/equilibrium.hpp"
#include "mvg/mean_field.hpp"

using namespace mvg;

namespace {

TypeMeasure point_mass() {
    TypeMeasure m;
    m.atoms = {AgentType{0.8, 0.13, 0.07, 0.25, 0.7, 3.0, 1.0, 0.6}};
    m.weights = {1.0};
    return m;
}

TypeMeasure two_atoms() {
    TypeMeasure m;
    m.atoms = {AgentType{1.0, 0.12, 0.05, 0.2, 0.6, 2.0, 0.8, 1.1},
               AgentType{0.4, 0.16, 0.1, 0.3, 0.3, 4.0, 0.2, 0.5}};
    m.weights = {0.35, 0.65};
    return m;
}

}  // namespace

TEST_CASE("type sampling: point mass, determinism, and frequencies") {
    const auto pm = point_mass();
    const auto drawn = sample_types(pm, 50, 7);
    REQUIRE(drawn.size() == 50);
    for (const auto& a : drawn) CHECK(a.b == pm.atoms[0].b);

    const auto m = two_atoms();
    const auto s1 = sample_types(m, 200, 11);
    const auto s2 = sample_types(m, 200, 11);
    const auto s3 = sample_types(m, 200, 12);
    std::size_t same = 0, diff = 0, first = 0;
    for (std::size_t i = 0; i < s1.size(); ++i) {
        if (s1[i].b == s2[i].b) ++same;
        if (s1[i].b != s3[i].b) ++diff;
        if (s1[i].b == m.atoms[0].b) ++first;
    }
    CHECK(same == s1.size());  // identical seed, identical draw
    CHECK(diff > 0);           // different seed actually changes the draw
    // Empirical frequency of the first atom near its weight 0.35.
    CHECK(std::abs(static_cast<double>(first) / 200.0 - 0.35) < 0.12);
}

TEST_CASE("point-mass populations converge to the mean-field strategy") {
    const auto m = point_mass();
    const MarketParams mk{0.02, 0.9};
    const auto curve = convergence_curve(m, mk, NumericTolerances{},
                                         {10, 100, 1000}, 0, 3);
    REQUIRE(curve.points.size() == 3);
    double prev = 1e9;
    for (const auto& pt : curve.points) {
        REQUIRE(pt.solved);
        CHECK(pt.degeneracy_flags.empty());
        CHECK(pt.tracked_error < prev);
        // With one atom every agent is identical, so both errors coincide.
        CHECK(pt.max_error == doctest::Approx(pt.tracked_error));
        prev = pt.tracked_error;
    }
    const double e10 = curve.points[0].tracked_error;
    const double e1000 = curve.points[2].tracked_error;
    CHECK(e1000 / e10 <= 0.05);
    // O(1/n) decay: the log-log slope should be close to -1.
    const double slope = std::log(e1000 / e10) / std::log(1000.0 / 10.0);
    CHECK(slope > -1.5);
    CHECK(slope < -0.5);
}

TEST_CASE("no-interaction populations match the mean field at every size") {
    // With phi = 0 throughout, strategies decouple from the peer average, so
    // the finite game and the mean-field game agree to solver precision.
    auto m = point_mass();
    m.atoms[0].phi = 0.0;
    const auto curve = convergence_curve(m, {0.02, 0.9}, NumericTolerances{},
                                         {10, 100}, 0, 5);
    for (const auto& pt : curve.points) {
        REQUIRE(pt.solved);
        CHECK(pt.max_error < 1e-9);
    }
}

TEST_CASE("sampled two-atom populations: errors shrink for most seeds") {
    const auto m = two_atoms();
    const MarketParams mk{0.03, 0.8};
    std::size_t decreasing = 0;
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        const auto curve = convergence_curve(m, mk, NumericTolerances{},
                                             {10, 100, 1000}, 1, seed);
        bool mono = true;
        double prev = 1e9;
        for (const auto& pt : curve.points) {
            REQUIRE(pt.solved);
            if (pt.tracked_error >= prev) mono = false;
            prev = pt.tracked_error;
        }
        if (mono) ++decreasing;
    }
    CHECK(decreasing >= 2);
}

TEST_CASE("tracked atom is honored and the point is reproducible") {
    const auto m = two_atoms();
    const MarketParams mk{0.03, 0.8};
    const auto c0 = convergence_curve(m, mk, NumericTolerances{}, {50}, 0, 4);
    const auto c0b = convergence_curve(m, mk, NumericTolerances{}, {50}, 0, 4);
    const auto c1 = convergence_curve(m, mk, NumericTolerances{}, {50}, 1, 4);
    REQUIRE(c0.points[0].solved);
    REQUIRE(c1.points[0].solved);
    CHECK(c0.points[0].tracked_error == c0b.points[0].tracked_error);
    // Forcing a different tracked atom changes the tracked discrepancy.
    CHECK(c0.points[0].tracked_error != c1.points[0].tracked_error);
}
