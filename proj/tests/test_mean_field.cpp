#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "mvg/equilibrium.hpp"
#include "mvg/mean_field.hpp"

using namespace mvg;

namespace {

TypeMeasure two_atom_measure() {
    TypeMeasure m;
    m.atoms = {AgentType{1.0, 0.12, 0.05, 0.2, 0.6, 2.0, 0.8, 1.1},
               AgentType{0.4, 0.16, 0.1, 0.3, 0.3, 4.0, 0.2, 0.5}};
    m.weights = {0.35, 0.65};
    return m;
}

const std::vector<double> kGrid{-2.0, -0.7, 0.0, 1.1, 2.3};

}  // namespace

TEST_CASE("point-mass benchmark solves to pi_hat = 2.5") {
    TypeMeasure m;
    m.atoms = {AgentType{1.0, 0.1, 0.0, 0.2, 0.5, 2.0, 0.0, 2.0}};
    m.weights = {1.0};
    const auto eq = solve_mfg(m, {0.0, 1.0}, NumericTolerances{});
    REQUIRE(eq.outcome.kind == OutcomeKind::Unique);
    CHECK(eq.pi_hat[0] == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(eq.per_atom[0].phi_n == 1.0);
    CHECK(eq.per_atom[0].N == doctest::Approx(1.0));
}

TEST_CASE("aggregates are fixed points of the measure expectation") {
    const auto m = two_atom_measure();
    const MarketParams mk{0.03, 0.8};
    const auto eq = solve_mfg(m, mk, NumericTolerances{});
    REQUIRE(eq.outcome.kind == OutcomeKind::Unique);
    double sig = 0.0, br = 0.0;
    for (std::size_t k = 0; k < m.atoms.size(); ++k) {
        const double pi = eq.strategy(k, m.atoms[k].x0, eq.x_bar);
        sig += m.weights[k] * m.atoms[k].sigma * pi;
        br += m.weights[k] * (m.atoms[k].b - mk.r) * pi;
    }
    CHECK(sig == doctest::Approx(eq.outcome.sigma_pi_bar).epsilon(1e-10));
    CHECK(br == doctest::Approx(eq.outcome.br_pi_bar).epsilon(1e-10));
}

TEST_CASE("mean-field HJB residuals and value identity") {
    const auto m = two_atom_measure();
    const auto eq = solve_mfg(m, {0.03, 0.8}, NumericTolerances{});
    REQUIRE(eq.outcome.kind == OutcomeKind::Unique);
    for (std::size_t k = 0; k < m.atoms.size(); ++k) {
        CHECK(mf_vgh_check(eq, k, kGrid, kGrid) < 1e-9);
        const auto hr = mf_hjb_residuals(eq, k, kGrid, kGrid);
        CHECK(hr.second_order_ok);
        CHECK(hr.ehjb < 1e-8);
        CHECK(hr.lg < 1e-8);
        CHECK(hr.lh < 1e-8);
    }
}

TEST_CASE("large point-mass population approaches the mean-field strategy") {
    TypeMeasure m;
    m.atoms = {AgentType{0.8, 0.13, 0.07, 0.25, 0.7, 3.0, 1.0, 0.6}};
    m.weights = {1.0};
    const MarketParams mk{0.02, 0.9};
    const auto eq = solve_mfg(m, mk, NumericTolerances{});
    REQUIRE(eq.outcome.kind == OutcomeKind::Unique);
    const double mf_pi = eq.pi_hat[0];

    double prev = 1e9;
    for (std::size_t n : {10u, 100u, 1000u}) {
        GameConfig cfg;
        cfg.market = mk;
        cfg.agents.assign(n, m.atoms[0]);
        WealthProfile x;
        x.x.assign(n, m.atoms[0].x0);
        const auto res = solve_n_agent(cfg, x);
        REQUIRE(res.outcome.kind == OutcomeKind::Unique);
        const double err = std::abs(res.solution.pi_hat[0] - mf_pi);
        CHECK(err < prev);
        prev = err;
    }
    CHECK(prev < 1e-3);
}

TEST_CASE("mean-field degenerate outcomes") {
    TypeMeasure m;
    m.atoms = {AgentType{1.0, 0.1, 0.0, 0.2, 1.0, 2.0, 0.0, 0.0}};
    m.weights = {1.0};
    auto eq = solve_mfg(m, {0.0, 1.0}, NumericTolerances{});
    CHECK(eq.outcome.kind == OutcomeKind::InfiniteFamily);
    CHECK_THROWS_AS(eq.strategy(0, 1.0, 1.0), SolveError);

    m.atoms[0].mu2 = 2.0;
    eq = solve_mfg(m, {0.0, 1.0}, NumericTolerances{});
    CHECK(eq.outcome.kind == OutcomeKind::Nonexistent);
}

TEST_CASE("invalid measures are rejected") {
    auto m = two_atom_measure();
    m.weights = {0.5, 0.6};
    CHECK_THROWS_AS(solve_mfg(m, {0.03, 0.8}, NumericTolerances{}), SolveError);
    m = two_atom_measure();
    m.atoms[0].b = 0.0;  // below the risk-free rate
    CHECK_THROWS_AS(solve_mfg(m, {0.03, 0.8}, NumericTolerances{}), SolveError);
}
