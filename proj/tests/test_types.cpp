#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "mvg/types.hpp"

using namespace mvg;

namespace {

GameConfig valid_config(std::size_t n = 2) {
    GameConfig cfg;
    cfg.market = {0.05, 1.0};
    AgentType a;
    a.x0 = 1.0;
    a.b = 0.15;
    a.xi = 0.02;
    a.sigma = 0.03;
    a.phi = 0.5;
    a.gamma = 2.0;
    a.mu1 = 0.3;
    a.mu2 = 0.7;
    cfg.agents.assign(n, a);
    return cfg;
}

bool has_field(const std::vector<Violation>& v, const std::string& field) {
    for (const auto& x : v)
        if (x.field == field) return true;
    return false;
}

}  // namespace

TEST_CASE("valid config passes") {
    CHECK(validate_config(valid_config()).empty());
}

TEST_CASE("drift must exceed the risk-free rate") {
    auto cfg = valid_config();
    cfg.agents[1].b = cfg.market.r;  // b == r is already illegal
    const auto v = validate_config(cfg);
    CHECK(has_field(v, "b"));
}

TEST_CASE("volatility signs and joint nondegeneracy") {
    auto cfg = valid_config();
    cfg.agents[0].xi = -0.1;
    CHECK(has_field(validate_config(cfg), "xi"));
    cfg = valid_config();
    cfg.agents[0].sigma = -0.1;
    CHECK(has_field(validate_config(cfg), "sigma"));
    cfg = valid_config();
    cfg.agents[0].xi = 0.0;
    cfg.agents[0].sigma = 0.0;
    CHECK_FALSE(validate_config(cfg).empty());
}

TEST_CASE("phi range and gamma positivity") {
    auto cfg = valid_config();
    cfg.agents[0].phi = 1.5;
    CHECK(has_field(validate_config(cfg), "phi"));
    cfg = valid_config();
    cfg.agents[0].phi = -0.01;
    CHECK(has_field(validate_config(cfg), "phi"));
    cfg = valid_config();
    cfg.agents[0].gamma = 0.0;
    CHECK(has_field(validate_config(cfg), "gamma"));
    cfg = valid_config();
    cfg.agents[0].mu1 = -1.0;
    CHECK(has_field(validate_config(cfg), "mu1"));
}

TEST_CASE("excluded hazard rates lambda == r and lambda == 2r") {
    auto cfg = valid_config();
    cfg.market.lambda = cfg.market.r;
    CHECK_FALSE(validate_config(cfg).empty());
    cfg = valid_config();
    cfg.market.lambda = 2.0 * cfg.market.r;
    CHECK_FALSE(validate_config(cfg).empty());
    cfg = valid_config();
    cfg.market.lambda = 2.0 * cfg.market.r + 1e-3;
    CHECK(validate_config(cfg).empty());
    cfg = valid_config();
    cfg.market.lambda = -1.0;
    CHECK(has_field(validate_config(cfg), "lambda"));
}

TEST_CASE("require_valid throws with every violation listed") {
    auto cfg = valid_config();
    cfg.agents[0].gamma = -1.0;
    cfg.agents[1].phi = 2.0;
    try {
        require_valid(cfg);
        FAIL("expected SolveError");
    } catch (const SolveError& e) {
        CHECK(e.kind == SolveError::Kind::InvalidConfig);
        const std::string msg = e.what();
        CHECK(msg.find("gamma") != std::string::npos);
        CHECK(msg.find("phi") != std::string::npos);
    }
}

TEST_CASE("leave-one-out mean uses divisor n") {
    const std::vector<double> x{1.0, 2.0, 3.0, 6.0};
    CHECK(leave_one_out_mean(x, 0) == doctest::Approx(11.0 / 4.0));
    CHECK(leave_one_out_mean(x, 3) == doctest::Approx(6.0 / 4.0));
}

TEST_CASE("measure validation: weights sum to one") {
    TypeMeasure m;
    m.atoms.assign(2, valid_config().agents[0]);
    m.weights = {0.6, 0.6};
    const auto v = validate_measure(m, valid_config().market,
                                    NumericTolerances{});
    CHECK_FALSE(v.empty());
    m.weights = {0.25, 0.75};
    CHECK(validate_measure(m, valid_config().market, NumericTolerances{})
              .empty());
    CHECK(m.mean_wealth() == doctest::Approx(1.0));
}
