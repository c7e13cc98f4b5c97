#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <string>

#include "mvg/equilibrium.hpp"
#include "mvg/io.hpp"

using namespace mvg;

namespace {

std::string temp_path(const char* name) {
    return std::string("/tmp/mvg_io_test_") + name;
}

}  // namespace

TEST_CASE("fmt17 round-trips doubles exactly") {
    for (double v : {0.1, 1.0 / 3.0, 2.5, -1.234567890123456e-7, 1e300}) {
        CHECK(std::stod(fmt17(v)) == v);
    }
}

TEST_CASE("config JSON round trip") {
    GameConfig cfg;
    cfg.market = {0.05, 0.75};
    cfg.tol.root_tol = 1e-8;
    AgentType a{0.35, 0.16, 0.03, 0.01, 0.5, 4.24, 0.16, 0.98};
    AgentType b{0.5, 0.12, 0.0, 0.04, 1.0, 2.0, 0.0, 2.0};
    cfg.agents = {a, b};
    const auto path = temp_path("roundtrip.json");
    save_game_config(cfg, path);
    const auto back = load_game_config(path);
    REQUIRE(back.agents.size() == 2);
    CHECK(back.market.r == cfg.market.r);
    CHECK(back.market.lambda == cfg.market.lambda);
    CHECK(back.tol.root_tol == cfg.tol.root_tol);
    CHECK(back.agents[0].gamma == a.gamma);
    CHECK(back.agents[1].mu2 == b.mu2);
    CHECK(back.agents[1].xi == b.xi);
    std::remove(path.c_str());
}

TEST_CASE("missing file and malformed JSON are reported") {
    CHECK_THROWS_AS(load_game_config("/nonexistent/nope.json"), SolveError);
    const auto path = temp_path("bad.json");
    std::ofstream(path) << "{ not json";
    CHECK_THROWS_AS(load_game_config(path), SolveError);
    std::ofstream(path) << R"({"market":{"r":0.0}})";  // missing lambda
    CHECK_THROWS_AS(load_game_config(path), SolveError);
    std::remove(path.c_str());
}

TEST_CASE("measure loading defaults to equal weights") {
    const auto path = temp_path("measure.json");
    std::ofstream(path) << R"({
      "market": {"r": 0.0, "lambda": 1.0},
      "agents": [
        {"x0":1,"b":0.1,"xi":0,"sigma":0.2,"phi":0.5,"gamma":2,"mu1":0,"mu2":2},
        {"x0":3,"b":0.1,"xi":0,"sigma":0.2,"phi":0.5,"gamma":2,"mu1":0,"mu2":2}
      ]})";
    const auto m = load_type_measure(path);
    REQUIRE(m.atoms.size() == 2);
    CHECK(m.weights[0] == doctest::Approx(0.5));
    CHECK(m.mean_wealth() == doctest::Approx(2.0));
    std::remove(path.c_str());
}

TEST_CASE("solution CSV has the documented header and one row per agent") {
    std::vector<AgentCoefficients> coeffs(3);
    coeffs[1].z = 1.0 / 3.0;
    const auto csv = solution_csv(coeffs, {1.0, 2.0, 3.0});
    CHECK(csv.rfind("agent_id,rho,z,p,q,a,a_tilde,c,D,A,C,E,F,I,k1,k2,k3,N,"
                    "pi_hat_at_x0\n", 0) == 0);
    int rows = -1;  // header
    for (char ch : csv)
        if (ch == '\n') ++rows;
    CHECK(rows == 3);
    CHECK(csv.find(fmt17(1.0 / 3.0)) != std::string::npos);
}

TEST_CASE("affine map CSV layout") {
    const std::vector<std::vector<double>> M{{1.0, 0.25}, {0.0, 2.0}};
    const auto csv = affine_map_csv(M, {0.5, -0.5});
    CHECK(csv.rfind("agent_id,m0,M_0,M_1\n", 0) == 0);
    CHECK(csv.find("0,0.5,1,0.25") != std::string::npos);
    CHECK(csv.find("1,-0.5,0,2") != std::string::npos);
}
