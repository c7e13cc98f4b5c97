#include "mvg/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace mvg {

using nlohmann::json;

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw SolveError(SolveError::Kind::InvalidConfig,
                         "cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw SolveError(SolveError::Kind::InvalidConfig,
                         "config parse error in " + path + ": " + e.what());
    }
    return j;
}

AgentType parse_agent(const json& j) {
    AgentType a;
    a.x0 = j.at("x0").get<double>();
    a.b = j.at("b").get<double>();
    a.xi = j.at("xi").get<double>();
    a.sigma = j.at("sigma").get<double>();
    a.phi = j.at("phi").get<double>();
    a.gamma = j.at("gamma").get<double>();
    a.mu1 = j.at("mu1").get<double>();
    a.mu2 = j.at("mu2").get<double>();
    return a;
}

MarketParams parse_market(const json& j) {
    MarketParams m;
    m.r = j.at("r").get<double>();
    m.lambda = j.at("lambda").get<double>();
    return m;
}

NumericTolerances parse_tolerances(const json& j) {
    NumericTolerances t;
    if (j.contains("root_tol")) t.root_tol = j["root_tol"].get<double>();
    if (j.contains("det_tol")) t.det_tol = j["det_tol"].get<double>();
    if (j.contains("kappa_tol")) t.kappa_tol = j["kappa_tol"].get<double>();
    if (j.contains("excl_tol")) t.excl_tol = j["excl_tol"].get<double>();
    return t;
}

}  // namespace

GameConfig load_game_config(const std::string& path) {
    const json j = read_json(path);
    GameConfig cfg;
    try {
        cfg.market = parse_market(j.at("market"));
        for (const auto& ja : j.at("agents")) cfg.agents.push_back(parse_agent(ja));
        if (j.contains("tolerances")) cfg.tol = parse_tolerances(j["tolerances"]);
    } catch (const json::exception& e) {
        throw SolveError(SolveError::Kind::InvalidConfig,
                         "config schema error in " + path + ": " + e.what());
    }
    return cfg;
}

TypeMeasure load_type_measure(const std::string& path) {
    const json j = read_json(path);
    TypeMeasure m;
    try {
        for (const auto& ja : j.at("agents")) m.atoms.push_back(parse_agent(ja));
        if (j.contains("weights")) {
            m.weights = j["weights"].get<std::vector<double>>();
        } else {
            m.weights.assign(m.atoms.size(), 1.0 / static_cast<double>(m.atoms.size()));
        }
    } catch (const json::exception& e) {
        throw SolveError(SolveError::Kind::InvalidConfig,
                         "measure schema error in " + path + ": " + e.what());
    }
    return m;
}

void save_game_config(const GameConfig& cfg, const std::string& path) {
    json j;
    j["market"] = {{"r", cfg.market.r}, {"lambda", cfg.market.lambda}};
    j["tolerances"] = {{"root_tol", cfg.tol.root_tol},
                       {"det_tol", cfg.tol.det_tol},
                       {"kappa_tol", cfg.tol.kappa_tol},
                       {"excl_tol", cfg.tol.excl_tol}};
    j["agents"] = json::array();
    for (const auto& a : cfg.agents)
        j["agents"].push_back({{"x0", a.x0},
                               {"b", a.b},
                               {"xi", a.xi},
                               {"sigma", a.sigma},
                               {"phi", a.phi},
                               {"gamma", a.gamma},
                               {"mu1", a.mu1},
                               {"mu2", a.mu2}});
    std::ofstream out(path);
    if (!out)
        throw SolveError(SolveError::Kind::InvalidConfig,
                         "cannot write config file: " + path);
    out << j.dump(2) << '\n';
}

std::string solution_csv(const std::vector<AgentCoefficients>& coeffs,
                         const std::vector<double>& pi_hat) {
    std::ostringstream os;
    os << "agent_id,rho,z,p,q,a,a_tilde,c,D,A,C,E,F,I,k1,k2,k3,N,"
          "pi_hat_at_x0\n";
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        const auto& c = coeffs[i];
        os << i << ',' << fmt17(c.rho) << ',' << fmt17(c.z) << ','
           << fmt17(c.p) << ',' << fmt17(c.q) << ',' << fmt17(c.a) << ','
           << fmt17(c.a_tilde) << ',' << fmt17(c.c) << ',' << fmt17(c.D)
           << ',' << fmt17(c.A) << ',' << fmt17(c.C) << ',' << fmt17(c.E)
           << ',' << fmt17(c.F) << ',' << fmt17(c.I) << ',' << fmt17(c.k1)
           << ',' << fmt17(c.k2) << ',' << fmt17(c.k3) << ',' << fmt17(c.N)
           << ',' << fmt17(i < pi_hat.size() ? pi_hat[i] : 0.0) << '\n';
    }
    return os.str();
}

std::string affine_map_csv(const std::vector<std::vector<double>>& M,
                           const std::vector<double>& m0) {
    std::ostringstream os;
    os << "agent_id,m0";
    for (std::size_t j = 0; j < m0.size(); ++j) os << ",M_" << j;
    os << '\n';
    for (std::size_t i = 0; i < m0.size(); ++i) {
        os << i << ',' << fmt17(m0[i]);
        for (std::size_t j = 0; j < m0.size(); ++j) os << ',' << fmt17(M[i][j]);
        os << '\n';
    }
    return os.str();
}

std::string convergence_csv(const ConvergenceCurve& curve) {
    std::ostringstream os;
    os << "n,tracked_error,max_error,degeneracy_flags\n";
    for (const auto& pt : curve.points) {
        os << pt.n << ',';
        if (pt.solved)
            os << fmt17(pt.tracked_error) << ',' << fmt17(pt.max_error);
        else
            os << "nan,nan";
        os << ',' << pt.degeneracy_flags << '\n';
    }
    return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out)
        throw SolveError(SolveError::Kind::InvalidConfig,
                         "cannot write file: " + path);
    out << content;
}

}  // namespace mvg
