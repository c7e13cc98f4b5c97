#include "mvg/types.hpp"

#include <sstream>

namespace mvg {

double TypeMeasure::mean_wealth() const {
    double s = 0.0;
    for (std::size_t k = 0; k < atoms.size(); ++k) s += weights[k] * atoms[k].x0;
    return s;
}

double leave_one_out_mean(std::span<const double> x, std::size_t i) {
    double s = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j)
        if (j != i) s += x[j];
    return s / static_cast<double>(x.size());
}

double exclusion_margin(const MarketParams& m, const NumericTolerances& tol) {
    return tol.excl_tol * std::max({1.0, std::abs(m.lambda), std::abs(m.r)});
}

namespace {

void check_agent(const AgentType& a, const MarketParams& m, int idx,
                 std::vector<Violation>& out) {
    auto bad = [&](const char* field, const std::string& msg) {
        out.push_back({idx, field, msg});
    };
    if (!(a.b > m.r)) bad("b", "stock drift b must exceed the interest rate r");
    if (a.xi < 0.0) bad("xi", "idiosyncratic volatility must be >= 0");
    if (a.sigma < 0.0) bad("sigma", "common volatility must be >= 0");
    if (a.xi * a.xi + a.sigma * a.sigma <= 0.0)
        bad("sigma", "total volatility xi^2 + sigma^2 must be positive");
    if (a.phi < 0.0 || a.phi > 1.0) bad("phi", "competition weight must lie in [0,1]");
    if (!(a.gamma > 0.0)) bad("gamma", "risk aversion gamma must be positive");
    if (a.mu1 < 0.0) bad("mu1", "mu1 must be >= 0");
    if (a.mu2 < 0.0) bad("mu2", "mu2 must be >= 0");
    if (!std::isfinite(a.x0)) bad("x0", "initial wealth must be finite");
}

void check_market(const MarketParams& m, const NumericTolerances& tol,
                  std::vector<Violation>& out) {
    if (!(m.lambda > 0.0))
        out.push_back({-1, "lambda", "hazard rate lambda must be positive"});
    if (m.r < 0.0) out.push_back({-1, "r", "interest rate must be >= 0"});
    const double eps = exclusion_margin(m, tol);
    if (std::abs(m.lambda - m.r) <= eps)
        out.push_back({-1, "lambda", "lambda == r is excluded (pole in the coefficient system)"});
    if (std::abs(m.lambda - 2.0 * m.r) <= eps)
        out.push_back({-1, "lambda", "lambda == 2r is excluded (pole in the coefficient system)"});
}

}  // namespace

std::vector<Violation> validate_config(const GameConfig& cfg) {
    std::vector<Violation> out;
    if (cfg.agents.empty())
        out.push_back({-1, "agents", "at least one agent is required"});
    check_market(cfg.market, cfg.tol, out);
    for (std::size_t i = 0; i < cfg.agents.size(); ++i)
        check_agent(cfg.agents[i], cfg.market, static_cast<int>(i), out);
    return out;
}

std::vector<Violation> validate_measure(const TypeMeasure& measure,
                                        const MarketParams& market,
                                        const NumericTolerances& tol) {
    std::vector<Violation> out;
    if (measure.atoms.empty())
        out.push_back({-1, "atoms", "type measure needs at least one atom"});
    if (measure.atoms.size() != measure.weights.size())
        out.push_back({-1, "weights", "atom and weight counts differ"});
    check_market(market, tol, out);
    double wsum = 0.0;
    for (std::size_t k = 0; k < measure.weights.size(); ++k) {
        if (measure.weights[k] < 0.0)
            out.push_back({static_cast<int>(k), "weights", "weights must be >= 0"});
        wsum += measure.weights[k];
    }
    if (!measure.weights.empty() && std::abs(wsum - 1.0) > 1e-12)
        out.push_back({-1, "weights", "weights must sum to one"});
    for (std::size_t k = 0; k < measure.atoms.size(); ++k)
        check_agent(measure.atoms[k], market, static_cast<int>(k), out);
    return out;
}

void require_valid(const GameConfig& cfg) {
    auto violations = validate_config(cfg);
    if (violations.empty()) return;
    std::ostringstream oss;
    oss << "invalid configuration:";
    for (const auto& v : violations) {
        oss << "\n  ";
        if (v.agent >= 0) oss << "agent " << v.agent << " ";
        oss << v.field << ": " << v.message;
    }
    throw SolveError(SolveError::Kind::InvalidConfig, oss.str());
}

}  // namespace mvg
