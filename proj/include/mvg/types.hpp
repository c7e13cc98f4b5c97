#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mvg {

// Market-wide constants. lambda is the constant hazard rate of the random
// horizon; the two excluded regimes lambda == r and lambda == 2r are rejected
// at validation time with a small safety margin.
struct MarketParams {
    double r = 0.0;
    double lambda = 1.0;
};

// Type vector of a single agent: (x0, b, xi, sigma, phi, gamma, mu1, mu2).
struct AgentType {
    double x0 = 0.0;     // initial wealth
    double b = 0.1;      // stock drift, must exceed r
    double xi = 0.0;     // idiosyncratic volatility
    double sigma = 0.0;  // common-noise volatility
    double phi = 0.0;    // competition weight, in [0,1]
    double gamma = 1.0;  // variance risk aversion, > 0
    double mu1 = 0.0;    // wealth-proportional preference weight
    double mu2 = 0.0;    // constant preference weight
};

struct NumericTolerances {
    double root_tol = 1e-9;    // relative cubic-residual tolerance
    double det_tol = 1e-10;    // 2x2 aggregate determinant threshold (relative)
    double kappa_tol = 1e-8;   // kappa-consistency threshold
    double excl_tol = 1e-9;    // parameter-exclusion margin (relative)
};

struct GameConfig {
    std::vector<AgentType> agents;
    MarketParams market;
    NumericTolerances tol;

    std::size_t n() const { return agents.size(); }
};

struct WealthProfile {
    std::vector<double> x;
};

// Discrete type distribution: atoms with probability weights summing to one.
// The x0 field of each atom doubles as the atom's wealth coordinate.
struct TypeMeasure {
    std::vector<AgentType> atoms;
    std::vector<double> weights;

    double mean_wealth() const;
};

struct Violation {
    int agent = -1;  // -1 for market-level violations
    std::string field;
    std::string message;
};

// Structured error for solver failures that depend on the data rather than
// on programming mistakes.
class SolveError : public std::runtime_error {
public:
    enum class Kind {
        NoAdmissibleRoot,
        PoleAtDenominator,
        SingularQ,
        DegenerateQ,
        DegenerateN,
        SingularSystem,
        NotUnique,
        InvalidConfig,
        Precondition,
    };

    SolveError(Kind kind, std::string msg, int agent = -1)
        : std::runtime_error(std::move(msg)), kind(kind), agent(agent) {}

    Kind kind;
    int agent;
};

// (1/n) sum_{j != i} x_j; note the divisor is n, not n-1.
double leave_one_out_mean(std::span<const double> x, std::size_t i);

// Exclusion margin around lambda == r and lambda == 2r.
double exclusion_margin(const MarketParams& m, const NumericTolerances& tol);

// Returns the full list of invariant violations; empty means valid.
std::vector<Violation> validate_config(const GameConfig& cfg);
std::vector<Violation> validate_measure(const TypeMeasure& measure,
                                        const MarketParams& market,
                                        const NumericTolerances& tol);

// Throws SolveError{InvalidConfig} listing every violation.
void require_valid(const GameConfig& cfg);

}  // namespace mvg
