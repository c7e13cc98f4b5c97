#pragma once

#include <string>
#include <vector>

#include "mvg/coeffs.hpp"
#include "mvg/types.hpp"

namespace mvg {

enum class OutcomeKind { Unique, InfiniteFamily, Nonexistent };

const char* to_string(OutcomeKind kind);

// Market-average quantities of the reduced 2x2 aggregate system. The *_rho_*
// terms depend on the wealth profile; the *_k* terms are state-independent.
struct AggregateTerms {
    double sig_rho_px = 0, sig_rho_qy = 0;
    double br_rho_px = 0, br_rho_qy = 0;
    double sig_k1 = 0, sig_k2 = 0, sig_k3 = 0;
    double br_k1 = 0, br_k2 = 0, br_k3 = 0;

    double det() const { return (br_k2 - 1.0) * (sig_k1 - 1.0) - sig_k2 * br_k1; }
    double sig_state() const { return sig_rho_px + sig_rho_qy + sig_k3; }
    double br_state() const { return br_rho_px + br_rho_qy + br_k3; }
};

struct AggregateOutcome {
    OutcomeKind kind = OutcomeKind::Unique;
    double sigma_pi_bar = 0.0;  // valid when kind == Unique
    double br_pi_bar = 0.0;     // valid when kind == Unique
    double det = 0.0;
    double kappa = 0.0;
    bool kappa_valid = false;
    std::string family_param_axis;  // description, InfiniteFamily only
};

// Fully assembled equilibrium: the affine feedback map pi_hat = M x + m0 over
// the wealth vector, per-agent completed coefficients, and the profile at
// which the aggregate terms were frozen for the value-function constants.
struct EquilibriumSolution {
    GameConfig cfg;
    std::vector<AgentCoefficients> per_agent;
    AggregateTerms terms;
    AggregateOutcome outcome;
    WealthProfile frozen_profile;
    std::vector<std::vector<double>> M;
    std::vector<double> m0;
    std::vector<double> pi_hat;  // strategies at the frozen profile
    std::vector<FrozenHats> hats;

    // Strategy of agent i at wealth vector x (affine map evaluation).
    double strategy(std::size_t i, const std::vector<double>& x) const;
};

std::vector<AgentCoefficients> build_all_coefficients(const GameConfig& cfg,
                                                      int root_index = -1);

AggregateTerms build_aggregates(const std::vector<AgentCoefficients>& coeffs,
                                const GameConfig& cfg,
                                const WealthProfile& x);

AggregateOutcome solve_aggregates(const AggregateTerms& terms,
                                  const NumericTolerances& tol);

// Requires outcome.kind == Unique; throws NotUnique otherwise.
EquilibriumSolution assemble_equilibrium(const GameConfig& cfg,
                                         std::vector<AgentCoefficients> coeffs,
                                         const AggregateOutcome& outcome,
                                         const AggregateTerms& terms,
                                         const WealthProfile& x);

// Convenience: coefficients + aggregates + assembly (assembly skipped unless
// the outcome is Unique; inspect .outcome).
struct NAgentResult {
    std::vector<AgentCoefficients> coeffs;
    AggregateTerms terms;
    AggregateOutcome outcome;
    EquilibriumSolution solution;  // populated only when outcome is Unique
};
NAgentResult solve_n_agent(const GameConfig& cfg, const WealthProfile& x,
                           int root_index = -1);

// Independent oracle: solves the full n x n linear system for the strategy
// vector by Gaussian elimination with partial pivoting.
std::vector<double> direct_solve(const std::vector<AgentCoefficients>& coeffs,
                                 const GameConfig& cfg,
                                 const WealthProfile& x);

// General dense solve, shared with the oracle and tests.
std::vector<double> solve_dense(std::vector<std::vector<double>> A,
                                std::vector<double> b);

double evaluate_value(const EquilibriumSolution& sol, std::size_t i, double x,
                      double y);
double evaluate_G(const EquilibriumSolution& sol, std::size_t i, double x,
                  double y);
double evaluate_H(const EquilibriumSolution& sol, std::size_t i, double x,
                  double y);

// Max over the grid of |V - [(mu1 x + mu2) G - gamma (H - G^2)]|.
double vgh_check(const EquilibriumSolution& sol, std::size_t i,
                 const std::vector<double>& xs, const std::vector<double>& ys);

struct HjbResiduals {
    double ehjb = 0.0;  // value-equation coefficient identities + stationarity
    double lg = 0.0;    // G generator equation
    double lh = 0.0;    // H generator equation
    bool second_order_ok = false;
};

// Residuals of the three coupled equations with aggregates frozen at the
// solution's profile, evaluated over the (x, y) grid.
HjbResiduals hjb_residuals(const EquilibriumSolution& sol, std::size_t i,
                           const std::vector<double>& xs,
                           const std::vector<double>& ys);

// Same check for a standalone completed coefficient set; the second state
// coordinate is the peer average (y) in the n-agent game and the population
// mean (x_bar) in the mean-field game — the equations coincide.
HjbResiduals hjb_residuals_for(const AgentType& agent,
                               const MarketParams& market,
                               const AgentCoefficients& co,
                               const FrozenHats& hats,
                               const std::vector<double>& xs,
                               const std::vector<double>& ys);

}  // namespace mvg
