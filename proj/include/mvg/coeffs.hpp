#pragma once

#include <array>
#include <vector>

#include "mvg/types.hpp"

namespace mvg {

// Real roots of the slope cubic in z = rho*(b-r)*p, their admissible subset
// (those with a_tilde > 0), and the canonical selection.
struct SlopeRoots {
    std::array<double, 4> cubic{};  // c3, c2, c1, c0
    std::vector<double> all_real_roots;
    std::vector<double> admissible;
    double selected = 0.0;
    int selected_index = 0;  // index into admissible
    double z_inf = 0.0;      // large-hazard limit slope used for selection
};

// Per-agent scalars of the linear-quadratic ansatz. The first block depends
// only on the agent's own type; varrho/alpha/E/F/I and the H-coefficients
// need the frozen market aggregates and are filled by complete_coefficients.
struct AgentCoefficients {
    double phi_n = 1.0;  // 1 - phi/n (exactly 1 in the mean-field pipeline)
    double rho = 0.0;
    double z = 0.0;
    double p = 0.0;
    double a = 0.0;
    double a_tilde = 0.0;
    double q = 0.0;
    double c = 0.0;
    double D = 0.0;
    double A = 0.0;
    double C = 0.0;
    double Q = 0.0;
    double k1 = 0.0, k2 = 0.0, k3 = 0.0;
    double N = 1.0;
    SlopeRoots roots;

    bool completed = false;
    double varrho = 0.0, alpha = 0.0;
    double E = 0.0, F = 0.0, I = 0.0;
    double c_tilde = 0.0, d_tilde = 0.0, e_tilde = 0.0;
    double beta_tilde = 0.0, l_tilde = 0.0;
};

// Frozen aggregate inputs for an agent's constant-coefficient completion:
// averages of sigma_j*pi_j and (b_j-r)*pi_j over the agent's peers (leave-
// one-out with divisor n in the n-agent game; full expectations in the
// mean-field game) plus the quadratic term entering the constant equations.
struct FrozenHats {
    double sig_pi = 0.0;
    double br_pi = 0.0;
    double quad = 0.0;  // sum (xi_j pi_j / n)^2 + sig_pi^2  (sig_pi^2 in MF)
};

double compute_rho(double xi, double sigma);

// Coefficients (c3,c2,c1,c0) of the cubic in z; phi_n = 1 - phi/n.
std::array<double, 4> slope_cubic_coefficients(const AgentType& agent,
                                               const MarketParams& market,
                                               double phi_n);

// Solves the cubic, filters by admissibility (a_tilde > 0 and the a-equation
// denominator bounded away from zero), and selects the admissible root
// closest to the large-hazard limit slope; root_index >= 0 overrides the
// canonical choice by indexing the sorted admissible list.
SlopeRoots solve_slope(const AgentType& agent, const MarketParams& market,
                       double phi_n, const NumericTolerances& tol,
                       int root_index = -1, int agent_idx = -1);

// a = lambda*phi_n/(lambda-r-z); a_tilde = lambda*phi_n^2/(lambda-2r-2z-z^2/(2 rho (b-r)^2)).
std::pair<double, double> compute_a_atilde(double z, const AgentType& agent,
                                           const MarketParams& market,
                                           double phi_n,
                                           const NumericTolerances& tol,
                                           int agent_idx = -1);

double compute_q(double z, double a, double a_tilde, const AgentType& agent,
                 const MarketParams& market, double phi_n,
                 const NumericTolerances& tol, int agent_idx = -1);

std::pair<double, double> compute_c_D(double q, double a, double a_tilde,
                                      double z, const AgentType& agent,
                                      const MarketParams& market, double phi_n);

// Aggregate-independent part of the pipeline. inv_n = 1/n couples the
// self-interaction term into N; pass phi_n = 1, inv_n = 0 for the
// mean-field representative agent (N = 1).
AgentCoefficients build_agent_coefficients(const AgentType& agent,
                                           const MarketParams& market,
                                           double phi_n, double inv_n,
                                           const NumericTolerances& tol,
                                           int root_index = -1,
                                           int agent_idx = -1);

// Fills varrho, alpha, E, F, I and the H-coefficients from frozen aggregates.
void complete_coefficients(AgentCoefficients& co, const AgentType& agent,
                           const MarketParams& market, const FrozenHats& hats,
                           const NumericTolerances& tol, int agent_idx = -1);

}  // namespace mvg
