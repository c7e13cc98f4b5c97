#pragma once

#include <optional>
#include <vector>

#include "mvg/equilibrium.hpp"
#include "mvg/types.hpp"

namespace mvg {

// Population scalars of the large-hazard limit, n-agent flavour.
struct LimitScalarsN {
    std::vector<double> psi;  // psi_i = (1 - phi_i/n) xi_i^2 + sigma_i^2
    double Psi_n = 0.0;       // sum phi_i sigma_i^2 / (n psi_i)
    double Phi_n = 0.0;       // sum mu2_i sigma_i (b_i - r) / (2 n gamma_i psi_i)
    double Phi_n0 = 0.0;      // sum sigma_i b_i / (n gamma_i psi_i)
    double Upsilon_n = 0.0;   // sum mu1_i sigma_i x_i (b_i - r) / (2 n gamma_i psi_i)
};

// Mean-field analogs over a type measure (expectations; psi = xi^2 + sigma^2).
struct LimitScalarsMf {
    double Psi = 0.0;
    double Phi = 0.0;
    double Phi0 = 0.0;
    double Upsilon = 0.0;
};

struct LimitStrategy {
    OutcomeKind kind = OutcomeKind::Unique;
    std::vector<double> pi_hat;      // per agent / atom (Unique)
    std::vector<double> slope_x;     // coefficient on own wealth
    std::vector<double> family_dir;  // per-agent factor on the free aggregate
};

LimitScalarsN limit_scalars_n(const std::vector<AgentType>& agents, double r,
                              const std::vector<double>& x);
LimitScalarsMf limit_scalars_mf(const TypeMeasure& measure, double r);

// Large-hazard limit of the n-agent equilibrium: strategy and the limiting
// value function V = mu1 phi_n x^2 - mu1 phi x y + mu2 phi_n x - mu2 phi y.
LimitStrategy lambda_inf_n(const std::vector<AgentType>& agents, double r,
                           const std::vector<double>& x);
LimitStrategy lambda_inf_mf(const TypeMeasure& measure, double r);

// State-independent risk aversion with zero rate (mu1 = 0, mu2 = 2, r = 0):
// constant equilibrium strategies for any hazard rate.
LimitStrategy state_indep_zero_rate_n(const std::vector<AgentType>& agents);
LimitStrategy state_indep_zero_rate_mf(const TypeMeasure& measure);

// No-competition (phi = 0) single-agent closed form pi(x) = zeta x + varsigma.
struct NoCompetitionStrategy {
    double iota = 0.0;
    double frak_z = 0.0;  // selected root of the phi = 0 cubic
    double zeta = 0.0;    // slope, frak_z / (b - r)
    double varsigma = 0.0;
};
NoCompetitionStrategy no_competition(const AgentType& agent,
                                     const MarketParams& market,
                                     const NumericTolerances& tol);

}  // namespace mvg
