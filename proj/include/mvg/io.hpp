#pragma once

#include <string>
#include <vector>

#include "mvg/convergence.hpp"
#include "mvg/equilibrium.hpp"
#include "mvg/mean_field.hpp"
#include "mvg/types.hpp"

namespace mvg {

// Shortest float text that round-trips (up to 17 significant digits).
std::string fmt17(double v);

// JSON config: market{r,lambda}, agents[{x0,b,xi,sigma,phi,gamma,mu1,mu2}],
// optional tolerances{root_tol,det_tol,kappa_tol,excl_tol}, optional
// weights[] turning the agent list into a type measure.
GameConfig load_game_config(const std::string& path);
TypeMeasure load_type_measure(const std::string& path);
void save_game_config(const GameConfig& cfg, const std::string& path);

// One row per agent: agent_id, rho, z, p, q, a, a_tilde, c, D, A, C, E, F, I,
// k1, k2, k3, N, pi_hat_at_x0. The optional regime column is used by the
// limits command.
std::string solution_csv(const std::vector<AgentCoefficients>& coeffs,
                         const std::vector<double>& pi_hat);

// Affine feedback map rows: agent_id, m0, M_0 .. M_{n-1}.
std::string affine_map_csv(const std::vector<std::vector<double>>& M,
                           const std::vector<double>& m0);

std::string convergence_csv(const ConvergenceCurve& curve);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace mvg
