#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "mvg/equilibrium.hpp"
#include "mvg/mean_field.hpp"
#include "mvg/types.hpp"

namespace mvg {

struct SimConfig {
    double dt = 1e-3;
    std::size_t n_paths = 10000;
    std::uint64_t seed = 0;
    double horizon_cap_prob = 1e-6;  // T_max = -ln(cap)/lambda
    bool antithetic = false;
    unsigned n_threads = 0;  // 0 = hardware concurrency
    // When set, every path uses this deterministic horizon instead of an
    // exponential draw (step-size refinement studies).
    std::optional<double> fixed_horizon;
};

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t n_effective = 0;
};

// Feedback control: fills pi with each agent's investment at time t, state x.
using FeedbackStrategy =
    std::function<void(double t, const std::vector<double>& x,
                       std::vector<double>& pi)>;

// Terminal states X(tau) of a path ensemble, flattened path-major.
struct PathEnsemble {
    std::size_t n_agents = 0;
    std::size_t n_paths = 0;
    std::vector<double> final_x;     // n_paths * n_agents
    std::vector<double> taus;        // per path
    std::vector<std::uint8_t> valid; // 0 when a path hit a non-finite state
    std::size_t truncated = 0;       // tau draws clipped at T_max
    std::size_t aborted = 0;

    double x_at(std::size_t path, std::size_t agent) const {
        return final_x[path * n_agents + agent];
    }
};

struct DeviationReport {
    double epsilon = 0.0;
    double deviation_value = 0.0;
    McEstimate J_hat_equilibrium;
    McEstimate J_hat_deviated;
    double normalized_gap = 0.0;  // (J(eq) - J(dev)) / eps
    double gap_std_error = 0.0;   // paired-path SE of the normalized gap
    bool non_negative_within_3se = false;
};

double horizon_cap(double lambda, double cap_prob);

// Exponential draw by inverse transform on the given uniform, clipped at
// T_max; sets truncated when the clip binds.
double sample_horizon(double lambda, double u, double T_max, bool& truncated);

// Euler-Maruyama with a shared per-step common-noise normal, per-agent
// idiosyncratic normals, and a partial final step of length tau - t_k.
PathEnsemble simulate_paths(const GameConfig& cfg,
                            const FeedbackStrategy& strategy,
                            const SimConfig& sim);

// Time-homogeneous strategy from an assembled equilibrium (affine map).
FeedbackStrategy equilibrium_strategy(const EquilibriumSolution& sol);

// Relative terminal wealth Z = (1 - phi/n) X_i(tau) - phi * Y_{-i}(tau).
std::vector<double> relative_terminal_wealth(const PathEnsemble& ensemble,
                                             std::size_t i, double phi);

// J = (mu1 x_i + mu2) mean[Z] - gamma var[Z]; the standard error combines the
// two terms through the per-path influence value
//   (mu1 x_i + mu2)(Z - m) - gamma ((Z - m)^2 - v),
// the delta-method linearization of the estimator.
McEstimate estimate_J(std::size_t i, const PathEnsemble& ensemble,
                      const GameConfig& cfg, double x0_i);

// Sample moments of Z for comparison against G and H at t = 0.
std::pair<McEstimate, McEstimate> estimate_G_H(std::size_t i,
                                               const PathEnsemble& ensemble,
                                               double phi);

// Deviation experiment against an arbitrary baseline feedback: agent i plays
// the constant deviation on [0, eps ^ tau), everyone follows the baseline
// otherwise. Both ensembles consume identical noise (same seed layout).
std::vector<DeviationReport> deviation_test_baseline(
    std::size_t i, const GameConfig& cfg, const FeedbackStrategy& baseline,
    double x0_i, double epsilon, const std::vector<double>& deviations,
    const SimConfig& sim);

std::vector<DeviationReport> deviation_test(std::size_t i,
                                            const GameConfig& cfg,
                                            const EquilibriumSolution& sol,
                                            double epsilon,
                                            const std::vector<double>& deviations,
                                            const SimConfig& sim);

// pi_hat * {0.5, 0.9, 1.1, 1.5} and pi_hat +/- 1.
std::vector<double> default_deviations(double pi_hat);

// Particle approximation of the conditional-mean process: K particles with
// types drawn from the measure share one common-noise path per replication;
// the running particle average stands in for x_bar in each strategy.
struct MfEnsemble {
    std::size_t K = 0;
    std::size_t n_reps = 0;
    std::vector<int> atom_of;        // particle type indices (per replication)
    std::vector<double> final_x;     // reps * K, state at each particle's tau
    std::vector<double> taus;        // reps * K
    std::vector<double> xbar_path;   // particle average on the grid, last rep
    std::vector<double> pi0;         // strategies at t = 0, last rep
    double grid_dt = 0.0;
    std::size_t truncated = 0;
};

MfEnsemble mf_simulate(const TypeMeasure& measure, const MfEquilibrium& mf_eq,
                       std::size_t K, const SimConfig& sim);

// Step-size refinement study over a fixed horizon: every level re-uses the
// same Brownian increments (coarse steps sum the fine ones), so level
// differences isolate the discretization bias from the Monte Carlo noise.
// dts must be sorted descending with each entry an integer multiple of the
// last (the reference level). Returns one ensemble per level.
std::vector<PathEnsemble> refinement_study(const GameConfig& cfg,
                                           const FeedbackStrategy& strategy,
                                           double horizon,
                                           const std::vector<double>& dts,
                                           std::size_t n_paths,
                                           std::uint64_t seed);

}  // namespace mvg
