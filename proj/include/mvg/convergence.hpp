#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mvg/mean_field.hpp"
#include "mvg/types.hpp"

namespace mvg {

struct ConvergencePoint {
    std::size_t n = 0;
    double tracked_error = 0.0;
    double max_error = 0.0;
    bool solved = false;
    std::string degeneracy_flags;  // empty when all nondegeneracy checks pass
};

struct ConvergenceCurve {
    std::vector<std::size_t> n_values;
    std::vector<ConvergencePoint> points;
    std::uint64_t seed = 0;
};

// n i.i.d. draws from the discrete measure by inverse CDF; deterministic.
std::vector<AgentType> sample_types(const TypeMeasure& measure, std::size_t n,
                                    std::uint64_t seed);

// For each n: sample a population (agent 0 forced to the tracked atom's type),
// solve the n-agent game, and compare each sampled agent's strategy at
// (x = own x0, peers at their sampled x0) against the mean-field strategy of
// its own atom at (x0, x_bar = E[x0]).
ConvergenceCurve convergence_curve(const TypeMeasure& measure,
                                   const MarketParams& market,
                                   const NumericTolerances& tol,
                                   const std::vector<std::size_t>& n_values,
                                   std::size_t tracked_atom,
                                   std::uint64_t seed);

}  // namespace mvg
