#pragma once

#include <vector>

#include "mvg/coeffs.hpp"
#include "mvg/equilibrium.hpp"
#include "mvg/types.hpp"

namespace mvg {

// Representative-agent equilibrium over a discrete type measure. The
// aggregate terms are measure expectations; the population mean wealth is
// frozen at E[x0] for coefficient completion.
struct MfEquilibrium {
    TypeMeasure measure;
    MarketParams market;
    NumericTolerances tol;
    std::vector<AgentCoefficients> per_atom;
    AggregateTerms terms;
    AggregateOutcome outcome;
    double x_bar = 0.0;          // E[x0]
    std::vector<double> pi_hat;  // per atom at (x0, x_bar)
    std::vector<FrozenHats> hats;

    // pi_hat(x, x_bar) for the given atom's type.
    double strategy(std::size_t atom, double x, double x_bar_state) const;
};

std::vector<AgentCoefficients> build_mf_coefficients(
    const TypeMeasure& measure, const MarketParams& market,
    const NumericTolerances& tol, int root_index = -1);

AggregateTerms build_mf_aggregates(const std::vector<AgentCoefficients>& coeffs,
                                   const TypeMeasure& measure,
                                   const MarketParams& market);

// Full pipeline; assembly (strategies, hats, completion) only when Unique.
MfEquilibrium solve_mfg(const TypeMeasure& measure, const MarketParams& market,
                        const NumericTolerances& tol, int root_index = -1);

double mf_value(const MfEquilibrium& eq, std::size_t atom, double x,
                double x_bar);
double mf_G(const MfEquilibrium& eq, std::size_t atom, double x, double x_bar);
double mf_H(const MfEquilibrium& eq, std::size_t atom, double x, double x_bar);

double mf_vgh_check(const MfEquilibrium& eq, std::size_t atom,
                    const std::vector<double>& xs,
                    const std::vector<double>& xbars);

HjbResiduals mf_hjb_residuals(const MfEquilibrium& eq, std::size_t atom,
                              const std::vector<double>& xs,
                              const std::vector<double>& xbars);

}  // namespace mvg
