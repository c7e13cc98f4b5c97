#include "mvg/convergence.hpp"

#include <algorithm>
#include <cmath>

#include "mvg/rng.hpp"

namespace mvg {

namespace {

std::vector<int> sample_atoms(const TypeMeasure& measure, std::size_t n,
                              std::uint64_t seed, std::uint64_t stream) {
    std::vector<double> cum(measure.weights.size());
    double acc = 0.0;
    for (std::size_t k = 0; k < cum.size(); ++k) {
        acc += measure.weights[k];
        cum[k] = acc;
    }
    CounterRng rng(seed, stream);
    std::vector<int> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = rng.next_uniform();
        int a = 0;
        while (a + 1 < static_cast<int>(cum.size()) &&
               u > cum[static_cast<std::size_t>(a)])
            ++a;
        out[i] = a;
    }
    return out;
}

}  // namespace

std::vector<AgentType> sample_types(const TypeMeasure& measure, std::size_t n,
                                    std::uint64_t seed) {
    const auto atoms = sample_atoms(measure, n, seed, /*stream=*/0);
    std::vector<AgentType> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = measure.atoms[static_cast<std::size_t>(atoms[i])];
    return out;
}

ConvergenceCurve convergence_curve(const TypeMeasure& measure,
                                   const MarketParams& market,
                                   const NumericTolerances& tol,
                                   const std::vector<std::size_t>& n_values,
                                   std::size_t tracked_atom,
                                   std::uint64_t seed) {
    ConvergenceCurve curve;
    curve.n_values = n_values;
    curve.seed = seed;

    MfEquilibrium mfe = solve_mfg(measure, market, tol);
    const bool mf_ok = mfe.outcome.kind == OutcomeKind::Unique;
    const double x_bar = measure.mean_wealth();

    for (std::size_t n : n_values) {
        ConvergencePoint pt;
        pt.n = n;
        if (!mf_ok) {
            pt.degeneracy_flags = "mf_not_unique";
            curve.points.push_back(pt);
            continue;
        }
        const auto atoms = sample_atoms(measure, n, seed, /*stream=*/n);
        GameConfig cfg;
        cfg.market = market;
        cfg.tol = tol;
        cfg.agents.resize(n);
        std::vector<int> atom_ix(n);
        for (std::size_t j = 0; j < n; ++j) {
            atom_ix[j] = (j == 0) ? static_cast<int>(tracked_atom) : atoms[j];
            cfg.agents[j] = measure.atoms[static_cast<std::size_t>(atom_ix[j])];
        }
        WealthProfile x;
        x.x.resize(n);
        for (std::size_t j = 0; j < n; ++j) x.x[j] = cfg.agents[j].x0;

        try {
            const auto res = solve_n_agent(cfg, x);
            if (res.outcome.kind != OutcomeKind::Unique) {
                pt.degeneracy_flags =
                    std::string("outcome=") + to_string(res.outcome.kind);
                curve.points.push_back(pt);
                continue;
            }
            std::string flags;
            for (std::size_t j = 0; j < n; ++j) {
                if (std::abs(res.coeffs[j].N) < 1e-8) flags += "N~0;";
                if (std::abs(res.coeffs[j].Q) < 1e-8) flags += "Q~0;";
            }
            const double det_scale = std::max(
                {1.0, std::abs(res.terms.sig_k1), std::abs(res.terms.br_k2)});
            if (std::abs(res.terms.det()) < 1e2 * tol.det_tol * det_scale)
                flags += "det~0;";
            pt.degeneracy_flags = flags;

            double max_err = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                const double pi_n = res.solution.pi_hat[j];
                const double pi_mf = mfe.strategy(
                    static_cast<std::size_t>(atom_ix[j]), x.x[j], x_bar);
                const double err = std::abs(pi_n - pi_mf);
                if (j == 0) pt.tracked_error = err;
                max_err = std::max(max_err, err);
            }
            pt.max_error = max_err;
            pt.solved = true;
        } catch (const SolveError& e) {
            pt.degeneracy_flags = std::string("solve_failed: ") + e.what();
        }
        curve.points.push_back(pt);
    }
    return curve;
}

}  // namespace mvg
