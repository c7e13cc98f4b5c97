#include "mvg/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "mvg/rng.hpp"

namespace mvg {

namespace {

// Per-path noise source; antithetic partner paths share a stream and flip
// every draw (1-u for uniforms, -g for normals).
struct PathNoise {
    CounterRng rng;
    bool flip;

    PathNoise(std::uint64_t seed, std::uint64_t stream, bool flip)
        : rng(seed, stream), flip(flip) {}

    double uniform() {
        const double u = rng.next_uniform();
        return flip ? 1.0 - u : u;
    }
    double gauss() {
        const double g = rng.next_gauss();
        return flip ? -g : g;
    }
};

unsigned resolve_threads(const SimConfig& sim) {
    if (sim.n_threads) return sim.n_threads;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

struct PathStats {
    std::size_t truncated = 0;
    std::size_t aborted = 0;
};

// Simulates paths [first, last) into the preallocated ensemble slices.
void run_paths(const GameConfig& cfg, const FeedbackStrategy& strategy,
               const SimConfig& sim, double T_max, std::size_t first,
               std::size_t last, PathEnsemble& out, PathStats& stats) {
    const std::size_t n = cfg.n();
    const double r = cfg.market.r;
    std::vector<double> x(n), pi(n);
    const double sqrt_dt = std::sqrt(sim.dt);

    for (std::size_t path = first; path < last; ++path) {
        const std::uint64_t stream = sim.antithetic ? path / 2 : path;
        const bool flip = sim.antithetic && (path % 2 == 1);
        PathNoise noise(sim.seed, stream, flip);

        bool trunc = false;
        double tau;
        if (sim.fixed_horizon) {
            noise.uniform();  // keep draw alignment with the random case
            tau = *sim.fixed_horizon;
        } else {
            tau = sample_horizon(cfg.market.lambda, noise.uniform(), T_max,
                                 trunc);
        }
        if (trunc) ++stats.truncated;
        out.taus[path] = tau;

        for (std::size_t i = 0; i < n; ++i) x[i] = cfg.agents[i].x0;
        double t = 0.0;
        bool ok = true;
        while (t < tau) {
            const double h = std::min(sim.dt, tau - t);
            const double sqrt_h = (h == sim.dt) ? sqrt_dt : std::sqrt(h);
            const double zb = noise.gauss();
            strategy(t, x, pi);
            for (std::size_t i = 0; i < n; ++i) {
                const auto& ag = cfg.agents[i];
                const double zi = noise.gauss();
                x[i] += (r * x[i] + (ag.b - r) * pi[i]) * h +
                        ag.xi * pi[i] * sqrt_h * zi +
                        ag.sigma * pi[i] * sqrt_h * zb;
                if (!std::isfinite(x[i])) ok = false;
            }
            if (!ok) break;
            t += h;
        }
        out.valid[path] = ok ? 1 : 0;
        if (!ok) ++stats.aborted;
        for (std::size_t i = 0; i < n; ++i) out.final_x[path * n + i] = x[i];
    }
}

McEstimate moment_estimate(const std::vector<double>& v) {
    McEstimate e;
    e.n_effective = v.size();
    if (v.empty()) return e;
    double m = 0.0;
    for (double z : v) m += z;
    m /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double z : v) ss += (z - m) * (z - m);
    e.mean = m;
    if (v.size() > 1)
        e.std_error = std::sqrt(ss / static_cast<double>(v.size() - 1) /
                                static_cast<double>(v.size()));
    return e;
}

// Per-path delta-method influence values of the J estimator.
std::vector<double> j_influence(const std::vector<double>& z, double weight,
                                double gamma, double& J_out) {
    const double N = static_cast<double>(z.size());
    double m = 0.0;
    for (double zi : z) m += zi;
    m /= N;
    double v = 0.0;
    for (double zi : z) v += (zi - m) * (zi - m);
    v /= std::max(1.0, N - 1.0);
    J_out = weight * m - gamma * v;
    std::vector<double> inf(z.size());
    for (std::size_t k = 0; k < z.size(); ++k)
        inf[k] = weight * (z[k] - m) - gamma * ((z[k] - m) * (z[k] - m) - v);
    return inf;
}

}  // namespace

double horizon_cap(double lambda, double cap_prob) {
    return -std::log(cap_prob) / lambda;
}

double sample_horizon(double lambda, double u, double T_max, bool& truncated) {
    const double tau = -std::log(u) / lambda;
    truncated = tau > T_max;
    return truncated ? T_max : tau;
}

PathEnsemble simulate_paths(const GameConfig& cfg,
                            const FeedbackStrategy& strategy,
                            const SimConfig& sim) {
    if (!(sim.dt > 0.0) || sim.n_paths < 2 || !(sim.horizon_cap_prob > 0.0) ||
        !(sim.horizon_cap_prob < 1.0))
        throw SolveError(SolveError::Kind::InvalidConfig,
                         "simulation config violates dt > 0, n_paths >= 2, "
                         "cap in (0,1)");
    PathEnsemble out;
    out.n_agents = cfg.n();
    out.n_paths = sim.n_paths;
    out.final_x.resize(sim.n_paths * cfg.n());
    out.taus.resize(sim.n_paths);
    out.valid.resize(sim.n_paths);
    const double T_max = horizon_cap(cfg.market.lambda, sim.horizon_cap_prob);

    const unsigned n_threads =
        std::min<std::size_t>(resolve_threads(sim), sim.n_paths);
    std::vector<PathStats> stats(n_threads);
    std::vector<std::thread> pool;
    const std::size_t chunk = (sim.n_paths + n_threads - 1) / n_threads;
    for (unsigned w = 0; w < n_threads; ++w) {
        const std::size_t first = w * chunk;
        const std::size_t last = std::min(sim.n_paths, first + chunk);
        if (first >= last) break;
        pool.emplace_back([&, first, last, w] {
            run_paths(cfg, strategy, sim, T_max, first, last, out, stats[w]);
        });
    }
    for (auto& th : pool) th.join();
    for (const auto& s : stats) {
        out.truncated += s.truncated;
        out.aborted += s.aborted;
    }
    return out;
}

FeedbackStrategy equilibrium_strategy(const EquilibriumSolution& sol) {
    return [&sol](double, const std::vector<double>& x,
                  std::vector<double>& pi) {
        for (std::size_t i = 0; i < sol.m0.size(); ++i)
            pi[i] = sol.strategy(i, x);
    };
}

std::vector<double> relative_terminal_wealth(const PathEnsemble& ensemble,
                                             std::size_t i, double phi) {
    const double n = static_cast<double>(ensemble.n_agents);
    std::vector<double> z;
    z.reserve(ensemble.n_paths);
    for (std::size_t p = 0; p < ensemble.n_paths; ++p) {
        if (!ensemble.valid[p]) continue;
        double peers = 0.0;
        for (std::size_t j = 0; j < ensemble.n_agents; ++j)
            if (j != i) peers += ensemble.x_at(p, j);
        z.push_back((1.0 - phi / n) * ensemble.x_at(p, i) -
                    phi * peers / n);
    }
    return z;
}

McEstimate estimate_J(std::size_t i, const PathEnsemble& ensemble,
                      const GameConfig& cfg, double x0_i) {
    const auto& ag = cfg.agents[i];
    const auto z = relative_terminal_wealth(ensemble, i, ag.phi);
    McEstimate e;
    e.n_effective = z.size();
    if (z.size() < 2) return e;
    double J;
    const auto inf = j_influence(z, ag.mu1 * x0_i + ag.mu2, ag.gamma, J);
    e.mean = J;
    e.std_error = moment_estimate(inf).std_error;
    return e;
}

std::pair<McEstimate, McEstimate> estimate_G_H(std::size_t i,
                                               const PathEnsemble& ensemble,
                                               double phi) {
    const auto z = relative_terminal_wealth(ensemble, i, phi);
    std::vector<double> z2(z.size());
    for (std::size_t k = 0; k < z.size(); ++k) z2[k] = z[k] * z[k];
    return {moment_estimate(z), moment_estimate(z2)};
}

std::vector<DeviationReport> deviation_test_baseline(
    std::size_t i, const GameConfig& cfg, const FeedbackStrategy& baseline,
    double x0_i, double epsilon, const std::vector<double>& deviations,
    const SimConfig& sim) {
    std::vector<DeviationReport> reports;
    if (deviations.empty()) return reports;

    const auto base_ens = simulate_paths(cfg, baseline, sim);
    const auto& ag = cfg.agents[i];
    const double weight = ag.mu1 * x0_i + ag.mu2;

    for (double dev : deviations) {
        FeedbackStrategy deviated = [&baseline, i, dev, epsilon](
                                        double t, const std::vector<double>& x,
                                        std::vector<double>& pi) {
            baseline(t, x, pi);
            if (t < epsilon) pi[i] = dev;
        };
        const auto dev_ens = simulate_paths(cfg, deviated, sim);

        // Paired comparison over paths valid in both ensembles.
        std::vector<double> zb, zd;
        zb.reserve(sim.n_paths);
        zd.reserve(sim.n_paths);
        const double n = static_cast<double>(cfg.n());
        for (std::size_t p = 0; p < sim.n_paths; ++p) {
            if (!base_ens.valid[p] || !dev_ens.valid[p]) continue;
            double pb = 0.0, pd = 0.0;
            for (std::size_t j = 0; j < cfg.n(); ++j)
                if (j != i) {
                    pb += base_ens.x_at(p, j);
                    pd += dev_ens.x_at(p, j);
                }
            zb.push_back((1.0 - ag.phi / n) * base_ens.x_at(p, i) -
                         ag.phi * pb / n);
            zd.push_back((1.0 - ag.phi / n) * dev_ens.x_at(p, i) -
                         ag.phi * pd / n);
        }

        DeviationReport rep;
        rep.epsilon = epsilon;
        rep.deviation_value = dev;
        if (zb.size() >= 2) {
            double Jb, Jd;
            const auto inf_b = j_influence(zb, weight, ag.gamma, Jb);
            const auto inf_d = j_influence(zd, weight, ag.gamma, Jd);
            rep.J_hat_equilibrium.mean = Jb;
            rep.J_hat_equilibrium.std_error = moment_estimate(inf_b).std_error;
            rep.J_hat_equilibrium.n_effective = zb.size();
            rep.J_hat_deviated.mean = Jd;
            rep.J_hat_deviated.std_error = moment_estimate(inf_d).std_error;
            rep.J_hat_deviated.n_effective = zd.size();

            std::vector<double> diff(zb.size());
            for (std::size_t k = 0; k < zb.size(); ++k)
                diff[k] = inf_b[k] - inf_d[k];
            rep.normalized_gap = (Jb - Jd) / epsilon;
            rep.gap_std_error = moment_estimate(diff).std_error / epsilon;
            rep.non_negative_within_3se =
                rep.normalized_gap >= -3.0 * rep.gap_std_error;
        }
        reports.push_back(rep);
    }
    return reports;
}

std::vector<DeviationReport> deviation_test(std::size_t i,
                                            const GameConfig& cfg,
                                            const EquilibriumSolution& sol,
                                            double epsilon,
                                            const std::vector<double>& deviations,
                                            const SimConfig& sim) {
    if (sol.outcome.kind != OutcomeKind::Unique)
        throw SolveError(SolveError::Kind::NotUnique,
                         "deviation test requires a unique equilibrium");
    return deviation_test_baseline(i, cfg, equilibrium_strategy(sol),
                                   sol.frozen_profile.x[i], epsilon,
                                   deviations, sim);
}

std::vector<double> default_deviations(double pi_hat) {
    return {0.5 * pi_hat, 0.9 * pi_hat, 1.1 * pi_hat, 1.5 * pi_hat,
            pi_hat + 1.0, pi_hat - 1.0};
}

std::vector<PathEnsemble> refinement_study(const GameConfig& cfg,
                                           const FeedbackStrategy& strategy,
                                           double horizon,
                                           const std::vector<double>& dts,
                                           std::size_t n_paths,
                                           std::uint64_t seed) {
    if (dts.empty() || horizon <= 0.0)
        throw SolveError(SolveError::Kind::InvalidConfig,
                         "refinement study needs a horizon and step sizes");
    const double dt_ref = dts.back();
    const std::size_t n = cfg.n();
    const std::size_t L = dts.size();
    std::vector<std::size_t> ratio(L);
    for (std::size_t l = 0; l < L; ++l) {
        ratio[l] = static_cast<std::size_t>(std::llround(dts[l] / dt_ref));
        if (std::abs(ratio[l] * dt_ref - dts[l]) > 1e-12 * dts[l])
            throw SolveError(SolveError::Kind::InvalidConfig,
                             "each step size must be a multiple of the finest");
    }
    const std::size_t fine_steps =
        static_cast<std::size_t>(std::llround(horizon / dt_ref));

    std::vector<PathEnsemble> out(L);
    for (std::size_t l = 0; l < L; ++l) {
        out[l].n_agents = n;
        out[l].n_paths = n_paths;
        out[l].final_x.resize(n_paths * n);
        out[l].taus.assign(n_paths, horizon);
        out[l].valid.assign(n_paths, 1);
    }

    std::vector<std::vector<double>> x(L), dW(L);  // dW: common + per agent
    std::vector<double> pi(n);
    for (std::size_t path = 0; path < n_paths; ++path) {
        CounterRng rng(seed, path);
        for (std::size_t l = 0; l < L; ++l) {
            x[l].resize(n);
            for (std::size_t i = 0; i < n; ++i) x[l][i] = cfg.agents[i].x0;
            dW[l].assign(n + 1, 0.0);
        }
        const double sqrt_ref = std::sqrt(dt_ref);
        for (std::size_t s = 1; s <= fine_steps; ++s) {
            const double zb = rng.next_gauss();
            for (std::size_t l = 0; l < L; ++l) dW[l][0] += sqrt_ref * zb;
            for (std::size_t i = 0; i < n; ++i) {
                const double zi = rng.next_gauss();
                for (std::size_t l = 0; l < L; ++l)
                    dW[l][i + 1] += sqrt_ref * zi;
            }
            for (std::size_t l = 0; l < L; ++l) {
                if (s % ratio[l] != 0) continue;
                const double h = dts[l];
                strategy((static_cast<double>(s) - ratio[l]) * dt_ref, x[l], pi);
                for (std::size_t i = 0; i < n; ++i) {
                    const auto& ag = cfg.agents[i];
                    x[l][i] += (cfg.market.r * x[l][i] +
                                (ag.b - cfg.market.r) * pi[i]) * h +
                               ag.xi * pi[i] * dW[l][i + 1] +
                               ag.sigma * pi[i] * dW[l][0];
                    if (!std::isfinite(x[l][i])) out[l].valid[path] = 0;
                }
                dW[l].assign(n + 1, 0.0);
            }
        }
        for (std::size_t l = 0; l < L; ++l) {
            if (!out[l].valid[path]) ++out[l].aborted;
            for (std::size_t i = 0; i < n; ++i)
                out[l].final_x[path * n + i] = x[l][i];
        }
    }
    return out;
}

MfEnsemble mf_simulate(const TypeMeasure& measure, const MfEquilibrium& mf_eq,
                       std::size_t K, const SimConfig& sim) {
    if (mf_eq.outcome.kind != OutcomeKind::Unique)
        throw SolveError(SolveError::Kind::NotUnique,
                         "mean-field simulation requires a unique equilibrium");
    MfEnsemble out;
    out.K = K;
    out.n_reps = sim.n_paths;
    out.grid_dt = sim.dt;
    out.final_x.resize(sim.n_paths * K);
    out.taus.resize(sim.n_paths * K);
    const double lambda = mf_eq.market.lambda;
    const double r = mf_eq.market.r;
    const double T_max = horizon_cap(lambda, sim.horizon_cap_prob);

    // Cumulative weights for inverse-CDF type sampling.
    std::vector<double> cum(measure.weights.size());
    double acc = 0.0;
    for (std::size_t k = 0; k < cum.size(); ++k) {
        acc += measure.weights[k];
        cum[k] = acc;
    }

    std::vector<double> x(K), tau(K), finals(K);
    std::vector<int> atom(K);
    std::vector<std::uint8_t> done(K);
    for (std::size_t rep = 0; rep < sim.n_paths; ++rep) {
        const std::uint64_t base = (static_cast<std::uint64_t>(rep) << 24);
        CounterRng common(sim.seed, base);
        std::vector<CounterRng> prng;
        prng.reserve(K);
        for (std::size_t p = 0; p < K; ++p) prng.emplace_back(sim.seed, base + 1 + p);

        double t_end = 0.0;
        for (std::size_t p = 0; p < K; ++p) {
            const double u_type = prng[p].next_uniform();
            int a = 0;
            while (a + 1 < static_cast<int>(cum.size()) &&
                   u_type > cum[static_cast<std::size_t>(a)])
                ++a;
            atom[p] = a;
            x[p] = measure.atoms[static_cast<std::size_t>(a)].x0;
            bool trunc = false;
            tau[p] = sim.fixed_horizon
                         ? (prng[p].next_uniform(), *sim.fixed_horizon)
                         : sample_horizon(lambda, prng[p].next_uniform(),
                                          T_max, trunc);
            if (trunc) ++out.truncated;
            done[p] = 0;
            t_end = std::max(t_end, tau[p]);
        }

        const bool record = (rep == sim.n_paths - 1);
        if (record) {
            out.atom_of.assign(atom.begin(), atom.end());
            out.xbar_path.clear();
            out.pi0.assign(K, 0.0);
        }

        double t = 0.0;
        while (t < t_end) {
            double xbar = 0.0;
            for (std::size_t p = 0; p < K; ++p) xbar += x[p];
            xbar /= static_cast<double>(K);
            if (record) out.xbar_path.push_back(xbar);

            const double zb = common.next_gauss();
            const double sqrt_dt = std::sqrt(sim.dt);
            for (std::size_t p = 0; p < K; ++p) {
                const auto& ag = measure.atoms[static_cast<std::size_t>(atom[p])];
                const double pi =
                    mf_eq.strategy(static_cast<std::size_t>(atom[p]), x[p], xbar);
                if (record && t == 0.0) out.pi0[p] = pi;
                const double zi = prng[p].next_gauss();
                if (!done[p] && tau[p] < t + sim.dt) {
                    // Partial step to the particle's own horizon; the particle
                    // keeps evolving afterwards so the average stays unbiased.
                    const double h = tau[p] - t;
                    const double sh = std::sqrt(h);
                    finals[p] = x[p] + (r * x[p] + (ag.b - r) * pi) * h +
                                ag.xi * pi * sh * zi + ag.sigma * pi * sh * zb;
                    done[p] = 1;
                }
                x[p] += (r * x[p] + (ag.b - r) * pi) * sim.dt +
                        ag.xi * pi * sqrt_dt * zi + ag.sigma * pi * sqrt_dt * zb;
            }
            t += sim.dt;
        }
        for (std::size_t p = 0; p < K; ++p) {
            if (!done[p]) finals[p] = x[p];
            out.final_x[rep * K + p] = finals[p];
            out.taus[rep * K + p] = tau[p];
        }
    }
    return out;
}

}  // namespace mvg
