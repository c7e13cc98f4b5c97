#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mvg/closed_forms.hpp"
#include "mvg/convergence.hpp"
#include "mvg/equilibrium.hpp"
#include "mvg/io.hpp"
#include "mvg/mean_field.hpp"
#include "mvg/populations.hpp"
#include "mvg/rng.hpp"
#include "mvg/simulator.hpp"
#include "mvg/types.hpp"

namespace {

using namespace mvg;

struct GlobalOpts {
    std::string config;
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    int root_index = -1;
    std::optional<double> root_tol, det_tol, kappa_tol, excl_tol;
};

void apply_tolerance_overrides(const GlobalOpts& g, NumericTolerances& tol) {
    if (g.root_tol) tol.root_tol = *g.root_tol;
    if (g.det_tol) tol.det_tol = *g.det_tol;
    if (g.kappa_tol) tol.kappa_tol = *g.kappa_tol;
    if (g.excl_tol) tol.excl_tol = *g.excl_tol;
}

int exit_code(OutcomeKind kind) {
    switch (kind) {
        case OutcomeKind::Unique: return 0;
        case OutcomeKind::InfiniteFamily: return 2;
        case OutcomeKind::Nonexistent: return 3;
    }
    return 1;
}

void print_outcome(const AggregateOutcome& o) {
    std::cout << "outcome: " << to_string(o.kind) << "\n"
              << "det: " << fmt17(o.det) << "\n";
    if (o.kappa_valid) std::cout << "kappa: " << fmt17(o.kappa) << "\n";
    if (!o.family_param_axis.empty())
        std::cout << "family_axis: " << o.family_param_axis << "\n";
}

WealthProfile initial_profile(const GameConfig& cfg) {
    WealthProfile x;
    x.x.reserve(cfg.n());
    for (const auto& a : cfg.agents) x.x.push_back(a.x0);
    return x;
}

int cmd_solve_n_agent(const GlobalOpts& g) {
    GameConfig cfg = load_game_config(g.config);
    apply_tolerance_overrides(g, cfg.tol);
    const auto x = initial_profile(cfg);
    const auto res = solve_n_agent(cfg, x, g.root_index);
    print_outcome(res.outcome);
    if (res.outcome.kind == OutcomeKind::Unique) {
        write_text_file(g.out_dir + "/solution.csv",
                        solution_csv(res.solution.per_agent,
                                     res.solution.pi_hat));
        write_text_file(g.out_dir + "/affine_map.csv",
                        affine_map_csv(res.solution.M, res.solution.m0));
    }
    return exit_code(res.outcome.kind);
}

int cmd_solve_mfg(const GlobalOpts& g) {
    TypeMeasure measure = load_type_measure(g.config);
    GameConfig raw = load_game_config(g.config);
    apply_tolerance_overrides(g, raw.tol);
    const auto eq = solve_mfg(measure, raw.market, raw.tol, g.root_index);
    print_outcome(eq.outcome);
    if (eq.outcome.kind == OutcomeKind::Unique)
        write_text_file(g.out_dir + "/mfg_solution.csv",
                        solution_csv(eq.per_atom, eq.pi_hat));
    return exit_code(eq.outcome.kind);
}

int cmd_limits(const GlobalOpts& g) {
    GameConfig cfg = load_game_config(g.config);
    apply_tolerance_overrides(g, cfg.tol);
    const auto x = initial_profile(cfg);
    std::ostringstream os;
    os << "regime,agent_id,outcome,pi_hat,slope_x,family_dir\n";

    const auto emit = [&os](const char* regime, const LimitStrategy& s) {
        for (std::size_t i = 0; i < s.slope_x.size(); ++i)
            os << regime << ',' << i << ',' << to_string(s.kind) << ','
               << (s.kind == OutcomeKind::Nonexistent
                       ? "nan"
                       : fmt17(s.pi_hat.empty() ? 0.0 : s.pi_hat[i]))
               << ',' << fmt17(s.slope_x[i]) << ',' << fmt17(s.family_dir[i])
               << '\n';
    };

    emit("lambda_inf", lambda_inf_n(cfg.agents, cfg.market.r, x.x));
    try {
        emit("state_indep_r0", state_indep_zero_rate_n(cfg.agents));
    } catch (const SolveError&) {
        os << "state_indep_r0,-1,precondition_failed,nan,nan,nan\n";
    }
    for (std::size_t i = 0; i < cfg.n(); ++i) {
        AgentType solo = cfg.agents[i];
        solo.phi = 0.0;
        try {
            const auto nc = no_competition(solo, cfg.market, cfg.tol);
            os << "no_competition," << i << ",Unique,"
               << fmt17(nc.zeta * solo.x0 + nc.varsigma) << ','
               << fmt17(nc.zeta) << ",0\n";
        } catch (const SolveError&) {
            os << "no_competition," << i << ",solve_failed,nan,nan,nan\n";
        }
    }
    write_text_file(g.out_dir + "/limits.csv", os.str());
    std::cout << os.str();
    return 0;
}

struct SweepOpts {
    std::string param = "phi";
    std::vector<double> grid;
    double grid_min = 0.0, grid_max = 1.0;
    std::size_t grid_points = 21;
    std::size_t target = 0;
};

void set_param(GameConfig& cfg, const std::string& param, std::size_t target,
               double v) {
    if (param == "lambda")
        cfg.market.lambda = v;
    else if (param == "phi")
        cfg.agents[target].phi = v;
    else if (param == "gamma")
        cfg.agents[target].gamma = v;
    else if (param == "mu1")
        cfg.agents[target].mu1 = v;
    else if (param == "mu2")
        cfg.agents[target].mu2 = v;
    else
        throw SolveError(SolveError::Kind::InvalidConfig,
                         "unknown sweep parameter: " + param);
}

int cmd_sweep(const GlobalOpts& g, const SweepOpts& s) {
    GameConfig base = load_game_config(g.config);
    apply_tolerance_overrides(g, base.tol);
    if (s.target >= base.n())
        throw SolveError(SolveError::Kind::InvalidConfig,
                         "target agent index out of range");
    std::vector<double> grid = s.grid;
    if (grid.empty()) {
        for (std::size_t k = 0; k < s.grid_points; ++k)
            grid.push_back(s.grid_min +
                           (s.grid_max - s.grid_min) * static_cast<double>(k) /
                               static_cast<double>(s.grid_points - 1));
    }
    std::ostringstream os;
    os << "param_value,pi_hat,pi_tilde,status\n";
    for (double v : grid) {
        GameConfig cfg = base;
        set_param(cfg, s.param, s.target, v);
        std::string status = "ok";
        double pi_hat = std::nan(""), pi_tilde = std::nan("");
        try {
            const auto res = solve_n_agent(cfg, initial_profile(cfg),
                                           g.root_index);
            if (res.outcome.kind == OutcomeKind::Unique)
                pi_hat = res.solution.pi_hat[s.target];
            else
                status = to_string(res.outcome.kind);
        } catch (const SolveError& e) {
            status = std::string("error: ") + e.what();
        }
        try {
            GameConfig nc = cfg;
            nc.agents[s.target].phi = 0.0;
            const auto res = solve_n_agent(nc, initial_profile(nc),
                                           g.root_index);
            if (res.outcome.kind == OutcomeKind::Unique)
                pi_tilde = res.solution.pi_hat[s.target];
        } catch (const SolveError&) {
        }
        os << fmt17(v) << ',' << fmt17(pi_hat) << ',' << fmt17(pi_tilde)
           << ',' << status << '\n';
    }
    write_text_file(g.out_dir + "/sweep.csv", os.str());
    std::cout << os.str();
    return 0;
}

struct SimOpts {
    std::size_t paths = 10000;
    double dt = 1e-3;
    double cap = 1e-6;
};

SimConfig make_sim(const GlobalOpts& g, const SimOpts& s) {
    SimConfig sim;
    sim.dt = s.dt;
    sim.n_paths = s.paths;
    sim.seed = g.seed;
    sim.horizon_cap_prob = s.cap;
    return sim;
}

int cmd_simulate(const GlobalOpts& g, const SimOpts& so) {
    GameConfig cfg = load_game_config(g.config);
    apply_tolerance_overrides(g, cfg.tol);
    const auto x = initial_profile(cfg);
    const auto res = solve_n_agent(cfg, x, g.root_index);
    if (res.outcome.kind != OutcomeKind::Unique) {
        print_outcome(res.outcome);
        return exit_code(res.outcome.kind);
    }
    const auto sim = make_sim(g, so);
    const auto ens = simulate_paths(cfg, equilibrium_strategy(res.solution), sim);
    std::ostringstream os;
    os << "agent_id,J_hat,J_se,V,G_hat,G_se,G,H_hat,H_se,H\n";
    for (std::size_t i = 0; i < cfg.n(); ++i) {
        const double y = leave_one_out_mean(x.x, i);
        const auto J = estimate_J(i, ens, cfg, x.x[i]);
        const auto [Gm, Hm] = estimate_G_H(i, ens, cfg.agents[i].phi);
        os << i << ',' << fmt17(J.mean) << ',' << fmt17(J.std_error) << ','
           << fmt17(evaluate_value(res.solution, i, x.x[i], y)) << ','
           << fmt17(Gm.mean) << ',' << fmt17(Gm.std_error) << ','
           << fmt17(evaluate_G(res.solution, i, x.x[i], y)) << ','
           << fmt17(Hm.mean) << ',' << fmt17(Hm.std_error) << ','
           << fmt17(evaluate_H(res.solution, i, x.x[i], y)) << '\n';
    }
    write_text_file(g.out_dir + "/simulate.csv", os.str());
    std::cout << os.str();
    std::cout << "truncated: " << ens.truncated << " aborted: " << ens.aborted
              << "\n";
    return 0;
}

struct DevOpts {
    std::size_t agent = 0;
    double epsilon = 0.01;
    std::string deviations = "default";
    SimOpts sim;
};

int cmd_deviation(const GlobalOpts& g, const DevOpts& d) {
    GameConfig cfg = load_game_config(g.config);
    apply_tolerance_overrides(g, cfg.tol);
    const auto x = initial_profile(cfg);
    const auto res = solve_n_agent(cfg, x, g.root_index);
    if (res.outcome.kind != OutcomeKind::Unique) {
        print_outcome(res.outcome);
        return exit_code(res.outcome.kind);
    }
    std::vector<double> devs;
    if (d.deviations == "default") {
        devs = default_deviations(res.solution.pi_hat[d.agent]);
    } else if (d.deviations != "none" && !d.deviations.empty()) {
        std::istringstream in(d.deviations);
        std::string tok;
        while (std::getline(in, tok, ',')) devs.push_back(std::stod(tok));
    }
    auto sim = make_sim(g, d.sim);
    sim.n_paths = std::max<std::size_t>(2, d.sim.paths);
    const auto reports = deviation_test(d.agent, cfg, res.solution, d.epsilon,
                                        devs, sim);
    std::ostringstream os;
    os << "epsilon,deviation,J_eq,J_eq_se,J_dev,J_dev_se,normalized_gap,"
          "gap_se,non_negative_within_3se\n";
    for (const auto& r : reports)
        os << fmt17(r.epsilon) << ',' << fmt17(r.deviation_value) << ','
           << fmt17(r.J_hat_equilibrium.mean) << ','
           << fmt17(r.J_hat_equilibrium.std_error) << ','
           << fmt17(r.J_hat_deviated.mean) << ','
           << fmt17(r.J_hat_deviated.std_error) << ','
           << fmt17(r.normalized_gap) << ',' << fmt17(r.gap_std_error) << ','
           << (r.non_negative_within_3se ? 1 : 0) << '\n';
    write_text_file(g.out_dir + "/deviation.csv", os.str());
    std::cout << os.str();
    return 0;
}

int cmd_convergence(const GlobalOpts& g, const std::string& n_values,
                    std::size_t tracked_atom) {
    TypeMeasure measure = load_type_measure(g.config);
    GameConfig raw = load_game_config(g.config);
    apply_tolerance_overrides(g, raw.tol);
    std::vector<std::size_t> ns;
    std::istringstream in(n_values);
    std::string tok;
    while (std::getline(in, tok, ',')) ns.push_back(std::stoul(tok));
    const auto curve = convergence_curve(measure, raw.market, raw.tol, ns,
                                         tracked_atom, g.seed);
    const auto csv = convergence_csv(curve);
    write_text_file(g.out_dir + "/convergence.csv", csv);
    std::cout << csv;
    return 0;
}

// Population recipes of the four benchmark experiments: 1000 type vectors
// drawn uniformly from the stated boxes, one swept coordinate per figure,
// and a pinned agent in slot 500 (index 499).
int cmd_gen_population(const GlobalOpts& g, int figure, std::size_t n) {
    std::size_t pin = 0;
    const GameConfig cfg = benchmark_population(figure, n, g.seed, pin);
    const std::string path = g.out_dir + "/population.json";
    save_game_config(cfg, path);
    std::cout << "wrote " << path << " (pinned agent index " << pin << ")\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"n-agent and mean-field mean-variance equilibrium solver"};
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--config", g.config, "JSON config path");
    app.add_option("--seed", g.seed, "RNG seed");
    app.add_option("--out-dir", g.out_dir, "output directory");
    app.add_option("--root-index", g.root_index,
                   "override canonical cubic-root selection");
    app.add_option("--root-tol", g.root_tol, "cubic residual tolerance");
    app.add_option("--det-tol", g.det_tol, "aggregate determinant threshold");
    app.add_option("--kappa-tol", g.kappa_tol, "kappa consistency threshold");
    app.add_option("--excl-tol", g.excl_tol, "parameter exclusion margin");
    app.fallthrough();

    auto* sub_solve = app.add_subcommand("solve-n-agent",
                                         "solve the finite-population game");
    auto* sub_mfg = app.add_subcommand("solve-mfg", "solve the mean-field game");
    auto* sub_limits = app.add_subcommand("limits", "closed-form limit regimes");

    SweepOpts sw;
    auto* sub_sweep = app.add_subcommand("sweep", "parameter sweep for one agent");
    sub_sweep->add_option("--param", sw.param, "phi|gamma|mu1|mu2|lambda");
    sub_sweep->add_option("--grid", sw.grid, "explicit grid values");
    sub_sweep->add_option("--grid-min", sw.grid_min);
    sub_sweep->add_option("--grid-max", sw.grid_max);
    sub_sweep->add_option("--grid-points", sw.grid_points);
    sub_sweep->add_option("--target-agent", sw.target);

    SimOpts so;
    auto* sub_sim = app.add_subcommand("simulate",
                                       "Monte Carlo check of V, G, H");
    sub_sim->add_option("--paths", so.paths);
    sub_sim->add_option("--dt", so.dt);
    sub_sim->add_option("--cap", so.cap);

    DevOpts dv;
    auto* sub_dev = app.add_subcommand("deviation", "epsilon-deviation test");
    sub_dev->add_option("--agent", dv.agent);
    sub_dev->add_option("--epsilon", dv.epsilon);
    sub_dev->add_option("--deviations", dv.deviations,
                        "'default', 'none', or comma-separated values");
    sub_dev->add_option("--paths", dv.sim.paths)->default_val(200000);
    sub_dev->add_option("--dt", dv.sim.dt);
    sub_dev->add_option("--cap", dv.sim.cap);

    std::string conv_ns = "10,100,1000";
    std::size_t tracked_atom = 0;
    auto* sub_conv = app.add_subcommand("convergence",
                                        "n-agent to mean-field convergence");
    sub_conv->add_option("--n-values", conv_ns);
    sub_conv->add_option("--tracked-atom", tracked_atom);

    int figure = 1;
    std::size_t pop_n = 1000;
    auto* sub_gen = app.add_subcommand("gen-population",
                                       "sample a benchmark population config");
    sub_gen->add_option("--figure", figure, "recipe 1..4");
    sub_gen->add_option("--n", pop_n);

    CLI11_PARSE(app, argc, argv);

    try {
        if (sub_solve->parsed()) return cmd_solve_n_agent(g);
        if (sub_mfg->parsed()) return cmd_solve_mfg(g);
        if (sub_limits->parsed()) return cmd_limits(g);
        if (sub_sweep->parsed()) return cmd_sweep(g, sw);
        if (sub_sim->parsed()) return cmd_simulate(g, so);
        if (sub_dev->parsed()) return cmd_deviation(g, dv);
        if (sub_conv->parsed()) return cmd_convergence(g, conv_ns, tracked_atom);
        if (sub_gen->parsed()) return cmd_gen_population(g, figure, pop_n);
    } catch (const SolveError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
