#include "mvg/equilibrium.hpp"

#include <algorithm>
#include <cmath>

namespace mvg {

namespace {

// Compensated accumulator so aggregate sums are order-robust at n ~ 10^3+.
struct KahanSum {
    double s = 0.0, c = 0.0;
    void add(double v) {
        const double y = v - c;
        const double t = s + y;
        c = (t - s) - y;
        s = t;
    }
};

double det_scale(const AggregateTerms& t) {
    return std::max({1.0, std::abs((t.br_k2 - 1.0) * (t.sig_k1 - 1.0)),
                     std::abs(t.sig_k2 * t.br_k1)});
}

}  // namespace

const char* to_string(OutcomeKind kind) {
    switch (kind) {
        case OutcomeKind::Unique: return "Unique";
        case OutcomeKind::InfiniteFamily: return "InfiniteFamily";
        case OutcomeKind::Nonexistent: return "Nonexistent";
    }
    return "?";
}

std::vector<AgentCoefficients> build_all_coefficients(const GameConfig& cfg,
                                                      int root_index) {
    require_valid(cfg);
    const double n = static_cast<double>(cfg.n());
    std::vector<AgentCoefficients> out;
    out.reserve(cfg.n());
    for (std::size_t i = 0; i < cfg.n(); ++i) {
        const double phi_n = 1.0 - cfg.agents[i].phi / n;
        out.push_back(build_agent_coefficients(cfg.agents[i], cfg.market, phi_n,
                                               1.0 / n, cfg.tol, root_index,
                                               static_cast<int>(i)));
    }
    return out;
}

AggregateTerms build_aggregates(const std::vector<AgentCoefficients>& coeffs,
                                const GameConfig& cfg,
                                const WealthProfile& x) {
    if (coeffs.size() != cfg.n() || x.x.size() != cfg.n())
        throw SolveError(SolveError::Kind::Precondition,
                         "coefficient/profile size mismatch");
    const double n = static_cast<double>(cfg.n());
    KahanSum spx, sqy, bpx, bqy, sk1, sk2, sk3, bk1, bk2, bk3;
    for (std::size_t i = 0; i < cfg.n(); ++i) {
        const auto& co = coeffs[i];
        const auto& ag = cfg.agents[i];
        const double br = ag.b - cfg.market.r;
        const double w = 1.0 / (n * co.N);
        const double y = leave_one_out_mean(x.x, i);
        spx.add(ag.sigma * co.rho * co.p * x.x[i] * w);
        sqy.add(ag.sigma * co.rho * co.q * y * w);
        bpx.add(br * co.rho * co.p * x.x[i] * w);
        bqy.add(br * co.rho * co.q * y * w);
        sk1.add(ag.sigma * co.k1 * w);
        sk2.add(ag.sigma * co.k2 * w);
        sk3.add(ag.sigma * co.k3 * w);
        bk1.add(br * co.k1 * w);
        bk2.add(br * co.k2 * w);
        bk3.add(br * co.k3 * w);
    }
    AggregateTerms t;
    t.sig_rho_px = spx.s; t.sig_rho_qy = sqy.s;
    t.br_rho_px = bpx.s; t.br_rho_qy = bqy.s;
    t.sig_k1 = sk1.s; t.sig_k2 = sk2.s; t.sig_k3 = sk3.s;
    t.br_k1 = bk1.s; t.br_k2 = bk2.s; t.br_k3 = bk3.s;
    return t;
}

AggregateOutcome solve_aggregates(const AggregateTerms& t,
                                  const NumericTolerances& tol) {
    AggregateOutcome out;
    out.det = t.det();
    const double scale = det_scale(t);
    if (std::abs(out.det) > tol.det_tol * scale) {
        out.kind = OutcomeKind::Unique;
        const double ss = t.sig_state(), sb = t.br_state();
        out.sigma_pi_bar = ((1.0 - t.br_k2) * ss + t.sig_k2 * sb) / out.det;
        out.br_pi_bar = ((1.0 - t.sig_k1) * sb + t.br_k1 * ss) / out.det;
        return out;
    }

    // Singular coefficient matrix: classify by row consistency. Rows are
    // (sig_k1-1, sig_k2 | -sig_state) and (br_k1, br_k2-1 | -br_state).
    const double r1a = t.sig_k1 - 1.0, r1b = t.sig_k2, r1s = t.sig_state();
    const double r2a = t.br_k1, r2b = t.br_k2 - 1.0, r2s = t.br_state();
    const double cs = std::max({1.0, std::abs(r1a), std::abs(r1b),
                                std::abs(r2a), std::abs(r2b)});
    const double vs = std::max({1.0, std::abs(r1s), std::abs(r2s)});
    const bool r1_zero = std::abs(r1a) <= tol.kappa_tol * cs &&
                         std::abs(r1b) <= tol.kappa_tol * cs;
    const bool r2_zero = std::abs(r2a) <= tol.kappa_tol * cs &&
                         std::abs(r2b) <= tol.kappa_tol * cs;

    auto family = [&](double kappa, bool kv, const char* axis) {
        out.kind = OutcomeKind::InfiniteFamily;
        out.kappa = kappa;
        out.kappa_valid = kv;
        out.family_param_axis = axis;
        return out;
    };
    auto nonexistent = [&]() {
        out.kind = OutcomeKind::Nonexistent;
        return out;
    };

    if (r1_zero && r2_zero) {
        if (std::abs(r1s) <= tol.kappa_tol * vs && std::abs(r2s) <= tol.kappa_tol * vs)
            return family(0.0, false, "both aggregates free");
        return nonexistent();
    }
    if (r2_zero) {
        // br equation is vacuous iff its constant vanishes too.
        if (std::abs(r2s) <= tol.kappa_tol * vs)
            return family(0.0, false,
                          "one free direction in (sigma_pi_bar, br_pi_bar)");
        return nonexistent();
    }
    if (r1_zero) {
        if (std::abs(r1s) <= tol.kappa_tol * vs)
            return family(0.0, false,
                          "one free direction in (sigma_pi_bar, br_pi_bar)");
        return nonexistent();
    }
    // Generic singular case: rows proportional in coefficients; the system is
    // solvable iff the constants follow with the same factor kappa.
    const double kappa = std::abs(r2a) >= std::abs(r2b) ? r1a / r2a : r1b / r2b;
    out.kappa = kappa;
    out.kappa_valid = true;
    const double ks = std::max({1.0, std::abs(r1s), std::abs(kappa * r2s),
                                std::abs(r1a), std::abs(kappa * r2a),
                                std::abs(r1b), std::abs(kappa * r2b)});
    const bool consistent =
        std::abs(r1a - kappa * r2a) <= tol.kappa_tol * ks &&
        std::abs(r1b - kappa * r2b) <= tol.kappa_tol * ks &&
        std::abs(r1s - kappa * r2s) <= tol.kappa_tol * ks;
    if (consistent)
        return family(kappa, true,
                      "sigma_pi_bar free along the null direction");
    return nonexistent();
}

EquilibriumSolution assemble_equilibrium(const GameConfig& cfg,
                                         std::vector<AgentCoefficients> coeffs,
                                         const AggregateOutcome& outcome,
                                         const AggregateTerms& terms,
                                         const WealthProfile& x) {
    if (outcome.kind != OutcomeKind::Unique)
        throw SolveError(SolveError::Kind::NotUnique,
                         "equilibrium assembly requires a unique aggregate solution");
    const std::size_t n = cfg.n();
    const double dn = static_cast<double>(n);

    EquilibriumSolution sol;
    sol.cfg = cfg;
    sol.terms = terms;
    sol.outcome = outcome;
    sol.frozen_profile = x;

    // State gradients of the two aggregate closed forms: both sig_state and
    // br_state are affine in the wealth vector.
    KahanSum tsq_acc, tbq_acc;
    for (std::size_t j = 0; j < n; ++j) {
        const double br = cfg.agents[j].b - cfg.market.r;
        const double w = 1.0 / (dn * coeffs[j].N);
        tsq_acc.add(cfg.agents[j].sigma * coeffs[j].rho * coeffs[j].q * w);
        tbq_acc.add(br * coeffs[j].rho * coeffs[j].q * w);
    }
    const double t_sq = tsq_acc.s, t_bq = tbq_acc.s;
    const double det = outcome.det;

    std::vector<double> du(n), dv(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double br = cfg.agents[j].b - cfg.market.r;
        const double w = 1.0 / (dn * coeffs[j].N);
        // d sig_state / d x_j : own p-term plus every y_{-i} containing x_j.
        const double uj = cfg.agents[j].sigma * coeffs[j].rho * coeffs[j].p * w +
                          (t_sq - cfg.agents[j].sigma * coeffs[j].rho * coeffs[j].q * w) / dn;
        const double vj = br * coeffs[j].rho * coeffs[j].p * w +
                          (t_bq - br * coeffs[j].rho * coeffs[j].q * w) / dn;
        du[j] = ((1.0 - terms.br_k2) * uj + terms.sig_k2 * vj) / det;
        dv[j] = ((1.0 - terms.sig_k1) * vj + terms.br_k1 * uj) / det;
    }
    const double u0 = ((1.0 - terms.br_k2) * terms.sig_k3 +
                       terms.sig_k2 * terms.br_k3) / det;
    const double v0 = ((1.0 - terms.sig_k1) * terms.br_k3 +
                       terms.br_k1 * terms.sig_k3) / det;

    sol.M.assign(n, std::vector<double>(n, 0.0));
    sol.m0.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& co = coeffs[i];
        for (std::size_t j = 0; j < n; ++j) {
            double mij = co.k1 * du[j] + co.k2 * dv[j];
            if (i == j)
                mij += co.rho * co.p;
            else
                mij += co.rho * co.q / dn;
            sol.M[i][j] = mij / co.N;
        }
        sol.m0[i] = (co.k1 * u0 + co.k2 * v0 + co.k3) / co.N;
    }

    sol.pi_hat.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        KahanSum s;
        for (std::size_t j = 0; j < n; ++j) s.add(sol.M[i][j] * x.x[j]);
        sol.pi_hat[i] = s.s + sol.m0[i];
    }

    // Freeze the leave-one-out aggregates at the supplied profile and finish
    // the constant coefficients.
    sol.hats.resize(n);
    KahanSum quad_all;
    for (std::size_t j = 0; j < n; ++j) {
        const double t = cfg.agents[j].xi * sol.pi_hat[j] / dn;
        quad_all.add(t * t);
    }
    for (std::size_t i = 0; i < n; ++i) {
        const auto& ag = cfg.agents[i];
        FrozenHats h;
        h.sig_pi = outcome.sigma_pi_bar - ag.sigma * sol.pi_hat[i] / dn;
        h.br_pi = outcome.br_pi_bar - (ag.b - cfg.market.r) * sol.pi_hat[i] / dn;
        const double own = ag.xi * sol.pi_hat[i] / dn;
        h.quad = (quad_all.s - own * own) + h.sig_pi * h.sig_pi;
        sol.hats[i] = h;
        complete_coefficients(coeffs[i], ag, cfg.market, h, cfg.tol,
                              static_cast<int>(i));
    }
    sol.per_agent = std::move(coeffs);
    return sol;
}

NAgentResult solve_n_agent(const GameConfig& cfg, const WealthProfile& x,
                           int root_index) {
    NAgentResult res;
    res.coeffs = build_all_coefficients(cfg, root_index);
    res.terms = build_aggregates(res.coeffs, cfg, x);
    res.outcome = solve_aggregates(res.terms, cfg.tol);
    if (res.outcome.kind == OutcomeKind::Unique)
        res.solution =
            assemble_equilibrium(cfg, res.coeffs, res.outcome, res.terms, x);
    return res;
}

std::vector<double> solve_dense(std::vector<std::vector<double>> A,
                                std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
        if (A[piv][col] == 0.0)
            throw SolveError(SolveError::Kind::SingularSystem,
                             "singular linear system");
        std::swap(A[piv], A[col]);
        std::swap(b[piv], b[col]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = A[r][col] / A[col][col];
            if (f == 0.0) continue;
            for (std::size_t cc = col; cc < n; ++cc) A[r][cc] -= f * A[col][cc];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> sol(n);
    for (std::size_t r = n; r-- > 0;) {
        double s = b[r];
        for (std::size_t cc = r + 1; cc < n; ++cc) s -= A[r][cc] * sol[cc];
        sol[r] = s / A[r][r];
    }
    return sol;
}

std::vector<double> direct_solve(const std::vector<AgentCoefficients>& coeffs,
                                 const GameConfig& cfg,
                                 const WealthProfile& x) {
    const std::size_t n = cfg.n();
    const double dn = static_cast<double>(n);
    std::vector<std::vector<double>> A(n, std::vector<double>(n, 0.0));
    std::vector<double> rhs(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double brj = cfg.agents[j].b - cfg.market.r;
            A[i][j] = -(coeffs[i].k1 * cfg.agents[j].sigma + coeffs[i].k2 * brj) / dn;
            if (i == j) A[i][j] += coeffs[i].N;
        }
        rhs[i] = coeffs[i].k3 + coeffs[i].rho * coeffs[i].p * x.x[i] +
                 coeffs[i].rho * coeffs[i].q * leave_one_out_mean(x.x, i);
    }
    return solve_dense(std::move(A), std::move(rhs));
}

double EquilibriumSolution::strategy(std::size_t i,
                                     const std::vector<double>& x) const {
    KahanSum s;
    for (std::size_t j = 0; j < x.size(); ++j) s.add(M[i][j] * x[j]);
    return s.s + m0[i];
}

double evaluate_value(const EquilibriumSolution& sol, std::size_t i, double x,
                      double y) {
    const auto& c = sol.per_agent[i];
    return c.A * x * x + c.C * y * y + c.D * x * y + c.E * x + c.F * y + c.I;
}

double evaluate_G(const EquilibriumSolution& sol, std::size_t i, double x,
                  double y) {
    const auto& c = sol.per_agent[i];
    return c.a * x + c.c * y + c.alpha;
}

double evaluate_H(const EquilibriumSolution& sol, std::size_t i, double x,
                  double y) {
    const auto& c = sol.per_agent[i];
    return c.a_tilde * x * x + c.c_tilde * y * y + c.d_tilde * x * y +
           c.e_tilde * x + c.beta_tilde * y + c.l_tilde;
}

double vgh_check(const EquilibriumSolution& sol, std::size_t i,
                 const std::vector<double>& xs, const std::vector<double>& ys) {
    const auto& ag = sol.cfg.agents[i];
    double worst = 0.0;
    for (double x : xs)
        for (double y : ys) {
            const double V = evaluate_value(sol, i, x, y);
            const double G = evaluate_G(sol, i, x, y);
            const double H = evaluate_H(sol, i, x, y);
            const double rhs =
                (ag.mu1 * x + ag.mu2) * G - ag.gamma * (H - G * G);
            const double scale = std::max({1.0, std::abs(V), std::abs(rhs)});
            worst = std::max(worst, std::abs(V - rhs) / scale);
        }
    return worst;
}

HjbResiduals hjb_residuals(const EquilibriumSolution& sol, std::size_t i,
                           const std::vector<double>& xs,
                           const std::vector<double>& ys) {
    return hjb_residuals_for(sol.cfg.agents[i], sol.cfg.market, sol.per_agent[i],
                             sol.hats[i], xs, ys);
}

HjbResiduals hjb_residuals_for(const AgentType& ag, const MarketParams& mk,
                               const AgentCoefficients& co,
                               const FrozenHats& h,
                               const std::vector<double>& xs,
                               const std::vector<double>& ys) {
    const double r = mk.r, lam = mk.lambda;
    const double g = ag.gamma, mu1 = ag.mu1, mu2 = ag.mu2, phi = ag.phi;
    const double br = ag.b - r;
    const double phi_n = co.phi_n;
    const double tv = ag.xi * ag.xi + ag.sigma * ag.sigma;
    const double rho = co.rho;
    const double rho_varrho = rho * co.varrho;

    HjbResiduals out;
    const double so = (co.A - mu1 * co.a - g * co.a * co.a) * tv;
    out.second_order_ok = so < 0.0;

    auto rel = [](double resid, double scale) {
        return std::abs(resid) / std::max(1.0, scale);
    };

    // Coefficient identities of the expanded value equation.
    {
        const double t1 = 2.0 * co.A * r - mu1 * co.a * r;
        const double t2 = lam * (co.A + g * (co.a - phi_n) * (co.a - phi_n) -
                                 mu1 * phi_n);
        const double t3 = 0.5 * rho * g * co.a_tilde * co.p * co.p;
        out.ehjb = std::max(out.ehjb,
                            rel(t1 - t2 + t3,
                                std::abs(t1) + std::abs(t2) + std::abs(t3)));
    }
    {
        const double cphi = co.c + phi;
        const double t1 = 2.0 * co.C * r;
        const double t2 = lam * (co.C + g * cphi * cphi);
        const double t3 = 0.5 * rho * g * co.a_tilde * co.q * co.q;
        out.ehjb = std::max(out.ehjb,
                            rel(t1 - t2 + t3,
                                std::abs(t1) + std::abs(t2) + std::abs(t3)));
    }
    {
        const double t1 = 2.0 * co.D * r - mu1 * co.c * r;
        const double t2 = lam * (co.D + 2.0 * g * (co.a - phi_n) * (co.c + phi) +
                                 mu1 * phi);
        const double t3 = rho * g * co.a_tilde * co.p * co.q;
        out.ehjb = std::max(out.ehjb,
                            rel(t1 - t2 + t3,
                                std::abs(t1) + std::abs(t2) + std::abs(t3)));
    }
    {
        const double t1 = co.E * r + co.D * h.br_pi - mu1 * co.alpha * r;
        const double t2 = lam * (co.E + 2.0 * g * co.alpha * (co.a - phi_n) -
                                 mu2 * phi_n);
        const double t3 = g * co.a_tilde * rho_varrho * co.p;
        out.ehjb = std::max(out.ehjb,
                            rel(t1 - t2 + t3,
                                std::abs(t1) + std::abs(t2) + std::abs(t3)));
    }
    {
        const double t1 = co.F * r + 2.0 * h.br_pi * co.C;
        const double t2 = lam * (co.F + 2.0 * g * co.alpha * (co.c + phi) +
                                 mu2 * phi);
        const double t3 = g * co.a_tilde * rho_varrho * co.q;
        out.ehjb = std::max(out.ehjb,
                            rel(t1 - t2 + t3,
                                std::abs(t1) + std::abs(t2) + std::abs(t3)));
    }
    {
        const double t1 = h.br_pi * co.F + (co.C - g * co.c * co.c) * h.quad;
        const double t2 = lam * co.I + lam * g * co.alpha * co.alpha;
        const double t3 = 0.5 * g * co.a_tilde * rho_varrho * rho_varrho / rho;
        out.ehjb = std::max(out.ehjb,
                            rel(t1 - t2 + t3,
                                std::abs(t1) + std::abs(t2) + std::abs(t3)));
    }

    for (double x : xs)
        for (double y : ys) {
            const double pi = rho * (co.p * x + co.q * y + co.varrho);

            // First-order stationarity of the supremum in pi.
            const double bracket =
                co.E * br + co.D * ag.sigma * h.sig_pi - mu1 * co.a * br * x -
                mu1 * co.c * br * y - mu1 * co.alpha * br -
                mu1 * co.c * ag.sigma * h.sig_pi -
                2.0 * g * co.a * co.c * ag.sigma * h.sig_pi +
                2.0 * co.A * br * x + co.D * br * y;
            out.ehjb = std::max(out.ehjb,
                                rel(bracket + 2.0 * so * pi,
                                    std::abs(bracket) + std::abs(2.0 * so * pi)));

            // G equation: lambda(G - (phi_n x - phi y)) = L G.
            {
                const double G = co.a * x + co.c * y + co.alpha;
                const double lhs = lam * (G - (phi_n * x - phi * y));
                const double rhs = co.a * (r * x + br * pi) +
                                   co.c * (r * y + h.br_pi);
                out.lg = std::max(out.lg, rel(lhs - rhs,
                                              std::abs(lhs) + std::abs(rhs)));
            }
            // H equation: lambda(H - (phi_n x - phi y)^2) = L H.
            {
                const double H = co.a_tilde * x * x + co.c_tilde * y * y +
                                 co.d_tilde * x * y + co.e_tilde * x +
                                 co.beta_tilde * y + co.l_tilde;
                const double z0 = phi_n * x - phi * y;
                const double lhs = lam * (H - z0 * z0);
                const double hx = 2.0 * co.a_tilde * x + co.d_tilde * y + co.e_tilde;
                const double hy = 2.0 * co.c_tilde * y + co.d_tilde * x +
                                  co.beta_tilde;
                const double rhs = hx * (r * x + br * pi) +
                                   hy * (r * y + h.br_pi) +
                                   co.a_tilde * tv * pi * pi +
                                   co.c_tilde * h.quad +
                                   co.d_tilde * ag.sigma * pi * h.sig_pi;
                out.lh = std::max(out.lh, rel(lhs - rhs,
                                              std::abs(lhs) + std::abs(rhs)));
            }
        }
    return out;
}

}  // namespace mvg
