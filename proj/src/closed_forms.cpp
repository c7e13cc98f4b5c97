#include "mvg/closed_forms.hpp"

#include <cmath>

namespace mvg {

namespace {

constexpr double kBranchEps = 1e-12;

}  // namespace

LimitScalarsN limit_scalars_n(const std::vector<AgentType>& agents, double r,
                              const std::vector<double>& x) {
    const double n = static_cast<double>(agents.size());
    LimitScalarsN s;
    s.psi.resize(agents.size());
    for (std::size_t i = 0; i < agents.size(); ++i) {
        const auto& a = agents[i];
        const double psi = (1.0 - a.phi / n) * a.xi * a.xi + a.sigma * a.sigma;
        s.psi[i] = psi;
        s.Psi_n += a.phi * a.sigma * a.sigma / (n * psi);
        s.Phi_n += a.mu2 * a.sigma * (a.b - r) / (2.0 * n * a.gamma * psi);
        s.Phi_n0 += a.sigma * a.b / (n * a.gamma * psi);
        s.Upsilon_n += a.mu1 * a.sigma * x[i] * (a.b - r) / (2.0 * n * a.gamma * psi);
    }
    return s;
}

LimitScalarsMf limit_scalars_mf(const TypeMeasure& measure, double r) {
    LimitScalarsMf s;
    for (std::size_t k = 0; k < measure.atoms.size(); ++k) {
        const auto& a = measure.atoms[k];
        const double w = measure.weights[k];
        const double psi = a.xi * a.xi + a.sigma * a.sigma;
        s.Psi += w * a.phi * a.sigma * a.sigma / psi;
        s.Phi += w * a.mu2 * a.sigma * (a.b - r) / (2.0 * a.gamma * psi);
        s.Phi0 += w * a.sigma * a.b / (a.gamma * psi);
        s.Upsilon += w * a.mu1 * a.sigma * a.x0 * (a.b - r) / (2.0 * a.gamma * psi);
    }
    return s;
}

LimitStrategy lambda_inf_n(const std::vector<AgentType>& agents, double r,
                           const std::vector<double>& x) {
    const auto s = limit_scalars_n(agents, r, x);
    LimitStrategy out;
    const std::size_t n = agents.size();
    out.slope_x.resize(n);
    out.family_dir.resize(n);
    std::vector<double> base(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& a = agents[i];
        out.slope_x[i] = a.mu1 * (a.b - r) / (2.0 * a.gamma * s.psi[i]);
        out.family_dir[i] = a.phi * a.sigma / s.psi[i];
        base[i] = out.slope_x[i] * x[i] + a.mu2 * (a.b - r) / (2.0 * a.gamma * s.psi[i]);
    }
    if (s.Psi_n < 1.0 - kBranchEps) {
        out.kind = OutcomeKind::Unique;
        out.pi_hat.resize(n);
        const double shared = (s.Upsilon_n + s.Phi_n) / (1.0 - s.Psi_n);
        for (std::size_t i = 0; i < n; ++i)
            out.pi_hat[i] = base[i] + out.family_dir[i] * shared;
    } else if (std::abs(s.Upsilon_n + s.Phi_n) <= kBranchEps) {
        out.kind = OutcomeKind::InfiniteFamily;
        out.pi_hat = base;  // member at free aggregate = 0
    } else {
        out.kind = OutcomeKind::Nonexistent;
    }
    return out;
}

LimitStrategy lambda_inf_mf(const TypeMeasure& measure, double r) {
    const auto s = limit_scalars_mf(measure, r);
    LimitStrategy out;
    const std::size_t n = measure.atoms.size();
    out.slope_x.resize(n);
    out.family_dir.resize(n);
    std::vector<double> base(n);
    for (std::size_t k = 0; k < n; ++k) {
        const auto& a = measure.atoms[k];
        const double psi = a.xi * a.xi + a.sigma * a.sigma;
        out.slope_x[k] = a.mu1 * (a.b - r) / (2.0 * a.gamma * psi);
        out.family_dir[k] = a.phi * a.sigma / psi;
        base[k] = out.slope_x[k] * a.x0 + a.mu2 * (a.b - r) / (2.0 * a.gamma * psi);
    }
    if (s.Psi < 1.0 - kBranchEps) {
        out.kind = OutcomeKind::Unique;
        out.pi_hat.resize(n);
        const double shared = (s.Upsilon + s.Phi) / (1.0 - s.Psi);
        for (std::size_t k = 0; k < n; ++k)
            out.pi_hat[k] = base[k] + out.family_dir[k] * shared;
    } else if (std::abs(s.Upsilon + s.Phi) <= kBranchEps) {
        out.kind = OutcomeKind::InfiniteFamily;
        out.pi_hat = base;
    } else {
        out.kind = OutcomeKind::Nonexistent;
    }
    return out;
}

LimitStrategy state_indep_zero_rate_n(const std::vector<AgentType>& agents) {
    for (const auto& a : agents)
        if (a.mu1 != 0.0 || a.mu2 != 2.0)
            throw SolveError(SolveError::Kind::Precondition,
                             "closed form requires mu1 = 0 and mu2 = 2");
    const auto s = limit_scalars_n(agents, /*r=*/0.0,
                                   std::vector<double>(agents.size(), 0.0));
    LimitStrategy out;
    const std::size_t n = agents.size();
    out.slope_x.assign(n, 0.0);
    out.family_dir.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        out.family_dir[i] = agents[i].phi * agents[i].sigma / s.psi[i];
    if (s.Psi_n < 1.0 - kBranchEps) {
        out.kind = OutcomeKind::Unique;
        out.pi_hat.resize(n);
        for (std::size_t i = 0; i < n; ++i)
            out.pi_hat[i] = out.family_dir[i] * s.Phi_n0 / (1.0 - s.Psi_n) +
                            agents[i].b / (agents[i].gamma * s.psi[i]);
    } else {
        out.kind = OutcomeKind::Nonexistent;
    }
    return out;
}

LimitStrategy state_indep_zero_rate_mf(const TypeMeasure& measure) {
    for (const auto& a : measure.atoms)
        if (a.mu1 != 0.0 || a.mu2 != 2.0)
            throw SolveError(SolveError::Kind::Precondition,
                             "closed form requires mu1 = 0 and mu2 = 2");
    const auto s = limit_scalars_mf(measure, /*r=*/0.0);
    LimitStrategy out;
    const std::size_t n = measure.atoms.size();
    out.slope_x.assign(n, 0.0);
    out.family_dir.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const auto& a = measure.atoms[k];
        out.family_dir[k] = a.phi * a.sigma / (a.xi * a.xi + a.sigma * a.sigma);
    }
    if (s.Psi < 1.0 - kBranchEps) {
        out.kind = OutcomeKind::Unique;
        out.pi_hat.resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            const auto& a = measure.atoms[k];
            out.pi_hat[k] = out.family_dir[k] * s.Phi0 / (1.0 - s.Psi) +
                            a.b / (a.gamma * (a.xi * a.xi + a.sigma * a.sigma));
        }
    } else {
        out.kind = OutcomeKind::Nonexistent;
    }
    return out;
}

NoCompetitionStrategy no_competition(const AgentType& agent,
                                     const MarketParams& market,
                                     const NumericTolerances& tol) {
    if (agent.phi != 0.0)
        throw SolveError(SolveError::Kind::Precondition,
                         "no-competition closed form requires phi = 0");
    NoCompetitionStrategy out;
    const double br = agent.b - market.r;
    const double rho = compute_rho(agent.xi, agent.sigma);
    out.iota = rho * br * br;
    const auto roots = solve_slope(agent, market, /*phi_n=*/1.0, tol);
    out.frak_z = roots.selected;
    out.zeta = out.frak_z / br;

    const double lam = market.lambda, r = market.r, g = agent.gamma;
    const double a = lam / (lam - r - out.frak_z);
    const double at = lam / (lam - 2.0 * r - 2.0 * out.frak_z -
                             out.frak_z * out.frak_z / (2.0 * out.iota));
    const double Q = g * at * (r - lam + out.frak_z) -
                     a * out.iota * (2.0 * g * (a - 1.0) + agent.mu1);
    out.varsigma = -agent.mu2 * lam * out.iota / (br * Q);
    return out;
}

}  // namespace mvg
