#include "mvg/mean_field.hpp"

#include <cmath>
#include <sstream>

namespace mvg {

namespace {

void require_valid_measure(const TypeMeasure& measure, const MarketParams& mk,
                           const NumericTolerances& tol) {
    auto violations = validate_measure(measure, mk, tol);
    if (violations.empty()) return;
    std::ostringstream oss;
    oss << "invalid type measure:";
    for (const auto& v : violations) {
        oss << "\n  ";
        if (v.agent >= 0) oss << "atom " << v.agent << " ";
        oss << v.field << ": " << v.message;
    }
    throw SolveError(SolveError::Kind::InvalidConfig, oss.str());
}

}  // namespace

std::vector<AgentCoefficients> build_mf_coefficients(
    const TypeMeasure& measure, const MarketParams& market,
    const NumericTolerances& tol, int root_index) {
    require_valid_measure(measure, market, tol);
    std::vector<AgentCoefficients> out;
    out.reserve(measure.atoms.size());
    for (std::size_t k = 0; k < measure.atoms.size(); ++k)
        out.push_back(build_agent_coefficients(measure.atoms[k], market,
                                               /*phi_n=*/1.0, /*inv_n=*/0.0,
                                               tol, root_index,
                                               static_cast<int>(k)));
    return out;
}

AggregateTerms build_mf_aggregates(const std::vector<AgentCoefficients>& coeffs,
                                   const TypeMeasure& measure,
                                   const MarketParams& market) {
    AggregateTerms t;
    const double x_bar = measure.mean_wealth();
    for (std::size_t k = 0; k < measure.atoms.size(); ++k) {
        const auto& ag = measure.atoms[k];
        const auto& co = coeffs[k];
        const double w = measure.weights[k];
        const double br = ag.b - market.r;
        t.sig_rho_px += w * ag.sigma * co.rho * co.p * ag.x0;
        t.sig_rho_qy += w * ag.sigma * co.rho * co.q * x_bar;
        t.br_rho_px += w * br * co.rho * co.p * ag.x0;
        t.br_rho_qy += w * br * co.rho * co.q * x_bar;
        t.sig_k1 += w * ag.sigma * co.k1;
        t.sig_k2 += w * ag.sigma * co.k2;
        t.sig_k3 += w * ag.sigma * co.k3;
        t.br_k1 += w * br * co.k1;
        t.br_k2 += w * br * co.k2;
        t.br_k3 += w * br * co.k3;
    }
    return t;
}

MfEquilibrium solve_mfg(const TypeMeasure& measure, const MarketParams& market,
                        const NumericTolerances& tol, int root_index) {
    MfEquilibrium eq;
    eq.measure = measure;
    eq.market = market;
    eq.tol = tol;
    eq.per_atom = build_mf_coefficients(measure, market, tol, root_index);
    eq.terms = build_mf_aggregates(eq.per_atom, measure, market);
    eq.outcome = solve_aggregates(eq.terms, tol);
    eq.x_bar = measure.mean_wealth();
    if (eq.outcome.kind != OutcomeKind::Unique) return eq;

    FrozenHats h;
    h.sig_pi = eq.outcome.sigma_pi_bar;
    h.br_pi = eq.outcome.br_pi_bar;
    h.quad = h.sig_pi * h.sig_pi;  // no idiosyncratic term survives the limit
    eq.pi_hat.resize(measure.atoms.size());
    eq.hats.assign(measure.atoms.size(), h);
    for (std::size_t k = 0; k < measure.atoms.size(); ++k) {
        auto& co = eq.per_atom[k];
        complete_coefficients(co, measure.atoms[k], market, h, tol,
                              static_cast<int>(k));
        eq.pi_hat[k] = eq.strategy(k, measure.atoms[k].x0, eq.x_bar);
    }
    return eq;
}

double MfEquilibrium::strategy(std::size_t atom, double x,
                               double x_bar_state) const {
    if (outcome.kind != OutcomeKind::Unique)
        throw SolveError(SolveError::Kind::NotUnique,
                         "mean-field strategy requires a unique aggregate solution");
    const auto& co = per_atom[atom];
    return co.rho * co.p * x + co.rho * co.q * x_bar_state +
           co.k1 * outcome.sigma_pi_bar + co.k2 * outcome.br_pi_bar + co.k3;
}

double mf_value(const MfEquilibrium& eq, std::size_t atom, double x,
                double x_bar) {
    const auto& c = eq.per_atom[atom];
    return c.A * x * x + c.C * x_bar * x_bar + c.D * x * x_bar + c.E * x +
           c.F * x_bar + c.I;
}

double mf_G(const MfEquilibrium& eq, std::size_t atom, double x, double x_bar) {
    const auto& c = eq.per_atom[atom];
    return c.a * x + c.c * x_bar + c.alpha;
}

double mf_H(const MfEquilibrium& eq, std::size_t atom, double x, double x_bar) {
    const auto& c = eq.per_atom[atom];
    return c.a_tilde * x * x + c.c_tilde * x_bar * x_bar + c.d_tilde * x * x_bar +
           c.e_tilde * x + c.beta_tilde * x_bar + c.l_tilde;
}

double mf_vgh_check(const MfEquilibrium& eq, std::size_t atom,
                    const std::vector<double>& xs,
                    const std::vector<double>& xbars) {
    const auto& ag = eq.measure.atoms[atom];
    double worst = 0.0;
    for (double x : xs)
        for (double xb : xbars) {
            const double V = mf_value(eq, atom, x, xb);
            const double G = mf_G(eq, atom, x, xb);
            const double H = mf_H(eq, atom, x, xb);
            const double rhs =
                (ag.mu1 * x + ag.mu2) * G - ag.gamma * (H - G * G);
            const double scale = std::max({1.0, std::abs(V), std::abs(rhs)});
            worst = std::max(worst, std::abs(V - rhs) / scale);
        }
    return worst;
}

HjbResiduals mf_hjb_residuals(const MfEquilibrium& eq, std::size_t atom,
                              const std::vector<double>& xs,
                              const std::vector<double>& xbars) {
    return hjb_residuals_for(eq.measure.atoms[atom], eq.market,
                             eq.per_atom[atom], eq.hats[atom], xs, xbars);
}

}  // namespace mvg
