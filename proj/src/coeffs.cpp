#include "mvg/coeffs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mvg/cubic.hpp"

namespace mvg {

namespace {

std::string agent_tag(int idx) {
    if (idx < 0) return std::string();
    std::ostringstream oss;
    oss << " (agent " << idx << ")";
    return oss.str();
}

}  // namespace

double compute_rho(double xi, double sigma) {
    const double tv = xi * xi + sigma * sigma;
    if (tv <= 0.0)
        throw SolveError(SolveError::Kind::Precondition,
                         "total volatility must be positive");
    return 1.0 / (2.0 * tv);
}

std::array<double, 4> slope_cubic_coefficients(const AgentType& ag,
                                               const MarketParams& mk,
                                               double phi_n) {
    const double r = mk.r, lam = mk.lambda;
    const double g = ag.gamma, mu1 = ag.mu1;
    const double rho = compute_rho(ag.xi, ag.sigma);
    const double iota = rho * (ag.b - r) * (ag.b - r);  // rho (b-r)^2
    const double c3 = g * phi_n - 0.5 * mu1;
    const double c2 = mu1 * (0.5 * (lam - r) - 2.0 * iota) +
                      g * phi_n * (2.0 * iota - lam + 2.0 * r);
    const double c1 = iota * (mu1 * (3.0 * lam - 4.0 * r) + 4.0 * r * g * phi_n) +
                      g * phi_n * (lam - r) * (lam - r);
    const double c0 = iota * (2.0 * g * r * r * phi_n -
                              mu1 * (lam - r) * (lam - 2.0 * r));
    return {c3, c2, c1, c0};
}

SlopeRoots solve_slope(const AgentType& ag, const MarketParams& mk,
                       double phi_n, const NumericTolerances& tol,
                       int root_index, int agent_idx) {
    SlopeRoots out;
    out.cubic = slope_cubic_coefficients(ag, mk, phi_n);
    out.all_real_roots = real_cubic_roots(out.cubic[0], out.cubic[1],
                                          out.cubic[2], out.cubic[3]);

    const double rho = compute_rho(ag.xi, ag.sigma);
    const double iota = rho * (ag.b - mk.r) * (ag.b - mk.r);
    const double eps = exclusion_margin(mk, tol);
    for (double z : out.all_real_roots) {
        // a_tilde > 0 (second-order condition) and the a-equation pole avoided.
        const double denom_atilde =
            mk.lambda - 2.0 * mk.r - 2.0 * z - z * z / (2.0 * iota);
        const double denom_a = mk.lambda - mk.r - z;
        if (denom_atilde > eps && std::abs(denom_a) > eps)
            out.admissible.push_back(z);
    }
    if (out.admissible.empty())
        throw SolveError(SolveError::Kind::NoAdmissibleRoot,
                         "no admissible slope root" + agent_tag(agent_idx),
                         agent_idx);

    out.z_inf = ag.mu1 * iota / (ag.gamma * phi_n);
    if (root_index >= 0) {
        if (root_index >= static_cast<int>(out.admissible.size()))
            throw SolveError(SolveError::Kind::Precondition,
                             "requested root index exceeds admissible count" +
                                 agent_tag(agent_idx),
                             agent_idx);
        out.selected_index = root_index;
    } else {
        int best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < out.admissible.size(); ++k) {
            const double d = std::abs(out.admissible[k] - out.z_inf);
            if (d < best_d) {
                best_d = d;
                best = static_cast<int>(k);
            }
        }
        out.selected_index = best;
    }
    out.selected = out.admissible[static_cast<std::size_t>(out.selected_index)];
    return out;
}

std::pair<double, double> compute_a_atilde(double z, const AgentType& ag,
                                           const MarketParams& mk,
                                           double phi_n,
                                           const NumericTolerances& tol,
                                           int agent_idx) {
    const double rho = compute_rho(ag.xi, ag.sigma);
    const double iota = rho * (ag.b - mk.r) * (ag.b - mk.r);
    const double denom_a = mk.lambda - mk.r - z;
    const double denom_at =
        mk.lambda - 2.0 * mk.r - 2.0 * z - z * z / (2.0 * iota);
    const double eps = exclusion_margin(mk, tol);
    if (std::abs(denom_a) <= eps || std::abs(denom_at) <= eps)
        throw SolveError(SolveError::Kind::PoleAtDenominator,
                         "pole in a / a_tilde denominator" + agent_tag(agent_idx),
                         agent_idx);
    return {mk.lambda * phi_n / denom_a,
            mk.lambda * phi_n * phi_n / denom_at};
}

double compute_q(double z, double a, double a_tilde, const AgentType& ag,
                 const MarketParams& mk, double phi_n,
                 const NumericTolerances& tol, int agent_idx) {
    const double r = mk.r, lam = mk.lambda;
    const double g = ag.gamma, mu1 = ag.mu1;
    const double rho = compute_rho(ag.xi, ag.sigma);
    const double br = ag.b - r;
    const double mult = g * a_tilde * (lam - r) * (2.0 * r - lam + z) -
                        (2.0 * g * lam * (a - phi_n) + mu1 * (lam - r)) * a *
                            rho * br * br;
    const double rhs = -2.0 * g * lam * ag.phi * r * (a - phi_n) * br;
    const double scale = std::max({1.0, std::abs(g * a_tilde * (lam - r) *
                                                 (2.0 * r - lam + z)),
                                   std::abs((2.0 * g * lam * (a - phi_n) +
                                             mu1 * (lam - r)) *
                                            a * rho * br * br)});
    if (std::abs(mult) <= tol.excl_tol * scale) {
        if (std::abs(rhs) <= tol.excl_tol * scale) return 0.0;
        throw SolveError(SolveError::Kind::SingularQ,
                         "singular multiplier in the q equation" +
                             agent_tag(agent_idx),
                         agent_idx);
    }
    return rhs / mult;
}

std::pair<double, double> compute_c_D(double q, double a, double a_tilde,
                                      double z, const AgentType& ag,
                                      const MarketParams& mk, double phi_n) {
    const double r = mk.r, lam = mk.lambda;
    const double g = ag.gamma, mu1 = ag.mu1;
    const double rho = compute_rho(ag.xi, ag.sigma);
    const double br = ag.b - r;
    const double c = (a * rho * q * br - lam * ag.phi) / (lam - r);
    const double p = z / (rho * br);
    const double D = (mu1 * c * r - g * a_tilde * rho * p * q +
                      2.0 * g * lam * (a - phi_n) * (c + ag.phi) +
                      lam * mu1 * ag.phi) /
                     (2.0 * r - lam);
    return {c, D};
}

AgentCoefficients build_agent_coefficients(const AgentType& ag,
                                           const MarketParams& mk,
                                           double phi_n, double inv_n,
                                           const NumericTolerances& tol,
                                           int root_index, int agent_idx) {
    AgentCoefficients co;
    co.phi_n = phi_n;
    co.rho = compute_rho(ag.xi, ag.sigma);
    co.roots = solve_slope(ag, mk, phi_n, tol, root_index, agent_idx);
    co.z = co.roots.selected;
    const double br = ag.b - mk.r;
    co.p = co.z / (co.rho * br);
    std::tie(co.a, co.a_tilde) =
        compute_a_atilde(co.z, ag, mk, phi_n, tol, agent_idx);
    co.q = compute_q(co.z, co.a, co.a_tilde, ag, mk, phi_n, tol, agent_idx);
    std::tie(co.c, co.D) =
        compute_c_D(co.q, co.a, co.a_tilde, co.z, ag, mk, phi_n);

    const double g = ag.gamma, mu1 = ag.mu1, lam = mk.lambda, r = mk.r;
    co.A = mu1 * co.a - g * co.a_tilde + g * co.a * co.a;
    const double cphi = co.c + ag.phi;
    co.C = (lam * g * cphi * cphi -
            0.5 * co.rho * g * co.a_tilde * co.q * co.q) /
           (2.0 * r - lam);

    co.Q = g * co.a_tilde * (r - lam + co.z) -
           co.a * co.rho * br * br * (2.0 * g * (co.a - phi_n) + mu1);
    const double q_scale =
        std::max({1.0, std::abs(g * co.a_tilde * (r - lam + co.z)),
                  std::abs(co.a * co.rho * br * br *
                           (2.0 * g * (co.a - phi_n) + mu1))});
    if (std::abs(co.Q) <= tol.excl_tol * q_scale)
        throw SolveError(SolveError::Kind::DegenerateQ,
                         "degenerate Q" + agent_tag(agent_idx), agent_idx);

    co.k1 = co.rho * ag.sigma * (r - lam) *
            (co.D - mu1 * co.c - 2.0 * g * co.a * co.c) / co.Q;
    co.k2 = co.rho * br *
            (2.0 * g * (co.a - phi_n) * co.c + mu1 * co.c - co.D) / co.Q;
    co.k3 = -ag.mu2 * co.rho * lam * phi_n * br / co.Q;
    co.N = 1.0 + (co.k2 * br + co.k1 * ag.sigma) * inv_n;
    if (std::abs(co.N) <= tol.excl_tol)
        throw SolveError(SolveError::Kind::DegenerateN,
                         "degenerate N" + agent_tag(agent_idx), agent_idx);
    return co;
}

void complete_coefficients(AgentCoefficients& co, const AgentType& ag,
                           const MarketParams& mk, const FrozenHats& hats,
                           const NumericTolerances& tol, int agent_idx) {
    const double r = mk.r, lam = mk.lambda;
    const double g = ag.gamma, mu1 = ag.mu1, mu2 = ag.mu2, phi = ag.phi;
    const double br = ag.b - r;
    const double rho = co.rho, at = co.a_tilde;
    const double rho_varrho = co.k1 * hats.sig_pi + co.k2 * hats.br_pi + co.k3;
    co.varrho = rho_varrho / rho;

    co.alpha = (co.c * hats.br_pi + co.a * rho_varrho * br) / lam;
    co.E = (mu1 * co.alpha * r - co.D * hats.br_pi -
            g * at * rho_varrho * co.p +
            2.0 * g * lam * co.alpha * (co.a - co.phi_n) -
            mu2 * lam * co.phi_n) /
           (r - lam);
    co.F = (2.0 * lam * g * co.alpha * (co.c + phi) + lam * mu2 * phi -
            g * at * rho_varrho * co.q - 2.0 * co.C * hats.br_pi) /
           (r - lam);
    co.I = ((co.C - g * co.c * co.c) * hats.quad - lam * g * co.alpha * co.alpha +
            0.5 * g * at * rho_varrho * rho_varrho / rho +
            co.F * hats.br_pi) /
           lam;

    // H-coefficients from the y^2, xy, x, y and constant equations of the
    // generator identity for H.
    const double w = rho * co.q * br;  // rho q (b-r)
    const double eps = exclusion_margin(mk, tol);
    const double denom_d = lam - 2.0 * r - co.z;
    if (std::abs(denom_d) <= eps)
        throw SolveError(SolveError::Kind::PoleAtDenominator,
                         "pole in the d_tilde denominator" + agent_tag(agent_idx),
                         agent_idx);
    co.d_tilde = (2.0 * at * w + at * (co.z / br) * co.q -
                  2.0 * lam * phi * co.phi_n) /
                 denom_d;
    co.c_tilde = (co.d_tilde * w + 0.5 * at * rho * co.q * co.q +
                  lam * phi * phi) /
                 (lam - 2.0 * r);
    const double denom_e = lam - r - co.z;
    co.e_tilde = (2.0 * at * rho_varrho * br +
                  co.d_tilde * ag.sigma * (co.z / br) * hats.sig_pi +
                  at * rho_varrho * co.p + co.d_tilde * hats.br_pi) /
                 denom_e;
    co.beta_tilde = (2.0 * co.c_tilde * hats.br_pi + co.d_tilde * rho_varrho * br +
                     co.e_tilde * w + co.d_tilde * ag.sigma * rho * co.q * hats.sig_pi +
                     at * rho_varrho * co.q) /
                    (lam - r);
    co.l_tilde = (co.beta_tilde * hats.br_pi + co.c_tilde * hats.quad +
                  co.e_tilde * br * rho_varrho +
                  co.d_tilde * ag.sigma * rho_varrho * hats.sig_pi +
                  0.5 * at * rho_varrho * rho_varrho / rho) /
                 lam;
    co.completed = true;
}

}  // namespace mvg
