#include "mvg/populations.hpp"

#include <algorithm>

#include "mvg/rng.hpp"

namespace mvg {

GameConfig benchmark_population(int figure, std::size_t n, std::uint64_t seed,
                                std::size_t& pin_index) {
    CounterRng rng(seed, static_cast<std::uint64_t>(figure));
    auto U = [&rng](double lo, double hi) {
        return lo + (hi - lo) * rng.next_uniform();
    };
    GameConfig cfg;
    cfg.market.r = 0.05;
    cfg.market.lambda = (figure == 3) ? 0.5 : (figure == 4 ? 1.0 : 0.04);
    cfg.agents.resize(n);
    for (auto& a : cfg.agents) {
        a.x0 = U(0.1, 1.0);
        a.b = U(0.1, 0.2);
        a.xi = U(0.01, 0.05);
        a.sigma = U(0.01, 0.05);
        switch (figure) {
            case 1:
                a.gamma = U(1.0, 10.0);
                a.mu1 = U(0.0, 1.0);
                a.mu2 = U(0.0, 1.0);
                a.phi = U(0.0, 1.0);  // swept coordinate
                break;
            case 2:
                a.phi = U(0.0, 1.0);
                a.mu1 = U(0.0, 1.0);
                a.mu2 = U(0.0, 1.0);
                a.gamma = U(1.0, 10.0);
                break;
            case 3:
                a.phi = U(0.0, 1.0);
                a.gamma = U(1.0, 10.0);
                a.mu2 = U(0.0, 1.0);
                a.mu1 = U(1.0, 10.0);
                break;
            case 4:
                a.phi = U(0.0, 1.0);
                a.gamma = U(1.0, 10.0);
                a.mu1 = U(0.0, 1.0);
                a.mu2 = U(1.0, 10.0);
                break;
            default:
                throw SolveError(SolveError::Kind::InvalidConfig,
                                 "figure must be 1..4");
        }
    }
    pin_index = std::min<std::size_t>(499, n - 1);
    AgentType& p = cfg.agents[pin_index];
    switch (figure) {
        case 1:
            p = {0.35, 0.16, 0.03, 0.01, p.phi, 4.24, 0.16, 0.98};
            break;
        case 2:
            p = {0.39, 0.14, 0.03, 0.04, 0.25, p.gamma, 0.28, 0.52};
            break;
        case 3:
            p = {0.94, 0.19, 0.03, 0.05, 0.97, 7.87, p.mu1, 0.67};
            break;
        case 4:
            p = {0.29, 0.14, 0.04, 0.01, 0.74, 9.53, 0.73, p.mu2};
            break;
    }
    return cfg;
}

}  // namespace mvg
