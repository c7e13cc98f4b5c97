#include "mvg/cubic.hpp"

#include <algorithm>
#include <complex>

namespace mvg {

namespace {

double eval(double c3, double c2, double c1, double c0, double z) {
    return ((c3 * z + c2) * z + c1) * z + c0;
}

double eval_deriv(double c3, double c2, double c1, double z) {
    return (3.0 * c3 * z + 2.0 * c2) * z + c1;
}

void polish(double c3, double c2, double c1, double c0, double& z) {
    for (int it = 0; it < 3; ++it) {
        const double f = eval(c3, c2, c1, c0, z);
        const double fp = eval_deriv(c3, c2, c1, z);
        if (fp == 0.0) return;
        const double step = f / fp;
        if (!std::isfinite(step)) return;
        z -= step;
        if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(z))) return;
    }
}

std::vector<double> quadratic_roots(double a, double b, double c) {
    std::vector<double> roots;
    const double scale = std::max({std::abs(a), std::abs(b), std::abs(c)});
    if (scale == 0.0) return roots;
    if (std::abs(a) <= 1e-14 * scale) {
        if (std::abs(b) > 1e-14 * scale) roots.push_back(-c / b);
        return roots;
    }
    const double disc = b * b - 4.0 * a * c;
    if (disc < 0.0) return roots;
    const double sq = std::sqrt(disc);
    // Numerically stable pairing avoids cancellation for small roots.
    const double q = -0.5 * (b + std::copysign(sq, b));
    roots.push_back(q / a);
    if (q != 0.0)
        roots.push_back(c / q);
    else
        roots.push_back(0.0);
    std::sort(roots.begin(), roots.end());
    return roots;
}

}  // namespace

double cubic_rel_residual(double c3, double c2, double c1, double c0, double z) {
    const double t3 = c3 * z * z * z, t2 = c2 * z * z, t1 = c1 * z;
    const double scale = std::max({std::abs(t3), std::abs(t2), std::abs(t1),
                                   std::abs(c0), 1e-300});
    return std::abs(eval(c3, c2, c1, c0, z)) / scale;
}

std::vector<double> real_cubic_roots(double c3, double c2, double c1, double c0) {
    const double scale = std::max({std::abs(c3), std::abs(c2), std::abs(c1),
                                   std::abs(c0)});
    if (scale == 0.0) return {};
    if (std::abs(c3) <= 1e-14 * scale) return quadratic_roots(c2, c1, c0);

    // Depressed-cubic (Cardano / trigonometric) solution.
    const double a = c2 / c3, b = c1 / c3, c = c0 / c3;
    const double p = b - a * a / 3.0;
    const double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    const double shift = -a / 3.0;
    const double disc = q * q / 4.0 + p * p * p / 27.0;

    std::vector<double> roots;
    if (disc > 0.0) {
        const double sq = std::sqrt(disc);
        const double u = std::cbrt(-q / 2.0 + sq);
        const double v = std::cbrt(-q / 2.0 - sq);
        roots.push_back(u + v + shift);
    } else if (disc == 0.0) {
        if (q == 0.0) {
            roots.push_back(shift);
        } else {
            const double u = std::cbrt(-q / 2.0);
            roots.push_back(2.0 * u + shift);
            roots.push_back(-u + shift);
        }
    } else {
        const double m = 2.0 * std::sqrt(-p / 3.0);
        const double arg = std::clamp(3.0 * q / (p * m), -1.0, 1.0);
        const double theta = std::acos(arg) / 3.0;
        for (int k = 0; k < 3; ++k)
            roots.push_back(m * std::cos(theta - 2.0 * M_PI * k / 3.0) + shift);
    }

    for (double& z : roots) polish(c3, c2, c1, c0, z);
    std::sort(roots.begin(), roots.end());

    // Merge numerically coincident roots.
    std::vector<double> out;
    for (double z : roots) {
        if (!out.empty() &&
            std::abs(z - out.back()) <= 1e-10 * std::max(1.0, std::abs(z)))
            continue;
        out.push_back(z);
    }
    return out;
}

}  // namespace mvg
