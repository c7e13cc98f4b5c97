#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

namespace mvg {

// Real roots of c3 z^3 + c2 z^2 + c1 z + c0 = 0, ascending, deduplicated.
// Degrades gracefully to quadratic / linear when leading coefficients vanish
// relative to the coefficient scale. Roots are polished with a couple of
// Newton steps so downstream residual checks pass at tight tolerances.
std::vector<double> real_cubic_roots(double c3, double c2, double c1, double c0);

// Residual of the cubic at z, relative to the magnitude of the largest term.
double cubic_rel_residual(double c3, double c2, double c1, double c0, double z);

}  // namespace mvg
