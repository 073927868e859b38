#ifndef ANISOTV_QUADRATURE_HPP
#define ANISOTV_QUADRATURE_HPP

#include <functional>

#include "anisotv/core.hpp"

namespace anisotv {

// Adaptive Simpson integration of f over [a, b] to absolute tolerance
// abs_tol.  Panels still failing their local budget at max_depth are accepted
// and their residuals summed; throws QuadratureNonConvergence when that
// unresolved total exceeds abs_tol.  Jump discontinuities resolve to
// O(interval * 2^-max_depth); genuine singularities still raise.
// Panels above min_depth always bisect regardless of the error estimate, so
// features wider than (b - a) * 2^-min_depth cannot hide between the nodes of
// a panel whose estimate happens to vanish.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol, int max_depth = 40, int min_depth = 0);

} // namespace anisotv

#endif
