#pragma once

#include <limits>
#include <vector>

#include "anisotv/grid.hpp"
#include "anisotv/integrand.hpp"

namespace anisotv {

struct SolveConfig {
    int max_iters = 20000;
    double tol_primal_dual = 1e-6;
    int dc_max_rounds = 50;
    double quantization_step = 1.0 / 64.0;
    unsigned long long seed = 0x6a1f5c2d93b4e701ull;
};

struct SolveReport {
    GridFunction minimizer;
    double value = 0.0;
    // One entry per accepted difference-of-convex round; a single entry for
    // the convex solve. Non-increasing by construction.
    std::vector<double> round_values;
    bool monotone = true;
    int iterations = 0;
    bool converged = false;
    double gap = 0.0;
    double oracle_gap = std::numeric_limits<double>::quiet_NaN();
};

// Minimizes tv_phi(w; u0) + measure_pairing(average) over cell values.
// Throws ErrCode::unbounded_detected when the value dives below
// -1e6 * (1 + data scale) and ErrCode::not_converged past max_iters.
SolveReport minimize_phi(const GridDomain& dom, const Integrand& phi,
                         const DiscreteMeasure& mu, const std::vector<double>& u0,
                         const SolveConfig& cfg = {});

// Minimizes tv_phi(w; u0) + measure_pairing(lower_vs_upper) by repeated
// linearization of the concave atom part, each round solved by the convex
// machinery above. Ties across an atom edge use the averaged subgradient.
SolveReport minimize_phi_hat(const GridDomain& dom, const Integrand& phi,
                             const DiscreteMeasure& mu, const std::vector<double>& u0,
                             const SolveConfig& cfg = {});

struct OracleMinimum {
    double value = 0.0;
    GridFunction argmin;
};

struct OracleReport {
    OracleMinimum phi;
    OracleMinimum phi_hat;
    // Quantization slack: moving every cell value to the nearest value_set
    // entry changes either functional by at most this amount.
    double error_band = 0.0;
};

// Exact minimization of both functionals over value_set^cells by a frontier
// sweep in cell order. Throws ErrCode::too_large beyond 9 cells or when the
// frontier state space is infeasible.
OracleReport oracle_minimize(const GridDomain& dom, const Integrand& phi,
                             const DiscreteMeasure& mu, const std::vector<double>& u0,
                             const std::vector<double>& value_set);

// Sorted value grid spanning the datum hull: breakpoints (datum values and 0),
// midpoints between consecutive breakpoints, and a uniform lattice of the
// given step padded one step past the hull.
std::vector<double> make_value_set(const std::vector<double>& u0, double step);

struct ConsistencyGap {
    double inf_phi = 0.0;
    double min_phi_hat = 0.0;
    SolveReport phi_report;
    SolveReport phi_hat_report;
};

// Unit-disc instance with datum sgn(x1) and equal-mass atom pairs of linear
// density one on each side of the vertical diameter; the two optimal values
// split (continuum targets 4 and 0).
ConsistencyGap consistency_gap(double h, const SolveConfig& cfg = {});

}  // namespace anisotv
