#include <cmath>
#include <cstdlib>
#include <vector>

#include "anisotv/core.hpp"
#include "anisotv/grid.hpp"
#include "anisotv/integrand.hpp"
#include "anisotv/solve.hpp"

#include "support.hpp"

namespace {

using namespace anisotv;

DiscreteMeasure zero_measure(const GridDomain& dom) {
    DiscreteMeasure mu;
    mu.cell_density.assign(static_cast<size_t>(dom.cell_count()), 0.0);
    return mu;
}

bool contains_value(const std::vector<double>& vs, double v) {
    for (double x : vs) {
        if (std::abs(x - v) <= 1e-12) return true;
    }
    return false;
}

void run_constant_extension() {
    const GridDomain dom = GridDomain::rect(3, 2, 0.5, {0.0, 0.0});
    const std::vector<double> u0(dom.boundary_edges().size(), 1.7);
    const SolveReport rep = minimize_phi(dom, Integrand::isotropic(), zero_measure(dom), u0);
    REQUIRE(rep.converged);
    REQUIRE(rep.value >= -1e-9);
    REQUIRE(rep.value <= 2e-6);
    for (double w : rep.minimizer.values) REQUIRE(std::abs(w - 1.7) <= 1e-4);
    REQUIRE(rep.round_values.size() == 1);
    REQUIRE(rep.monotone);
    TEST_DONE("constant datum extension");
}

void run_line_staircase() {
    const GridDomain dom = GridDomain::line(4, 0.25, -1.0);
    const std::vector<double> u0 = {0.0, 5.0};
    const SolveReport rep = minimize_phi(dom, Integrand::isotropic(), zero_measure(dom), u0);
    REQUIRE(rep.converged);
    // Any monotone profile realizes the total rise once.
    REQUIRE_NEAR(rep.value, 5.0, 1e-3);
    for (size_t i = 0; i + 1 < rep.minimizer.values.size(); ++i) {
        REQUIRE(rep.minimizer.values[i] <= rep.minimizer.values[i + 1] + 1e-3);
    }
    TEST_DONE("line staircase");
}

// Two cells, datum 0 on the left faces and 1 on the right faces, one minus
// atom of mass 3 on the shared edge. Hand minimization over the vertex set
// {0,1}^2 gives -1/2 for the averaged pairing and -2 for the lower-vs-upper
// pairing, both at w = (0,1).
void run_two_cell_jump_instance() {
    const GridDomain dom = GridDomain::rect(2, 1, 1.0, {0.0, 0.0});
    const std::vector<double> u0 = {0.0, 0.0, 0.0, 1.0, 1.0, 1.0};
    DiscreteMeasure mu = zero_measure(dom);
    mu.atoms.push_back({0, 0.0, 3.0});

    const std::vector<double> values = make_value_set(u0, 1.0 / 64.0);
    const OracleReport oracle = oracle_minimize(dom, Integrand::isotropic(), mu, u0, values);
    REQUIRE_NEAR(oracle.phi.value, -0.5, 1e-12);
    REQUIRE_NEAR(oracle.phi_hat.value, -2.0, 1e-12);
    REQUIRE_NEAR(oracle.phi.argmin.values[0], 0.0, 1e-12);
    REQUIRE_NEAR(oracle.phi.argmin.values[1], 1.0, 1e-12);
    REQUIRE_NEAR(oracle.phi_hat.argmin.values[0], 0.0, 1e-12);
    REQUIRE_NEAR(oracle.phi_hat.argmin.values[1], 1.0, 1e-12);

    const SolveReport phi_rep = minimize_phi(dom, Integrand::isotropic(), mu, u0);
    REQUIRE(phi_rep.converged);
    REQUIRE_NEAR(phi_rep.value, -0.5, 1e-4);
    REQUIRE(std::abs(phi_rep.minimizer.values[0]) <= 1e-3);
    REQUIRE(std::abs(phi_rep.minimizer.values[1] - 1.0) <= 1e-3);
    REQUIRE_NEAR(phi_value(phi_rep.minimizer, dom, Integrand::isotropic(), mu),
                 phi_rep.value, 1e-9);

    const SolveReport hat_rep = minimize_phi_hat(dom, Integrand::isotropic(), mu, u0);
    REQUIRE(hat_rep.converged);
    REQUIRE_NEAR(hat_rep.value, -2.0, 1e-4);
    REQUIRE(std::abs(hat_rep.minimizer.values[0]) <= 1e-3);
    REQUIRE(std::abs(hat_rep.minimizer.values[1] - 1.0) <= 1e-3);
    REQUIRE(hat_rep.monotone);
    REQUIRE(hat_rep.value <= phi_rep.value + 1e-12);
    REQUIRE_NEAR(phi_hat_value(hat_rep.minimizer, dom, Integrand::isotropic(), mu),
                 hat_rep.value, 1e-9);
    for (size_t r = 0; r + 1 < hat_rep.round_values.size(); ++r) {
        REQUIRE(hat_rep.round_values[r + 1] <= hat_rep.round_values[r]);
    }
    TEST_DONE("two-cell jump instance");
}

void run_hat_without_atoms_is_convex() {
    const GridDomain dom = GridDomain::rect(2, 2, 0.5, {0.0, 0.0});
    const std::vector<double> u0(dom.boundary_edges().size(), 0.25);
    DiscreteMeasure mu = zero_measure(dom);
    mu.cell_density = {1.0, -0.5, 0.0, 0.75};
    const SolveReport a = minimize_phi(dom, Integrand::quadrant(), mu, u0);
    const SolveReport b = minimize_phi_hat(dom, Integrand::quadrant(), mu, u0);
    REQUIRE(b.round_values.size() == 1);
    REQUIRE_NEAR(a.value, b.value, 1e-12);
    TEST_DONE("hat solve without atoms");
}

void run_random_instances_vs_oracle() {
    Rng rng(0x50c7e0a9b1d2f3e4ull);
    const double datum_pool[4] = {-0.5, 0.0, 0.5, 1.0};
    SolveConfig cfg;
    cfg.max_iters = 100000;
    cfg.tol_primal_dual = 1e-6;
    for (int inst = 0; inst < 12; ++inst) {
        const GridDomain dom = GridDomain::rect(3, 2, 0.5, {0.0, 0.0});
        std::vector<double> u0(dom.boundary_edges().size(), 0.0);
        for (double& d : u0) d = datum_pool[rng.next_below(4)];
        DiscreteMeasure mu = zero_measure(dom);
        for (double& rho : mu.cell_density) {
            rho = rng.next_double() < 0.4 ? 0.0 : rng.uniform(-1.0, 1.0);
        }
        const int n_atoms = static_cast<int>(rng.next_below(3));
        for (int a = 0; a < n_atoms; ++a) {
            int edge = static_cast<int>(rng.next_below(dom.interior_edges().size()));
            bool dup = false;
            for (const auto& prev : mu.atoms) dup = dup || prev.edge == edge;
            if (dup) continue;
            const double m = rng.uniform(0.1, 0.4);
            const double r = rng.next_double();
            if (r < 0.4) {
                mu.atoms.push_back({edge, m, 0.0});
            } else if (r < 0.8) {
                mu.atoms.push_back({edge, 0.0, m});
            } else {
                mu.atoms.push_back({edge, m, m});
            }
        }
        const std::vector<double> values = make_value_set(u0, 0.125);
        const OracleReport oracle =
            oracle_minimize(dom, Integrand::isotropic(), mu, u0, values);
        const SolveReport phi_rep = minimize_phi(dom, Integrand::isotropic(), mu, u0, cfg);
        const SolveReport hat_rep = minimize_phi_hat(dom, Integrand::isotropic(), mu, u0, cfg);
        REQUIRE(phi_rep.converged && hat_rep.converged);
        const double slack = 1e-4 * (1.0 + std::abs(oracle.phi.value));
        // The solver evaluates the true functional at a feasible point, and
        // the vertex set of the piecewise-linear objective lies inside the
        // value lattice, so the two minima must agree within the duality gap.
        REQUIRE(phi_rep.value >= oracle.phi.value - slack);
        REQUIRE(phi_rep.value <= oracle.phi.value + slack);
        REQUIRE(oracle.phi_hat.value <= oracle.phi.value + 1e-12);
        // The nonconvex descent can stall in a local minimum but never dips
        // below the exact value and never exceeds the convex value.
        REQUIRE(hat_rep.value >= oracle.phi_hat.value - slack);
        REQUIRE(hat_rep.value <= phi_rep.value + 1e-12);
        REQUIRE(hat_rep.monotone);
    }
    TEST_DONE("random instances against the sweep oracle");
}

void run_error_band_scaling() {
    const GridDomain dom = GridDomain::rect(2, 1, 1.0, {0.0, 0.0});
    const std::vector<double> u0 = {0.0, 0.0, 0.0, 1.0, 1.0, 1.0};
    DiscreteMeasure mu = zero_measure(dom);
    mu.atoms.push_back({0, 0.5, 0.0});
    const OracleReport coarse = oracle_minimize(dom, Integrand::isotropic(), mu, u0,
                                                make_value_set(u0, 0.25));
    const OracleReport fine = oracle_minimize(dom, Integrand::isotropic(), mu, u0,
                                              make_value_set(u0, 0.125));
    REQUIRE(coarse.error_band > 0.0);
    // Halving the lattice step halves the quantization band exactly and can
    // only lower the restricted minima.
    REQUIRE_NEAR(fine.error_band, 0.5 * coarse.error_band, 1e-12);
    REQUIRE(fine.phi.value <= coarse.phi.value + 1e-12);
    REQUIRE(fine.phi_hat.value <= coarse.phi_hat.value + 1e-12);
    TEST_DONE("oracle error band scaling");
}

void run_make_value_set_contents() {
    const std::vector<double> u0 = {0.5, -0.25};
    const std::vector<double> vs = make_value_set(u0, 0.25);
    REQUIRE(vs.size() == 7);
    const double expected[7] = {-0.5, -0.25, -0.125, 0.0, 0.25, 0.5, 0.75};
    for (int i = 0; i < 7; ++i) REQUIRE_NEAR(vs[static_cast<size_t>(i)], expected[i], 1e-15);
    for (size_t i = 0; i + 1 < vs.size(); ++i) REQUIRE(vs[i] < vs[i + 1]);
    REQUIRE(contains_value(vs, 0.0));
    REQUIRE_THROWS(make_value_set(u0, 0.0));
    REQUIRE_THROWS(make_value_set(u0, -1.0));
    TEST_DONE("value set construction");
}

void run_unbounded_detection() {
    const GridDomain dom = GridDomain::rect(1, 1, 1.0, {0.0, 0.0});
    const std::vector<double> u0(4, 0.0);
    DiscreteMeasure mu;
    mu.cell_density = {-1e5};
    try {
        minimize_phi(dom, Integrand::isotropic(), mu, u0);
        testsupport::fail_exit(__FILE__, __LINE__, "expected unbounded_detected");
    } catch (const Error& e) {
        REQUIRE(e.code() == ErrCode::unbounded_detected);
    }
    TEST_DONE("unbounded detection");
}

void run_solver_guards() {
    const GridDomain dom = GridDomain::rect(2, 1, 1.0, {0.0, 0.0});
    const std::vector<double> u0 = {0.0, 0.0, 0.0, 1.0, 1.0, 1.0};
    DiscreteMeasure mu = zero_measure(dom);

    SolveConfig tiny;
    tiny.max_iters = 3;
    try {
        minimize_phi(dom, Integrand::isotropic(), mu, u0, tiny);
        testsupport::fail_exit(__FILE__, __LINE__, "expected not_converged");
    } catch (const Error& e) {
        REQUIRE(e.code() == ErrCode::not_converged);
    }

    SolveConfig bad;
    bad.max_iters = 0;
    REQUIRE_THROWS(minimize_phi(dom, Integrand::isotropic(), mu, u0, bad));
    bad = SolveConfig{};
    bad.tol_primal_dual = 0.0;
    REQUIRE_THROWS(minimize_phi(dom, Integrand::isotropic(), mu, u0, bad));
    bad = SolveConfig{};
    bad.dc_max_rounds = 0;
    REQUIRE_THROWS(minimize_phi_hat(dom, Integrand::isotropic(), mu, u0, bad));

    const std::vector<double> short_u0 = {0.0, 0.0};
    REQUIRE_THROWS(minimize_phi(dom, Integrand::isotropic(), mu, short_u0));
    TEST_DONE("solver guards");
}

void run_oracle_guards() {
    const GridDomain big = GridDomain::rect(5, 2, 1.0, {0.0, 0.0});
    DiscreteMeasure mu = zero_measure(big);
    const std::vector<double> u0(big.boundary_edges().size(), 0.0);
    try {
        oracle_minimize(big, Integrand::isotropic(), mu, u0, {0.0, 1.0});
        testsupport::fail_exit(__FILE__, __LINE__, "expected too_large");
    } catch (const Error& e) {
        REQUIRE(e.code() == ErrCode::too_large);
    }

    const GridDomain dom = GridDomain::rect(2, 1, 1.0, {0.0, 0.0});
    DiscreteMeasure small_mu = zero_measure(dom);
    const std::vector<double> small_u0(dom.boundary_edges().size(), 0.0);
    REQUIRE_THROWS(oracle_minimize(dom, Integrand::isotropic(), small_mu, small_u0, {}));

    std::vector<double> too_fine;
    too_fine.reserve(60001);
    for (int k = 0; k <= 60000; ++k) too_fine.push_back(1e-3 * k);
    try {
        oracle_minimize(dom, Integrand::isotropic(), small_mu, small_u0, too_fine);
        testsupport::fail_exit(__FILE__, __LINE__, "expected too_large");
    } catch (const Error& e) {
        REQUIRE(e.code() == ErrCode::too_large);
    }
    TEST_DONE("oracle guards");
}

void run_consistency_gap_split() {
    SolveConfig cfg;
    cfg.max_iters = 200000;
    cfg.tol_primal_dual = 1e-4;
    const ConsistencyGap gap = consistency_gap(0.125, cfg);
    REQUIRE(gap.phi_report.converged);
    REQUIRE(gap.phi_hat_report.converged);
    REQUIRE_NEAR(gap.inf_phi, gap.phi_report.value, 0.0);
    REQUIRE_NEAR(gap.min_phi_hat, gap.phi_hat_report.value, 0.0);
    // The convex value stays near the transition cost 4 while the relaxed
    // functional cancels it against the paired atoms along the diameter.
    REQUIRE(gap.inf_phi >= 3.0);
    REQUIRE(gap.inf_phi <= 5.0);
    REQUIRE(gap.min_phi_hat <= 1.0);
    REQUIRE(gap.min_phi_hat >= -1.0);
    REQUIRE(gap.inf_phi - gap.min_phi_hat >= 2.0);
    REQUIRE(gap.phi_hat_report.monotone);
    REQUIRE_THROWS(consistency_gap(0.0));
    REQUIRE_THROWS(consistency_gap(0.6));
    TEST_DONE("consistency gap split");
}

}  // namespace

int main() {
    run_constant_extension();
    run_line_staircase();
    run_two_cell_jump_instance();
    run_hat_without_atoms_is_convex();
    run_random_instances_vs_oracle();
    run_error_band_scaling();
    run_make_value_set_contents();
    run_unbounded_detection();
    run_solver_guards();
    run_oracle_guards();
    run_consistency_gap_split();
    return testsupport::summary("test_solve");
}
