#include <cmath>

#include "anisotv/core.hpp"
#include "anisotv/quadrature.hpp"

#include "support.hpp"

namespace {

using namespace anisotv;

void run_polynomials_exact() {
    // Simpson is exact on cubics; the adaptive driver must terminate at depth
    // zero and reproduce them to machine precision.
    auto cubic = [](double t) { return 2.0 * t * t * t - t * t + 4.0 * t - 7.0; };
    const double val = integrate(cubic, -1.0, 3.0, 1e-12);
    // Antiderivative t^4/2 - t^3/3 + 2t^2 - 7t evaluated at the endpoints.
    const double exact = (81.0 / 2.0 - 9.0 + 18.0 - 21.0) - (0.5 + 1.0 / 3.0 + 2.0 + 7.0);
    REQUIRE_NEAR(val, exact, 1e-12);
    TEST_DONE("cubic exactness");
}

void run_transcendental_antiderivatives() {
    REQUIRE_NEAR(integrate([](double t) { return std::sin(t); }, 0.0, kPi, 1e-12), 2.0, 1e-10);
    REQUIRE_NEAR(integrate([](double t) { return std::exp(t); }, 0.0, 1.0, 1e-12),
                 std::exp(1.0) - 1.0, 1e-10);
    REQUIRE_NEAR(integrate([](double t) { return 1.0 / t; }, 1.0, 4.0, 1e-12), std::log(4.0),
                 1e-10);
    TEST_DONE("transcendental antiderivatives");
}

void run_radial_density_line_integral() {
    // Integral of 1/|x| along the vertical segment {x = a, y in [y0, y1]} has
    // the closed antiderivative log(y + sqrt(a^2 + y^2)).
    const double a = 0.75;
    const double y0 = -0.5, y1 = 2.0;
    auto f = [a](double y) { return 1.0 / std::hypot(a, y); };
    auto F = [a](double y) { return std::log(y + std::hypot(a, y)); };
    REQUIRE_NEAR(integrate(f, y0, y1, 1e-12), F(y1) - F(y0), 1e-10);
    TEST_DONE("radial density along a segment");
}

void run_orientation_and_additivity() {
    auto f = [](double t) { return std::cos(3.0 * t) + t; };
    const double whole = integrate(f, -2.0, 5.0, 1e-12);
    const double split =
        integrate(f, -2.0, 1.3, 1e-12) + integrate(f, 1.3, 5.0, 1e-12);
    REQUIRE_NEAR(whole, split, 1e-9);
    REQUIRE_NEAR(integrate(f, 5.0, 5.0, 1e-12), 0.0, 0.0);
    TEST_DONE("interval additivity");
}

void run_sharp_kink() {
    // |t| has a kink at zero that falls on a Simpson node; adaptive bisection
    // still resolves it.
    REQUIRE_NEAR(integrate([](double t) { return std::abs(t); }, -1.0, 2.0, 1e-12), 2.5, 1e-10);
    // Kink at an irrational offset inside the interval.
    const double c = std::sqrt(2.0) / 3.0;
    auto g = [c](double t) { return std::abs(t - c); };
    const double exact = ((1.0 - c) * (1.0 - c) + c * c) / 2.0;
    REQUIRE_NEAR(integrate(g, 0.0, 1.0, 1e-12), exact, 1e-9);
    TEST_DONE("kinked integrands");
}

void run_depth_exhaustion_throws() {
    // A near-singular spike cannot meet a tight budget at depth 4.
    auto spike = [](double t) { return 1.0 / (1e-9 + t * t); };
    REQUIRE_THROWS(integrate(spike, -1.0, 1.0, 1e-14, 4));
    try {
        integrate(spike, -1.0, 1.0, 1e-14, 4);
    } catch (const Error& e) {
        REQUIRE(e.code() == ErrCode::quadrature_non_convergence);
    }
    TEST_DONE("depth exhaustion raises");
}

}  // namespace

int main() {
    run_polynomials_exact();
    run_transcendental_antiderivatives();
    run_radial_density_line_integral();
    run_orientation_and_additivity();
    run_sharp_kink();
    run_depth_exhaustion_throws();
    return testsupport::summary("test_quadrature");
}
