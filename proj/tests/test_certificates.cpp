#include <cmath>
#include <vector>

#include "anisotv/certificates.hpp"
#include "anisotv/core.hpp"
#include "anisotv/integrand.hpp"
#include "anisotv/measures.hpp"
#include "anisotv/shapes.hpp"

#include "support.hpp"

namespace {

using namespace anisotv;

const double kSqrt2 = std::sqrt(2.0);

void run_balance_flux_oracle() {
    const double theta = 0.7;
    const CertificateField f = signed_balance_field(theta);

    // Inward flux through centered discs, by radius band: zero inside the
    // unit disc, -2*pi*theta between the circles, 4*pi outside both.
    REQUIRE_NEAR(boundary_flux(f, Shape::disc({0, 0}, 0.5), 1e-9), 0.0, 1e-7);
    REQUIRE_NEAR(boundary_flux(f, Shape::disc({0, 0}, 1.5), 1e-9), -2.0 * kPi * theta, 1e-7);
    REQUIRE_NEAR(boundary_flux(f, Shape::disc({0, 0}, 1.0), 1e-9), -2.0 * kPi * theta, 1e-7);
    REQUIRE_NEAR(boundary_flux(f, Shape::disc({0, 0}, 3.0), 1e-9), 4.0 * kPi, 1e-7);
    REQUIRE_NEAR(boundary_flux(f, Shape::disc({0, 0}, 2.0), 1e-9), 4.0 * kPi, 1e-7);
    REQUIRE_NEAR(boundary_flux(f, Shape::rectangle({-2.7, -2.7}, {2.7, 2.7}), 1e-9), 4.0 * kPi,
                 1e-6);

    // An annulus avoiding both circles encloses no mass.
    REQUIRE_NEAR(boundary_flux(f, Shape::annulus({0, 0}, 1.3, 1.8), 1e-9), 0.0, 1e-7);

    // Field values stay inside the unit polar ball of the Euclidean norm.
    REQUIRE_NEAR(norm(f.eval({1.2, 0.0})), theta / 1.2, 1e-12);
    REQUIRE_NEAR(norm(f.eval({0.0, -2.5})), 2.0 / 2.5, 1e-12);
    REQUIRE_NEAR(norm(f.eval({0.3, 0.4})), 0.0, 0.0);
    TEST_DONE("balance field flux oracle");
}

void run_balance_certificate() {
    for (double theta : {0.3, 1.0}) {
        const CertificateReport rep = check_certificate(
            signed_balance_field(theta), signed_balance_mu_plus(theta),
            signed_balance_mu_minus(theta), signed_balance_test_shapes(),
            Integrand::isotropic());
        REQUIRE(rep.checks.size() >= 18);
        REQUIRE(rep.flux_ok);
        REQUIRE(rep.max_residual <= 1e-6);
        REQUIRE(rep.polar_ok);
        REQUIRE(rep.sup_polar <= 1.0 + 1e-9);
        REQUIRE(rep.pass);
    }
    REQUIRE_THROWS(signed_balance_field(0.0));
    REQUIRE_THROWS(signed_balance_field(1.5));
    TEST_DONE("balance certificate battery");
}

void run_shell_flux_oracle() {
    const CertificateField f = alternating_shell_field();
    const double a1 = kPi * kPi / 12.0;

    // Inward flux equals the alternating tail cut at the first circle inside.
    REQUIRE_NEAR(boundary_flux(f, Shape::disc({0, 0}, 1.3), 1e-9), 2.0 * kPi * a1, 1e-7);
    REQUIRE_NEAR(boundary_flux(f, Shape::disc({0, 0}, 0.5), 1e-9), 2.0 * kPi * (a1 - 1.0),
                 1e-7);
    REQUIRE_NEAR(boundary_flux(f, Shape::disc({0, 0}, 0.2), 1e-9),
                 2.0 * kPi * (a1 - 1.0 + 0.25), 1e-7);
    TEST_DONE("shell field flux oracle");
}

void run_shell_certificate() {
    const CertificateReport rep = check_certificate(
        alternating_shell_field(), alternating_shell_mu_plus(), alternating_shell_mu_minus(),
        alternating_shell_test_shapes(), Integrand::isotropic());
    REQUIRE(rep.flux_ok);
    REQUIRE(rep.polar_ok);
    REQUIRE(rep.pass);

    // The truncated targets must carry the full tail up to the tolerance: a
    // short truncation visibly breaks the flux match.
    const CertificateReport broken = check_certificate(
        alternating_shell_field(), alternating_shell_mu_plus(3), alternating_shell_mu_minus(3),
        alternating_shell_test_shapes(), Integrand::isotropic());
    REQUIRE(!broken.flux_ok);
    REQUIRE(broken.max_residual > 1e-3);
    TEST_DONE("shell certificate battery");
}

void run_zone_flux_oracle() {
    const CertificateField f = triangle_zone_field();

    // The triangle boundary carries mass 4: legs 1 each, hypotenuse 2.
    REQUIRE_NEAR(boundary_flux(f, Shape::unit_triangle(), 1e-9), 4.0, 1e-7);
    // A corner disc collects only the two leg pieces inside it.
    REQUIRE_NEAR(boundary_flux(f, Shape::disc({0.0, 0.0}, 0.45), 1e-9), 0.9, 1e-7);
    // Away from the triangle the zones are divergence free.
    REQUIRE_NEAR(boundary_flux(f, Shape::disc({-0.4, 0.5}, 0.2), 1e-9), 0.0, 1e-7);
    REQUIRE_NEAR(boundary_flux(f, Shape::rectangle({-0.5, -0.5}, {1.4, 1.4}), 1e-9), 4.0,
                 1e-6);

    // Values sit exactly on the quadrant polar unit sphere.
    const Integrand quad = Integrand::quadrant();
    REQUIRE_NEAR(quad.polar({0, 0}, f.eval({-0.2, 0.5})), 1.0, 1e-12);
    REQUIRE_NEAR(quad.polar({0, 0}, f.eval({0.5, -0.2})), 1.0, 1e-12);
    REQUIRE_NEAR(quad.polar({0, 0}, f.eval({0.8, 0.8})), 1.0, 1e-12);
    REQUIRE_NEAR(norm(f.eval({0.2, 0.2})), 0.0, 0.0);
    TEST_DONE("zone field flux oracle");
}

void run_zone_certificate() {
    const CertificateReport rep =
        check_certificate(triangle_zone_field(), triangle_boundary_measure(0), {},
                          triangle_zone_test_shapes(), Integrand::quadrant());
    REQUIRE(rep.checks.size() >= 20);
    REQUIRE(rep.flux_ok);
    REQUIRE(rep.polar_ok);
    REQUIRE(rep.sup_polar <= 1.0 + 1e-9);
    REQUIRE(rep.pass);

    // The mirrored integrand prices the opposite normals, where the zone
    // values leave the unit polar ball: (-1,-1) pairs with the mirrored
    // hypotenuse direction at sqrt(2) > 1.
    const CertificateReport mirrored =
        check_certificate(triangle_zone_field(), triangle_boundary_measure(0), {},
                          triangle_zone_test_shapes(), Integrand::quadrant().mirrored());
    REQUIRE(!mirrored.polar_ok);
    TEST_DONE("zone certificate battery");
}

void run_refinement_certificates() {
    for (int k = 1; k <= 2; ++k) {
        const CertificateReport rep =
            check_certificate(build_fractal_certificate(k), triangle_boundary_measure(k), {},
                              fractal_test_shapes(k), Integrand::quadrant());
        REQUIRE(rep.flux_ok);
        REQUIRE(rep.max_residual <= 1e-6);
        REQUIRE(rep.polar_ok);
        REQUIRE(rep.sup_polar <= 1.0 + 1e-9);
        REQUIRE(rep.pass);
    }
    REQUIRE_THROWS(build_fractal_certificate(0));
    REQUIRE_THROWS(build_fractal_certificate(7));
    try {
        build_fractal_certificate(7);
    } catch (const Error& e) {
        REQUIRE(e.code() == ErrCode::level_out_of_range);
    }
    TEST_DONE("refinement certificate batteries");
}

void run_level_measure_masses() {
    // Every level of the boundary measure carries total mass 4 over the
    // closed unit triangle: 3^k triangles, each 3^-k*(1 + 1 + sqrt2*sqrt2).
    for (int k = 0; k <= 3; ++k) {
        const auto mu = triangle_boundary_measure(k);
        double mass = 0.0;
        for (const auto& m : mu) mass += m.total_mass();
        REQUIRE_NEAR(mass, 4.0, 1e-12);
        REQUIRE_NEAR(measure_of(mu, Shape::rectangle({-0.2, -0.2}, {1.2, 1.2}), Side::closure),
                     4.0, 1e-12);
    }
    TEST_DONE("boundary measure masses");
}

void run_rotational_field_is_divergence_free() {
    FieldPiece p;
    p.contains = [](const Vec2& x) { return norm(x) > 1e-12; };
    p.value = [](const Vec2& x) { return rot90(x) / dot(x, x); };
    const CertificateField f({p}, 2.0, {-2, -2}, {2, 2}, 1e-3);
    REQUIRE_NEAR(boundary_flux(f, Shape::disc({0, 0}, 1.0), 1e-10), 0.0, 1e-8);
    REQUIRE_NEAR(boundary_flux(f, Shape::disc({1.2, 0.3}, 0.5), 1e-10), 0.0, 1e-8);
    REQUIRE_NEAR(boundary_flux(f, Shape::rectangle({-1.0, -0.8}, {0.9, 1.1}), 1e-10), 0.0,
                 1e-8);
    TEST_DONE("rotational field has zero flux");
}

void run_broken_certificates_fail() {
    // A constant field violates the polar bound but carries no divergence.
    FieldPiece p;
    p.contains = [](const Vec2&) { return true; };
    p.value = [](const Vec2&) { return Vec2{2.0, 0.0}; };
    const CertificateField f({p}, 1.0, {-1, -1}, {1, 1});
    const CertificateReport rep =
        check_certificate(f, {}, {}, {Shape::disc({0, 0}, 0.5)}, Integrand::isotropic());
    REQUIRE(rep.flux_ok);
    REQUIRE(!rep.polar_ok);
    REQUIRE(!rep.pass);

    // Mismatched measure scaling breaks the flux check.
    const CertificateReport bad_flux = check_certificate(
        signed_balance_field(0.5), signed_balance_mu_plus(1.0), signed_balance_mu_minus(1.0),
        {Shape::disc({0, 0}, 1.5)}, Integrand::isotropic());
    REQUIRE(!bad_flux.flux_ok);
    REQUIRE(!bad_flux.pass);
    TEST_DONE("broken certificates are rejected");
}

void run_field_validation() {
    FieldPiece p;
    p.contains = [](const Vec2&) { return true; };
    p.value = [](const Vec2&) { return Vec2{0.0, 0.0}; };
    REQUIRE_THROWS(CertificateField({}, 1.0, {-1, -1}, {1, 1}));
    REQUIRE_THROWS(CertificateField({p}, 0.0, {-1, -1}, {1, 1}));
    REQUIRE_THROWS(CertificateField({p}, 1.0, {1, 1}, {-1, -1}));
    const CertificateField ok({p}, 1.0, {-1, -1}, {1, 1});
    REQUIRE_THROWS(check_certificate(ok, {}, {}, {}, Integrand::isotropic()));
    TEST_DONE("field validation");
}

}  // namespace

int main() {
    run_balance_flux_oracle();
    run_balance_certificate();
    run_shell_flux_oracle();
    run_shell_certificate();
    run_zone_flux_oracle();
    run_zone_certificate();
    run_refinement_certificates();
    run_level_measure_masses();
    run_rotational_field_is_divergence_free();
    run_broken_certificates_fail();
    run_field_validation();
    return testsupport::summary("test_certificates");
}
