#ifndef ANISOTV_CERTIFICATES_HPP
#define ANISOTV_CERTIFICATES_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "anisotv/core.hpp"
#include "anisotv/integrand.hpp"
#include "anisotv/measures.hpp"
#include "anisotv/shapes.hpp"

namespace anisotv {

struct FieldPiece {
    std::function<bool(const Vec2&)> contains;
    std::function<Vec2(const Vec2&)> value;
};

// Piecewise vector field sigma used as a divergence certificate.  Where
// pieces overlap their values add.  The window is the box in which the
// pointwise polar bound is sampled; points closer than min_sample_radius to
// the origin are redrawn (fields defined by a radial shell index stay
// bounded but the index computation is capped).
class CertificateField {
public:
    CertificateField(std::vector<FieldPiece> pieces, double bound_C,
                     const Vec2& window_lo, const Vec2& window_hi,
                     double min_sample_radius = 0.0);

    Vec2 eval(const Vec2& x) const;
    double bound_C() const { return bound_C_; }
    const Vec2& window_lo() const { return window_lo_; }
    const Vec2& window_hi() const { return window_hi_; }
    double min_sample_radius() const { return min_sample_radius_; }

private:
    std::vector<FieldPiece> pieces_;
    double bound_C_;
    Vec2 window_lo_;
    Vec2 window_hi_;
    double min_sample_radius_;
};

struct FluxCheck {
    double flux = 0.0;
    double target = 0.0;
    double residual = 0.0;
};

struct CertificateReport {
    std::vector<FluxCheck> checks;
    double max_residual = 0.0;
    double sup_polar = 0.0;
    double bound_C = 0.0;
    bool flux_ok = false;
    bool polar_ok = false;
    bool pass = false;
};

struct CertificateCheckOptions {
    double flux_quad_tol = 1e-8;
    double flux_residual_tol = 1e-6;
    double polar_slack = 1e-9;
    int polar_samples = 20000;
    std::uint64_t seed = 0x51ce5ce1ce5ce1full;
};

// Flux of the field through the shape boundary against the inward normal,
// with the trace taken from outside: the integrand is
// -sigma(x + eps*nu_out).nu_out.  Perimeters are priced on inward normals
// throughout, so a valid certificate pairs this flux with closure masses.
double boundary_flux(const CertificateField& field, const Shape& shape, double quad_tol);

// Verifies that the field is a divergence certificate for the pair
// (mu_plus, mu_minus): for every test shape P the inward exterior-trace flux
// must match mu_plus(closure P) - mu_minus(closure P), and sampled values
// must satisfy polar(x, sigma(x)) <= bound_C + slack.  The two conditions
// bound mu_plus(closure A) - mu_minus(interior A) by bound_C times the
// anisotropic perimeter of A for every competitor A.
CertificateReport check_certificate(const CertificateField& field,
                                    const std::vector<CurveMeasure>& mu_plus,
                                    const std::vector<CurveMeasure>& mu_minus,
                                    const std::vector<Shape>& test_shapes,
                                    const Integrand& phi,
                                    const CertificateCheckOptions& opts = {});

// Radial balance field: zero on the unit disc, theta*x/|x|^2 between the
// unit circle and radius 2, and -2*x/|x|^2 outside.  Its inward-normal flux
// reproduces (1+theta/2)H^1 on the radius-2 circle minus theta*H^1 on the
// unit circle.
CertificateField signed_balance_field(double theta);
std::vector<CurveMeasure> signed_balance_mu_plus(double theta);
std::vector<CurveMeasure> signed_balance_mu_minus(double theta);
std::vector<Shape> signed_balance_test_shapes();

// Alternating shell field: -a_i*x/|x|^2 between the circles of radius
// 1/i^2 and 1/(i-1)^2, where a_i is the tail of the alternating sum of
// (-1)^(j-1)/j^2 starting at j = i.  Its inward-normal flux alternates sign
// on the circle family; the curve-measure targets truncate the family at
// truncation_index circles.
CertificateField alternating_shell_field();
std::vector<CurveMeasure> alternating_shell_mu_plus(int truncation_index = 4000);
std::vector<CurveMeasure> alternating_shell_mu_minus(int truncation_index = 4000);
std::vector<Shape> alternating_shell_test_shapes();

// Zone field vanishing on the closed unit triangle: (1,0) on the strip left
// of the vertical leg, (0,1) below the horizontal leg, (-1,-1) on the
// diagonal strip past the hypotenuse.  Certifies the boundary measure of
// the unit triangle (legs with density 1, hypotenuse with density sqrt 2).
CertificateField triangle_zone_field();
std::vector<CurveMeasure> triangle_boundary_measure(int level);
std::vector<Shape> triangle_zone_test_shapes();

// Level-k refinement certificate: the zone field outside the unit triangle
// together with rotational shell patterns in the removed gaps down to depth
// k-1, vanishing on the level-k iterate.  Levels outside 1..6 raise
// LevelOutOfRange.
CertificateField build_fractal_certificate(int k);
std::vector<Shape> fractal_test_shapes(int k);

} // namespace anisotv

#endif
