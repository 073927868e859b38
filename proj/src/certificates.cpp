#include "anisotv/certificates.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "anisotv/quadrature.hpp"

namespace anisotv {

namespace {

// Offset used for exterior boundary traces.  Small enough that the mass a
// sliver of a neighboring field region contributes near corners stays well
// below the flux residual tolerance.
constexpr double kExteriorOffset = 1e-10;

// Zone pattern outside the closed unit triangle.  Each zone carries a
// constant value whose jump across the zone boundary is tangential, so the
// distributional divergence is carried by the triangle boundary alone.
Vec2 zone_value(const Vec2& x) {
    Vec2 v{0.0, 0.0};
    if (x.x < 0.0 && x.y > 0.0 && x.y < 1.0) v = v + Vec2{1.0, 0.0};
    if (x.y < 0.0 && x.x > 0.0 && x.x < 1.0) v = v + Vec2{0.0, 1.0};
    if (x.x + x.y > 1.0 && std::abs(x.y - x.x) < 1.0) v = v + Vec2{-1.0, -1.0};
    return v;
}

// Gap pattern of the removed central region in normalized coordinates:
// rotational fields around the two disc centers plus a constant diagonal
// strip.  Values of overlapping pieces add; the sums stay inside the
// admissible polar-unit set of the quadrant integrand.
Vec2 shell_value(const Vec2& y) {
    const double third = 1.0 / 3.0;
    Vec2 v{0.0, 0.0};
    const Vec2 d1 = y - Vec2{0.0, 2.0 * third};
    const double r1 = norm(d1);
    if (r1 < third && r1 > 1e-14) v = v + rot90(d1) * (1.0 / r1);
    if (std::abs(y.y - y.x) < third) v = v + Vec2{-1.0, -1.0};
    const Vec2 d2 = y - Vec2{2.0 * third, 0.0};
    const double r2 = norm(d2);
    if (r2 < third && r2 > 1e-14) v = v + Vec2{d2.y, -d2.x} * (1.0 / r2);
    return v;
}

// Value of the level-k certificate field: zones outside the unit triangle,
// gap patterns at depths 0..k-1 inside, zero on the level-k iterate.
Vec2 refinement_value(const Vec2& x, int k) {
    if (!(x.x >= 0.0 && x.y >= 0.0 && x.x + x.y <= 1.0)) return zone_value(x);
    Vec2 o{0.0, 0.0};
    double s = 1.0;
    for (int depth = 0; depth < k; ++depth) {
        const Vec2 y = (x - o) * (1.0 / s);
        if (y.y >= 2.0 / 3.0) {
            o.y += s * 2.0 / 3.0;
        } else if (y.x >= 2.0 / 3.0) {
            o.x += s * 2.0 / 3.0;
        } else if (y.x + y.y <= 1.0 / 3.0) {
            // stay at the same origin
        } else {
            return shell_value(y);
        }
        s /= 3.0;
    }
    return Vec2{0.0, 0.0};
}

// Tail sum_{j>=i} (-1)^(j-1)/j^2 of the alternating series with value
// pi^2/12, obtained by peeling the leading terms.
double alternating_tail(int i) {
    double a = kPi * kPi / 12.0;
    for (int j = 1; j < i; ++j) {
        const double term = 1.0 / (static_cast<double>(j) * static_cast<double>(j));
        a -= (j % 2 == 1) ? term : -term;
    }
    return a;
}

Vec2 alternating_value(const Vec2& x) {
    const double r = norm(x);
    if (r < 1e-7) return Vec2{0.0, 0.0};
    int i = 1;
    if (r < 1.0) i = std::max(1, static_cast<int>(std::ceil(1.0 / std::sqrt(r))));
    return x * (-alternating_tail(i) / (r * r));
}

} // namespace

CertificateField::CertificateField(std::vector<FieldPiece> pieces, double bound_C,
                                   const Vec2& window_lo, const Vec2& window_hi,
                                   double min_sample_radius)
    : pieces_(std::move(pieces)),
      bound_C_(bound_C),
      window_lo_(window_lo),
      window_hi_(window_hi),
      min_sample_radius_(min_sample_radius) {
    if (pieces_.empty()) throw Error(ErrCode::invalid_input, "certificate field needs pieces");
    if (!(bound_C_ > 0.0)) throw Error(ErrCode::invalid_input, "certificate bound must be positive");
    if (!(window_hi_.x > window_lo_.x) || !(window_hi_.y > window_lo_.y))
        throw Error(ErrCode::invalid_input, "certificate sample window is empty");
}

Vec2 CertificateField::eval(const Vec2& x) const {
    Vec2 v{0.0, 0.0};
    for (const FieldPiece& p : pieces_) {
        if (p.contains(x)) v = v + p.value(x);
    }
    return v;
}

// Certificate fields are piecewise constant, so a quadrature panel whose
// nodes all land in one piece reports zero error even when the panel
// straddles a narrower piece in between.  Bisection is forced until panels
// are finer than the smallest field feature (side 3^-4 at the deepest
// refinement level) along the longest test edge, which needs depth 11.
constexpr int kFluxSeedDepth = 11;

double boundary_flux(const CertificateField& field, const Shape& shape, double quad_tol) {
    const Boundary& b = shape.boundary();
    const std::size_t n = b.segments.size() + b.arcs.size();
    if (n == 0) return 0.0;
    const double tol = quad_tol / static_cast<double>(n);
    double flux = 0.0;
    for (const Segment& s : b.segments) {
        flux -= s.length() * integrate(
            [&](double t) {
                const Vec2 x = s.point(t) + s.outward_normal * kExteriorOffset;
                return dot(field.eval(x), s.outward_normal);
            },
            0.0, 1.0, tol, 40, kFluxSeedDepth);
    }
    for (const Arc& a : b.arcs) {
        flux -= a.radius * integrate(
            [&](double t) {
                const Vec2 nu = a.outward_normal(t);
                return dot(field.eval(a.point(t) + nu * kExteriorOffset), nu);
            },
            a.t0, a.t1, tol, 40, kFluxSeedDepth);
    }
    return flux;
}

CertificateReport check_certificate(const CertificateField& field,
                                    const std::vector<CurveMeasure>& mu_plus,
                                    const std::vector<CurveMeasure>& mu_minus,
                                    const std::vector<Shape>& test_shapes,
                                    const Integrand& phi,
                                    const CertificateCheckOptions& opts) {
    if (test_shapes.empty())
        throw Error(ErrCode::invalid_input, "certificate check needs at least one test shape");
    CertificateReport rep;
    rep.bound_C = field.bound_C();
    for (const Shape& P : test_shapes) {
        FluxCheck c;
        c.flux = boundary_flux(field, P, opts.flux_quad_tol);
        c.target = measure_of(mu_plus, P, Side::closure) - measure_of(mu_minus, P, Side::closure);
        c.residual = std::abs(c.flux - c.target);
        rep.max_residual = std::max(rep.max_residual, c.residual);
        rep.checks.push_back(c);
    }
    rep.flux_ok = rep.max_residual <= opts.flux_residual_tol;

    Rng rng(opts.seed);
    const Vec2 lo = field.window_lo();
    const Vec2 hi = field.window_hi();
    double sup = 0.0;
    for (int i = 0; i < opts.polar_samples; ++i) {
        Vec2 x;
        do {
            x = Vec2{rng.uniform(lo.x, hi.x), rng.uniform(lo.y, hi.y)};
        } while (norm(x) < field.min_sample_radius());
        const Vec2 s = field.eval(x);
        if (norm(s) < 1e-14) continue;
        sup = std::max(sup, phi.polar(x, s));
    }
    rep.sup_polar = sup;
    rep.polar_ok = sup <= rep.bound_C + opts.polar_slack;
    rep.pass = rep.flux_ok && rep.polar_ok;
    return rep;
}

CertificateField signed_balance_field(double theta) {
    if (!(theta > 0.0) || theta > 1.0)
        throw Error(ErrCode::invalid_input, "balance field parameter must lie in (0, 1]");
    FieldPiece piece;
    piece.contains = [](const Vec2&) { return true; };
    piece.value = [theta](const Vec2& x) {
        const double r = norm(x);
        if (r <= 1.0 || r < 1e-14) return Vec2{0.0, 0.0};
        if (r <= 2.0) return x * (theta / (r * r));
        return x * (-2.0 / (r * r));
    };
    return CertificateField({piece}, 1.0, Vec2{-3.0, -3.0}, Vec2{3.0, 3.0});
}

std::vector<CurveMeasure> signed_balance_mu_plus(double theta) {
    return {CurveMeasure::circle(Vec2{0.0, 0.0}, 2.0, 1.0 + theta / 2.0)};
}

std::vector<CurveMeasure> signed_balance_mu_minus(double theta) {
    return {CurveMeasure::circle(Vec2{0.0, 0.0}, 1.0, theta)};
}

std::vector<Shape> signed_balance_test_shapes() {
    std::vector<Shape> shapes;
    for (const double r : {0.5, 1.0, 1.2, 1.5, 1.7, 2.0, 2.5, 2.9})
        shapes.push_back(Shape::disc(Vec2{0.0, 0.0}, r));
    shapes.push_back(Shape::annulus(Vec2{0.0, 0.0}, 1.3, 1.8));
    shapes.push_back(Shape::annulus(Vec2{0.0, 0.0}, 0.5, 2.4));
    shapes.push_back(Shape::disc(Vec2{0.7, 0.0}, 0.5));
    shapes.push_back(Shape::disc(Vec2{1.5, 0.3}, 1.0));
    shapes.push_back(Shape::disc(Vec2{-0.4, 1.9}, 0.7));
    shapes.push_back(Shape::rectangle(Vec2{-1.7, -1.7}, Vec2{1.7, 1.7}));
    shapes.push_back(Shape::rectangle(Vec2{-0.5, -0.5}, Vec2{0.5, 0.5}));
    shapes.push_back(Shape::rectangle(Vec2{0.2, 0.1}, Vec2{1.9, 1.1}));
    shapes.push_back(Shape::polygon({Vec2{-2.6, -2.2}, Vec2{2.8, -2.3}, Vec2{0.1, 2.9}}));
    shapes.push_back(Shape::polygon(
        {Vec2{2.3, 0.0}, Vec2{0.8, 2.1}, Vec2{-1.9, 1.4}, Vec2{-2.2, -0.9}, Vec2{0.4, -2.3}}));
    shapes.push_back(Shape::half_disc());
    shapes.push_back(Shape::disc(Vec2{0.1, -0.2}, 0.3));
    shapes.push_back(Shape::annulus(Vec2{0.0, 0.0}, 1.05, 2.6));
    return shapes;
}

CertificateField alternating_shell_field() {
    FieldPiece piece;
    piece.contains = [](const Vec2&) { return true; };
    piece.value = [](const Vec2& x) { return alternating_value(x); };
    return CertificateField({piece}, 1.0, Vec2{-1.5, -1.5}, Vec2{1.5, 1.5}, 1e-3);
}

std::vector<CurveMeasure> alternating_shell_mu_plus(int truncation_index) {
    if (truncation_index < 1)
        throw Error(ErrCode::invalid_input, "truncation index must be positive");
    std::vector<CurveMeasure> ms;
    for (int j = 1; j <= truncation_index; j += 2)
        ms.push_back(CurveMeasure::circle(Vec2{0.0, 0.0}, 1.0 / (static_cast<double>(j) * j), 1.0));
    return ms;
}

std::vector<CurveMeasure> alternating_shell_mu_minus(int truncation_index) {
    if (truncation_index < 2)
        throw Error(ErrCode::invalid_input, "truncation index must be at least 2");
    std::vector<CurveMeasure> ms;
    for (int j = 2; j <= truncation_index; j += 2)
        ms.push_back(CurveMeasure::circle(Vec2{0.0, 0.0}, 1.0 / (static_cast<double>(j) * j), 1.0));
    return ms;
}

std::vector<Shape> alternating_shell_test_shapes() {
    std::vector<Shape> shapes;
    for (const double r : {0.7, 0.5, 0.3, 0.2, 0.15, 0.12, 0.07, 0.05, 0.035})
        shapes.push_back(Shape::disc(Vec2{0.0, 0.0}, r));
    shapes.push_back(Shape::annulus(Vec2{0.0, 0.0}, 0.06, 0.5));
    shapes.push_back(Shape::annulus(Vec2{0.0, 0.0}, 0.13, 0.8));
    shapes.push_back(Shape::annulus(Vec2{0.0, 0.0}, 0.3, 1.2));
    shapes.push_back(Shape::disc(Vec2{0.3, 0.0}, 0.25));
    shapes.push_back(Shape::disc(Vec2{0.15, 0.1}, 0.1));
    shapes.push_back(Shape::rectangle(Vec2{-0.6, -0.6}, Vec2{0.6, 0.6}));
    shapes.push_back(Shape::rectangle(Vec2{-0.23, -0.23}, Vec2{0.23, 0.23}));
    shapes.push_back(Shape::rectangle(Vec2{0.02, 0.01}, Vec2{0.8, 0.5}));
    shapes.push_back(Shape::rectangle(Vec2{-0.4, -0.1}, Vec2{0.4, 0.45}));
    shapes.push_back(Shape::disc(Vec2{0.0, 0.0}, 1.3));
    shapes.push_back(Shape::polygon({Vec2{0.6, 0.0}, Vec2{0.3, 0.52}, Vec2{-0.3, 0.52},
                                     Vec2{-0.6, 0.0}, Vec2{-0.3, -0.52}, Vec2{0.3, -0.52}}));
    shapes.push_back(Shape::half_disc());
    return shapes;
}

CertificateField triangle_zone_field() {
    FieldPiece piece;
    piece.contains = [](const Vec2&) { return true; };
    piece.value = [](const Vec2& x) {
        if (x.x >= 0.0 && x.y >= 0.0 && x.x + x.y <= 1.0) return Vec2{0.0, 0.0};
        return zone_value(x);
    };
    return CertificateField({piece}, 1.0, Vec2{-0.8, -0.8}, Vec2{1.6, 1.6});
}

std::vector<CurveMeasure> triangle_boundary_measure(int level) {
    const Shape iterate = Shape::fractal_iterate(level);
    std::vector<CurveMeasure> ms;
    ms.reserve(iterate.triangles().size() * 3);
    const double rt2 = std::sqrt(2.0);
    for (const Tri& t : iterate.triangles()) {
        const Vec2 v0 = t.o;
        const Vec2 v1{t.o.x + t.s, t.o.y};
        const Vec2 v2{t.o.x, t.o.y + t.s};
        ms.push_back(CurveMeasure::segment(v0, v1, 1.0));
        ms.push_back(CurveMeasure::segment(v1, v2, rt2));
        ms.push_back(CurveMeasure::segment(v2, v0, 1.0));
    }
    return ms;
}

std::vector<Shape> triangle_zone_test_shapes() {
    std::vector<Shape> shapes;
    shapes.push_back(Shape::fractal_iterate(0));
    shapes.push_back(Shape::fractal_iterate(1));
    shapes.push_back(Shape::fractal_iterate(2));
    shapes.push_back(Shape::disc(Vec2{1.0 / 3.0, 1.0 / 3.0}, 1.1));
    shapes.push_back(Shape::disc(Vec2{0.0, 0.0}, 0.45));
    shapes.push_back(Shape::disc(Vec2{0.8, 0.8}, 0.25));
    shapes.push_back(Shape::disc(Vec2{0.5, 0.5}, 0.2));
    shapes.push_back(Shape::rectangle(Vec2{-0.1, -0.1}, Vec2{1.2, 1.2}));
    shapes.push_back(Shape::rectangle(Vec2{0.4, 0.02}, Vec2{1.3, 0.6}));
    shapes.push_back(Shape::polygon({Vec2{-0.15, -0.1}, Vec2{1.4, -0.12}, Vec2{-0.18, 1.45}}));
    shapes.push_back(Shape::disc(Vec2{-0.3, 0.5}, 0.4));
    shapes.push_back(Shape::disc(Vec2{0.5, -0.25}, 0.2));
    shapes.push_back(Shape::disc(Vec2{1.1, 0.2}, 0.3));
    shapes.push_back(Shape::rectangle(Vec2{0.02, 0.02}, Vec2{0.3, 0.28}));
    shapes.push_back(Shape::rectangle(Vec2{-0.2, 0.3}, Vec2{0.25, 0.75}));
    shapes.push_back(Shape::disc(Vec2{2.0 / 3.0, 0.0}, 0.28));
    shapes.push_back(Shape::polygon({Vec2{0.3, -0.15}, Vec2{0.75, 0.1}, Vec2{0.6, 0.55}, Vec2{0.25, 0.2}}));
    shapes.push_back(Shape::disc(Vec2{0.15, 0.15}, 0.1));
    shapes.push_back(Shape::rectangle(Vec2{-0.3, -0.25}, Vec2{1.35, 1.3}));
    shapes.push_back(Shape::disc(Vec2{1.0 / 3.0, 1.0 / 3.0}, 0.8));
    return shapes;
}

CertificateField build_fractal_certificate(int k) {
    if (k < 1 || k > 6)
        throw Error(ErrCode::level_out_of_range,
                    "refinement certificate level must lie in 1..6, got " + std::to_string(k));
    FieldPiece piece;
    piece.contains = [](const Vec2&) { return true; };
    piece.value = [k](const Vec2& x) { return refinement_value(x, k); };
    return CertificateField({piece}, 1.0, Vec2{-0.6, -0.6}, Vec2{1.4, 1.4});
}

std::vector<Shape> fractal_test_shapes(int k) {
    std::vector<Shape> shapes;
    const int max_iter = std::min(k + 1, 5);
    for (int j = 0; j <= max_iter; ++j) shapes.push_back(Shape::fractal_iterate(j));
    shapes.push_back(Shape::disc(Vec2{1.0 / 3.0, 1.0 / 3.0}, 1.2));
    shapes.push_back(Shape::disc(Vec2{0.0, 0.0}, 0.45));
    shapes.push_back(Shape::disc(Vec2{0.8, 0.8}, 0.25));
    shapes.push_back(Shape::disc(Vec2{0.5, 0.5}, 0.2));
    shapes.push_back(Shape::disc(Vec2{0.15, 0.15}, 0.1));
    shapes.push_back(Shape::disc(Vec2{2.0 / 3.0, 0.0}, 0.28));
    shapes.push_back(Shape::disc(Vec2{-0.3, 0.5}, 0.4));
    shapes.push_back(Shape::disc(Vec2{0.5, -0.25}, 0.2));
    shapes.push_back(Shape::disc(Vec2{1.1, 0.2}, 0.3));
    shapes.push_back(Shape::disc(Vec2{1.0 / 3.0, 1.0 / 3.0}, 0.8));
    shapes.push_back(Shape::rectangle(Vec2{-0.1, -0.1}, Vec2{1.2, 1.2}));
    shapes.push_back(Shape::rectangle(Vec2{0.4, 0.02}, Vec2{1.3, 0.6}));
    shapes.push_back(Shape::rectangle(Vec2{0.36, 0.36}, Vec2{0.62, 0.6}));
    shapes.push_back(Shape::rectangle(Vec2{0.02, 0.02}, Vec2{0.3, 0.28}));
    shapes.push_back(Shape::rectangle(Vec2{-0.2, 0.3}, Vec2{0.25, 0.75}));
    shapes.push_back(Shape::polygon({Vec2{-0.15, -0.1}, Vec2{1.4, -0.12}, Vec2{-0.18, 1.45}}));
    shapes.push_back(Shape::polygon({Vec2{0.3, -0.15}, Vec2{0.75, 0.1}, Vec2{0.6, 0.55}, Vec2{0.25, 0.2}}));
    return shapes;
}

} // namespace anisotv
