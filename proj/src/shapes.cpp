#include "anisotv/shapes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "anisotv/quadrature.hpp"

namespace anisotv {

namespace {

constexpr double kSegmentQuadTol = 1e-12;
constexpr double kArcQuadTol = 1e-10;

double segment_segment_distance(const Vec2& p1, const Vec2& p2, const Vec2& q1, const Vec2& q2) {
    const Vec2 d1 = p2 - p1;
    const Vec2 d2 = q2 - q1;
    const double denom = cross(d1, d2);
    const Vec2 r = q1 - p1;
    if (std::abs(denom) > 1e-15 * (norm(d1) * norm(d2) + 1e-300)) {
        const double t = cross(r, d2) / denom;
        const double u = cross(r, d1) / denom;
        if (t >= 0.0 && t <= 1.0 && u >= 0.0 && u <= 1.0) return 0.0;
    }
    double d = point_segment_distance(p1, q1, q2);
    d = std::min(d, point_segment_distance(p2, q1, q2));
    d = std::min(d, point_segment_distance(q1, p1, p2));
    d = std::min(d, point_segment_distance(q2, p1, p2));
    return d;
}

// Signed orientation of c relative to the directed line a->b.
double orient(const Vec2& a, const Vec2& b, const Vec2& c) {
    return cross(b - a, c - a);
}

bool properly_cross(const Vec2& p1, const Vec2& p2, const Vec2& q1, const Vec2& q2, double tol) {
    const double band = tol * (norm(p2 - p1) * norm(q2 - q1) + 1e-300);
    const auto straddles = [band](double a, double b) {
        return (a > band && b < -band) || (a < -band && b > band);
    };
    return straddles(orient(p1, p2, q1), orient(p1, p2, q2))
        && straddles(orient(q1, q2, p1), orient(q1, q2, p2));
}

double point_in_tri_distance(const Vec2& p, const Tri& t) {
    const Vec2 v0 = t.o;
    const Vec2 v1{t.o.x + t.s, t.o.y};
    const Vec2 v2{t.o.x, t.o.y + t.s};
    const Vec2 u = p - t.o;
    if (u.x >= 0.0 && u.y >= 0.0 && u.x + u.y <= t.s) return 0.0;
    double d = point_segment_distance(p, v0, v1);
    d = std::min(d, point_segment_distance(p, v1, v2));
    d = std::min(d, point_segment_distance(p, v2, v0));
    return d;
}

bool tri_strictly_contains(const Tri& t, const Vec2& p, double tol) {
    const Vec2 u = p - t.o;
    return u.x > tol && u.y > tol && u.x + u.y < t.s - tol;
}

double arc_distance(const Arc& a, const Vec2& p) {
    const Vec2 r = p - a.center;
    const double rho = norm(r);
    if (rho < 1e-300) return a.radius;
    double th = std::atan2(r.y, r.x);
    while (th < a.t0) th += 2.0 * kPi;
    if (th <= a.t1) return std::abs(rho - a.radius);
    const double d0 = norm(p - a.point(a.t0));
    const double d1 = norm(p - a.point(a.t1));
    return std::min(d0, d1);
}

} // namespace

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
    const Vec2 d = b - a;
    const double len2 = dot(d, d);
    if (len2 < 1e-300) return norm(p - a);
    const double t = std::clamp(dot(p - a, d) / len2, 0.0, 1.0);
    return norm(p - (a + d * t));
}

Shape Shape::polygon(std::vector<Vec2> vertices) {
    const std::size_t n = vertices.size();
    if (n < 3) throw Error(ErrCode::invalid_input, "polygon needs at least 3 vertices");
    double scale = 0.0;
    for (const Vec2& v : vertices) scale = std::max({scale, std::abs(v.x), std::abs(v.y)});
    scale = std::max(scale, 1.0);
    double twice_area = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = vertices[i];
        const Vec2& b = vertices[(i + 1) % n];
        if (norm(b - a) <= 1e-12 * scale)
            throw Error(ErrCode::invalid_input, "polygon has a degenerate edge");
        twice_area += cross(a, b);
    }
    if (twice_area <= 0.0)
        throw Error(ErrCode::invalid_input, "polygon vertices must be counterclockwise");
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
            if (adjacent) continue;
            const Vec2& p1 = vertices[i];
            const Vec2& p2 = vertices[(i + 1) % n];
            const Vec2& q1 = vertices[j];
            const Vec2& q2 = vertices[(j + 1) % n];
            if (segment_segment_distance(p1, p2, q1, q2) <= 1e-12 * scale)
                throw Error(ErrCode::invalid_input, "polygon is self-intersecting");
        }
    }
    Shape s;
    s.kind_ = ShapeKind::polygon;
    s.vertices_ = std::move(vertices);
    s.build_boundary();
    return s;
}

Shape Shape::rectangle(const Vec2& lo, const Vec2& hi) {
    if (!(hi.x > lo.x) || !(hi.y > lo.y))
        throw Error(ErrCode::invalid_input, "rectangle corners must satisfy lo < hi");
    return polygon({lo, Vec2{hi.x, lo.y}, hi, Vec2{lo.x, hi.y}});
}

Shape Shape::disc(const Vec2& center, double radius) {
    if (!(radius > 0.0)) throw Error(ErrCode::invalid_input, "disc radius must be positive");
    Shape s;
    s.kind_ = ShapeKind::disc;
    s.center_ = center;
    s.r_out_ = radius;
    s.build_boundary();
    return s;
}

Shape Shape::annulus(const Vec2& center, double r_in, double r_out) {
    if (!(r_in > 0.0) || !(r_out > r_in))
        throw Error(ErrCode::invalid_input, "annulus radii must satisfy 0 < r_in < r_out");
    Shape s;
    s.kind_ = ShapeKind::annulus;
    s.center_ = center;
    s.r_in_ = r_in;
    s.r_out_ = r_out;
    s.build_boundary();
    return s;
}

Shape Shape::half_disc() {
    Shape s;
    s.kind_ = ShapeKind::half_disc;
    s.center_ = Vec2{0.0, 0.0};
    s.r_out_ = 2.0;
    s.build_boundary();
    return s;
}

Shape Shape::fractal_iterate(int level) {
    if (level < 0) throw Error(ErrCode::invalid_input, "fractal level must be nonnegative");
    if (level > 12) throw Error(ErrCode::invalid_input, "fractal level above 12 is not supported");
    Shape s;
    s.kind_ = ShapeKind::fractal;
    s.level_ = level;
    s.tris_ = {Tri{Vec2{0.0, 0.0}, 1.0}};
    for (int it = 0; it < level; ++it) {
        std::vector<Tri> next;
        next.reserve(s.tris_.size() * 3);
        for (const Tri& t : s.tris_) {
            const double s3 = t.s / 3.0;
            next.push_back(Tri{Vec2{t.o.x / 3.0, (t.o.y + 2.0) / 3.0}, s3});
            next.push_back(Tri{Vec2{t.o.x / 3.0, t.o.y / 3.0}, s3});
            next.push_back(Tri{Vec2{(t.o.x + 2.0) / 3.0, t.o.y / 3.0}, s3});
        }
        s.tris_ = std::move(next);
    }
    s.build_boundary();
    return s;
}

Shape Shape::empty() {
    Shape s;
    s.kind_ = ShapeKind::polygon;
    return s;
}

void Shape::build_boundary() {
    boundary_ = Boundary{};
    switch (kind_) {
    case ShapeKind::polygon: {
        const std::size_t n = vertices_.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Vec2& a = vertices_[i];
            const Vec2& b = vertices_[(i + 1) % n];
            const Vec2 d = normalized(b - a);
            boundary_.segments.push_back(Segment{a, b, Vec2{d.y, -d.x}});
        }
        break;
    }
    case ShapeKind::disc:
        boundary_.arcs.push_back(Arc{center_, r_out_, 0.0, 2.0 * kPi, 1.0});
        break;
    case ShapeKind::annulus:
        boundary_.arcs.push_back(Arc{center_, r_out_, 0.0, 2.0 * kPi, 1.0});
        boundary_.arcs.push_back(Arc{center_, r_in_, 0.0, 2.0 * kPi, -1.0});
        break;
    case ShapeKind::half_disc: {
        const double s3 = std::sqrt(3.0);
        boundary_.arcs.push_back(Arc{center_, 2.0, -kPi / 6.0, 7.0 * kPi / 6.0, 1.0});
        boundary_.segments.push_back(
            Segment{Vec2{-s3, -1.0}, Vec2{s3, -1.0}, Vec2{0.0, -1.0}});
        break;
    }
    case ShapeKind::fractal:
        for (const Tri& t : tris_) {
            const Vec2 v0 = t.o;
            const Vec2 v1{t.o.x + t.s, t.o.y};
            const Vec2 v2{t.o.x, t.o.y + t.s};
            const double inv_rt2 = 1.0 / std::sqrt(2.0);
            boundary_.segments.push_back(Segment{v0, v1, Vec2{0.0, -1.0}});
            boundary_.segments.push_back(Segment{v1, v2, Vec2{inv_rt2, inv_rt2}});
            boundary_.segments.push_back(Segment{v2, v0, Vec2{-1.0, 0.0}});
        }
        break;
    }
}

double Shape::area() const {
    switch (kind_) {
    case ShapeKind::polygon: {
        if (vertices_.empty()) return 0.0;
        double twice = 0.0;
        const std::size_t n = vertices_.size();
        for (std::size_t i = 0; i < n; ++i)
            twice += cross(vertices_[i], vertices_[(i + 1) % n]);
        return 0.5 * twice;
    }
    case ShapeKind::disc:
        return kPi * r_out_ * r_out_;
    case ShapeKind::annulus:
        return kPi * (r_out_ * r_out_ - r_in_ * r_in_);
    case ShapeKind::half_disc:
        return 8.0 * kPi / 3.0 + std::sqrt(3.0);
    case ShapeKind::fractal: {
        double a = 0.0;
        for (const Tri& t : tris_) a += 0.5 * t.s * t.s;
        return a;
    }
    }
    return 0.0;
}

double Shape::boundary_distance(const Vec2& p) const {
    double d = std::numeric_limits<double>::infinity();
    for (const Segment& s : boundary_.segments)
        d = std::min(d, point_segment_distance(p, s.a, s.b));
    for (const Arc& a : boundary_.arcs) d = std::min(d, arc_distance(a, p));
    return d;
}

Region Shape::classify(const Vec2& p, double tol) const {
    if (is_empty()) return Region::outside;
    if (boundary_distance(p) <= tol) return Region::boundary;
    switch (kind_) {
    case ShapeKind::polygon: {
        bool inside = false;
        const std::size_t n = vertices_.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Vec2& a = vertices_[i];
            const Vec2& b = vertices_[(i + 1) % n];
            if ((a.y > p.y) != (b.y > p.y)) {
                const double xint = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
                if (p.x < xint) inside = !inside;
            }
        }
        return inside ? Region::inside : Region::outside;
    }
    case ShapeKind::disc:
        return norm(p - center_) < r_out_ ? Region::inside : Region::outside;
    case ShapeKind::annulus: {
        const double rho = norm(p - center_);
        return (rho > r_in_ && rho < r_out_) ? Region::inside : Region::outside;
    }
    case ShapeKind::half_disc:
        return (norm(p) < 2.0 && p.y > -1.0) ? Region::inside : Region::outside;
    case ShapeKind::fractal:
        for (const Tri& t : tris_) {
            const Vec2 u = p - t.o;
            if (u.x > 0.0 && u.y > 0.0 && u.x + u.y < t.s) return Region::inside;
        }
        return Region::outside;
    }
    return Region::outside;
}

double aniso_perimeter(const Shape& shape, const Integrand& phi) {
    double total = 0.0;
    for (const Segment& s : shape.boundary().segments) {
        const Vec2 nu_in = Vec2{0.0, 0.0} - s.outward_normal;
        const double len = s.length();
        total += len * integrate(
            [&](double t) { return phi.eval(s.point(t), nu_in); }, 0.0, 1.0, kSegmentQuadTol);
    }
    for (const Arc& a : shape.boundary().arcs) {
        total += a.radius * integrate(
            [&](double t) {
                const Vec2 nu_in = Vec2{0.0, 0.0} - a.outward_normal(t);
                return phi.eval(a.point(t), nu_in);
            },
            a.t0, a.t1, kArcQuadTol);
    }
    return total;
}

std::pair<double, double> radial_density_ic_check(const Shape& shape, RadialDensityMode mode) {
    const auto field = [mode](const Vec2& x) {
        const double rho = norm(x);
        if (rho < 1e-300) return Vec2{0.0, 0.0};
        const double denom = mode == RadialDensityMode::capped ? std::max(rho, 1.0) : rho;
        return x * (1.0 / denom);
    };
    double lhs = 0.0;
    for (const Segment& s : shape.boundary().segments) {
        const double len = s.length();
        lhs += len * integrate(
            [&](double t) { return dot(field(s.point(t)), s.outward_normal); },
            0.0, 1.0, kArcQuadTol);
    }
    for (const Arc& a : shape.boundary().arcs) {
        lhs += a.radius * integrate(
            [&](double t) { return dot(field(a.point(t)), a.outward_normal(t)); },
            a.t0, a.t1, kArcQuadTol);
    }
    const double rhs = aniso_perimeter(shape, Integrand::isotropic());
    return {lhs, rhs};
}

bool triangle_within(const Tri& t, const Shape& shape, double tol) {
    if (shape.is_empty()) return false;
    const Vec2 v0 = t.o;
    const Vec2 v1{t.o.x + t.s, t.o.y};
    const Vec2 v2{t.o.x, t.o.y + t.s};
    switch (shape.kind()) {
    case ShapeKind::disc: {
        const Vec2 c = shape.center();
        const double r = shape.r_outer() + tol;
        return norm(v0 - c) <= r && norm(v1 - c) <= r && norm(v2 - c) <= r;
    }
    case ShapeKind::annulus: {
        const Vec2 c = shape.center();
        const double r = shape.r_outer() + tol;
        if (!(norm(v0 - c) <= r && norm(v1 - c) <= r && norm(v2 - c) <= r)) return false;
        return point_in_tri_distance(c, t) >= shape.r_inner() - tol;
    }
    case ShapeKind::half_disc: {
        const double r = 2.0 + tol;
        return norm(v0) <= r && norm(v1) <= r && norm(v2) <= r
            && v0.y >= -1.0 - tol && v1.y >= -1.0 - tol && v2.y >= -1.0 - tol;
    }
    case ShapeKind::fractal:
        for (const Tri& big : shape.triangles()) {
            if (t.o.x >= big.o.x - tol && t.o.y >= big.o.y - tol
                && (t.o.x - big.o.x) + (t.o.y - big.o.y) + t.s <= big.s + tol)
                return true;
        }
        return false;
    case ShapeKind::polygon: {
        for (const Vec2& v : {v0, v1, v2})
            if (shape.classify(v, tol) == Region::outside) return false;
        const Vec2 tv[3] = {v0, v1, v2};
        for (int i = 0; i < 3; ++i) {
            for (const Segment& e : shape.boundary().segments) {
                if (properly_cross(tv[i], tv[(i + 1) % 3], e.a, e.b, 1e-12)) return false;
            }
        }
        for (const Vec2& pv : shape.vertices())
            if (tri_strictly_contains(t, pv, tol)) return false;
        return true;
    }
    }
    return false;
}

bool triangle_disjoint(const Tri& t, const Shape& shape, double tol) {
    if (shape.is_empty()) return true;
    const Vec2 v0 = t.o;
    const Vec2 v1{t.o.x + t.s, t.o.y};
    const Vec2 v2{t.o.x, t.o.y + t.s};
    switch (shape.kind()) {
    case ShapeKind::disc:
        return point_in_tri_distance(shape.center(), t) > shape.r_outer() + tol;
    case ShapeKind::annulus: {
        const Vec2 c = shape.center();
        if (point_in_tri_distance(c, t) > shape.r_outer() + tol) return true;
        const double rin = shape.r_inner() - tol;
        return norm(v0 - c) < rin && norm(v1 - c) < rin && norm(v2 - c) < rin;
    }
    case ShapeKind::half_disc:
        if (v0.y < -1.0 - tol && v1.y < -1.0 - tol && v2.y < -1.0 - tol) return true;
        return point_in_tri_distance(Vec2{0.0, 0.0}, t) > 2.0 + tol;
    case ShapeKind::fractal: {
        for (const Tri& big : shape.triangles()) {
            const Vec2 b0 = big.o;
            const Vec2 b1{big.o.x + big.s, big.o.y};
            const Vec2 b2{big.o.x, big.o.y + big.s};
            bool apart = true;
            for (const Vec2& v : {v0, v1, v2})
                if (point_in_tri_distance(v, big) <= tol) apart = false;
            for (const Vec2& v : {b0, b1, b2})
                if (point_in_tri_distance(v, t) <= tol) apart = false;
            if (!apart) return false;
            const Vec2 ta[3] = {v0, v1, v2};
            const Vec2 ba[3] = {b0, b1, b2};
            for (int i = 0; i < 3 && apart; ++i)
                for (int j = 0; j < 3 && apart; ++j)
                    if (segment_segment_distance(ta[i], ta[(i + 1) % 3], ba[j], ba[(j + 1) % 3]) <= tol)
                        apart = false;
            if (!apart) return false;
        }
        return true;
    }
    case ShapeKind::polygon: {
        for (const Vec2& v : {v0, v1, v2})
            if (shape.classify(v, tol) != Region::outside) return false;
        for (const Vec2& pv : shape.vertices())
            if (point_in_tri_distance(pv, t) <= tol) return false;
        const Vec2 tv[3] = {v0, v1, v2};
        for (int i = 0; i < 3; ++i)
            for (const Segment& e : shape.boundary().segments)
                if (segment_segment_distance(tv[i], tv[(i + 1) % 3], e.a, e.b) <= tol) return false;
        return true;
    }
    }
    return true;
}

} // namespace anisotv
