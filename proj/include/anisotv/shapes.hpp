#ifndef ANISOTV_SHAPES_HPP
#define ANISOTV_SHAPES_HPP

#include <utility>
#include <vector>

#include "anisotv/core.hpp"
#include "anisotv/integrand.hpp"

namespace anisotv {

// Straight boundary piece traversed from a to b with the enclosed region on
// the left, so the outward normal is the right-hand normal of b - a.
struct Segment {
    Vec2 a;
    Vec2 b;
    Vec2 outward_normal; // unit
    double length() const { return norm(b - a); }
    Vec2 point(double t) const { return a + (b - a) * t; } // t in [0,1]
};

// Circular boundary piece center + radius*(cos t, sin t) for t in [t0, t1],
// t1 > t0.  The outward normal at parameter t is normal_sign*(cos t, sin t):
// +1 when the region lies inside the circle, -1 when it lies outside (inner
// rim of an annulus).
struct Arc {
    Vec2 center;
    double radius = 0.0;
    double t0 = 0.0;
    double t1 = 0.0;
    double normal_sign = 1.0;
    double length() const { return radius * (t1 - t0); }
    Vec2 point(double t) const {
        return center + Vec2{radius * std::cos(t), radius * std::sin(t)};
    }
    Vec2 outward_normal(double t) const {
        return Vec2{normal_sign * std::cos(t), normal_sign * std::sin(t)};
    }
};

struct Boundary {
    std::vector<Segment> segments;
    std::vector<Arc> arcs;
};

// Closed right isoceles triangle conv{o, o+(s,0), o+(0,s)}.
struct Tri {
    Vec2 o;
    double s = 0.0;
    Vec2 centroid() const { return Vec2{o.x + s / 3.0, o.y + s / 3.0}; }
};

enum class ShapeKind { polygon, disc, annulus, half_disc, fractal };

enum class Region : int { outside = -1, boundary = 0, inside = 1 };

// Catalog of sets with exactly representable boundaries.  The fractal kind is
// the level-k iterate of the three-map contraction scheme T1(x)=(x+(0,2))/3,
// T2(x)=x/3, T3(x)=(x+(2,0))/3 applied to the unit right triangle.
class Shape {
public:
    static Shape polygon(std::vector<Vec2> vertices); // CCW, simple
    static Shape rectangle(const Vec2& lo, const Vec2& hi);
    static Shape unit_triangle() {
        return polygon({Vec2{0.0, 0.0}, Vec2{1.0, 0.0}, Vec2{0.0, 1.0}});
    }
    static Shape disc(const Vec2& center, double radius);
    static Shape annulus(const Vec2& center, double r_in, double r_out);
    // The chord-cut disc {x in B_2 : x.y > -1}.
    static Shape half_disc();
    static Shape fractal_iterate(int level);
    static Shape empty();

    ShapeKind kind() const { return kind_; }
    bool is_empty() const { return kind_ == ShapeKind::polygon && vertices_.empty(); }

    double area() const;
    const Boundary& boundary() const { return boundary_; }
    Region classify(const Vec2& p, double tol = kIncidenceTol) const;
    // Euclidean distance from p to the topological boundary.
    double boundary_distance(const Vec2& p) const;

    int level() const { return level_; }
    const std::vector<Tri>& triangles() const { return tris_; }
    const std::vector<Vec2>& vertices() const { return vertices_; }
    Vec2 center() const { return center_; }
    double r_inner() const { return r_in_; }
    double r_outer() const { return r_out_; }

private:
    Shape() = default;
    void build_boundary();

    ShapeKind kind_ = ShapeKind::polygon;
    std::vector<Vec2> vertices_;
    Vec2 center_{0.0, 0.0};
    double r_in_ = 0.0;
    double r_out_ = 0.0;
    int level_ = -1;
    std::vector<Tri> tris_;
    Boundary boundary_;
};

// Integral of phi(x, inward normal) over the boundary.  Segment pieces use
// adaptive quadrature that terminates immediately for x-independent
// integrands; arcs use absolute tolerance 1e-10.
double aniso_perimeter(const Shape& shape, const Integrand& phi);

enum class RadialDensityMode { one_over_r, capped };

// Evaluates (integral of H over the shape, isotropic perimeter) where
// H(x) = 1/|x|, or H = 2 on the unit disc and 1/|x| outside in capped mode.
// The area integral is computed as the outward boundary flux of x/|x|
// (resp. x/max{|x|,1}).  The inequality lhs <= rhs holds for every shape,
// with equality exactly for centered discs (capped: of radius >= 1, or the
// empty shape).
std::pair<double, double> radial_density_ic_check(const Shape& shape, RadialDensityMode mode);

// Closed containment of a triangle in a shape, exact for the catalog.
bool triangle_within(const Tri& t, const Shape& shape, double tol = kIncidenceTol);
// True when the triangle and the shape have disjoint closures.
bool triangle_disjoint(const Tri& t, const Shape& shape, double tol = kIncidenceTol);

// Distance from p to the closed segment [a, b].
double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b);

} // namespace anisotv

#endif
