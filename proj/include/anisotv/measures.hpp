#ifndef ANISOTV_MEASURES_HPP
#define ANISOTV_MEASURES_HPP

#include <vector>

#include "anisotv/core.hpp"
#include "anisotv/integrand.hpp"
#include "anisotv/shapes.hpp"

namespace anisotv {

enum class CurveKind { circle, segment, polyline, fractal_lumps };

// Point mass standing in for the restriction of a limit measure to one
// level-k triangle; sits at the triangle centroid.
struct Lump {
    Tri support;
    double mass = 0.0;
};

// Signed measure of the form density * H^1 restricted to a curve, or a sum
// of lumps approximating a self-similar limit measure.
class CurveMeasure {
public:
    static CurveMeasure circle(const Vec2& center, double radius, double density);
    static CurveMeasure segment(const Vec2& a, const Vec2& b, double density);
    static CurveMeasure polyline(std::vector<Vec2> points, double density);
    // 3^level lumps of equal mass density*sqrt(2)/3^level at the level-k
    // triangle centroids.  The default density 2*sqrt(2) gives total mass 4.
    static CurveMeasure fractal_level(int level, double density = 2.0 * 1.4142135623730951);

    CurveKind kind() const { return kind_; }
    double density() const { return density_; }
    double total_mass() const;

    Vec2 center() const { return center_; }
    double radius() const { return radius_; }
    const std::vector<Vec2>& points() const { return points_; }
    const std::vector<Lump>& lumps() const { return lumps_; }
    int level() const { return level_; }

private:
    CurveMeasure() = default;
    CurveKind kind_ = CurveKind::circle;
    double density_ = 0.0;
    Vec2 center_{0.0, 0.0};
    double radius_ = 0.0;
    std::vector<Vec2> points_; // chain vertices for segment/polyline
    std::vector<Lump> lumps_;
    int level_ = -1;
};

enum class Side { closure, interior };

struct MeasureOfResult {
    double value = 0.0;
    // Set when a lump support straddles the boundary and the centroid rule
    // decided membership.
    bool approximate_membership = false;
};

// Mass the measure assigns to the closed shape (side == closure, boundary
// mass counted) or to its interior (boundary mass dropped).  Pieces of the
// support lying within distance 1e-12 of the boundary are resolved exactly
// when they coincide with a boundary piece; representative points falling in
// the band (1e-12, 1e-9) raise AmbiguousIncidence.
MeasureOfResult measure_of_detailed(const CurveMeasure& m, const Shape& shape, Side side);
double measure_of(const CurveMeasure& m, const Shape& shape, Side side);
MeasureOfResult measure_of_detailed(const std::vector<CurveMeasure>& ms, const Shape& shape, Side side);
double measure_of(const std::vector<CurveMeasure>& ms, const Shape& shape, Side side);

// mu(closure of A) - nu(interior of A) - C * anisotropic perimeter of A.
// Nonpositive scores over a family of shapes are evidence for the
// interaction inequality at constant C; a positive score is a witness
// against it.
double ic_score(const std::vector<CurveMeasure>& mu, const std::vector<CurveMeasure>& nu,
                const Shape& shape, const Integrand& phi, double C);

} // namespace anisotv

#endif
