#include "anisotv/measures.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace anisotv {

namespace {

constexpr double kNearBand = 1e-9;
constexpr double kAngleTol = 1e-11;

double normalize_angle(double t) {
    t = std::fmod(t, 2.0 * kPi);
    if (t < 0.0) t += 2.0 * kPi;
    return t;
}

// Splitting state for one support curve parametrized over [lo, hi]: sorted
// breakpoints plus intervals known to lie exactly on the boundary.
struct Splits {
    std::vector<double> breaks;
    std::vector<std::pair<double, double>> on;
};

bool in_on_interval(const Splits& sp, double t, double period) {
    for (const auto& [s, e] : sp.on) {
        double d = t - s;
        if (period > 0.0) {
            d = std::fmod(d, period);
            if (d < 0.0) d += period;
        }
        if (d >= 0.0 && d < e - s) return true;
    }
    return false;
}

[[noreturn]] void throw_ambiguous(const Vec2& x) {
    throw Error(ErrCode::ambiguous_incidence,
                "support point (" + std::to_string(x.x) + ", " + std::to_string(x.y)
                    + ") lies within the unresolved band around the shape boundary");
}

// inside / on-boundary decision for a representative point of a support
// piece that was not matched to a boundary piece exactly.
bool representative_inside(const Shape& shape, const Vec2& x) {
    const double d = shape.boundary_distance(x);
    if (d <= kNearBand) throw_ambiguous(x);
    return shape.classify(x) == Region::inside;
}

// Roots of |base + t dir - c|^2 = r^2 clipped to [t_lo, t_hi].
void circle_line_roots(const Vec2& base, const Vec2& dir, const Vec2& c, double r,
                       double t_lo, double t_hi, std::vector<double>& out) {
    const Vec2 w = base - c;
    const double a = dot(dir, dir);
    if (a < 1e-300) return;
    const double b = 2.0 * dot(w, dir);
    const double cc = dot(w, w) - r * r;
    const double disc = b * b - 4.0 * a * cc;
    if (disc < 0.0) return;
    const double sq = std::sqrt(disc);
    for (const double t : {(-b - sq) / (2.0 * a), (-b + sq) / (2.0 * a)}) {
        if (t >= t_lo - 1e-9 && t <= t_hi + 1e-9) out.push_back(std::clamp(t, t_lo, t_hi));
    }
}

double eval_circle(const CurveMeasure& m, const Shape& shape, Side side) {
    const Vec2 c = m.center();
    const double r = m.radius();
    const double scale = std::max(1.0, r);
    Splits sp;
    for (const Segment& e : shape.boundary().segments) {
        std::vector<double> ts;
        circle_line_roots(e.a, e.b - e.a, c, r, 0.0, 1.0, ts);
        for (const double t : ts) {
            const Vec2 p = e.point(t);
            sp.breaks.push_back(normalize_angle(std::atan2(p.y - c.y, p.x - c.x)));
        }
    }
    for (const Arc& a : shape.boundary().arcs) {
        const double d = norm(a.center - c);
        if (d <= 1e-12 * scale && std::abs(a.radius - r) <= 1e-12 * scale) {
            const double s = normalize_angle(a.t0);
            sp.on.emplace_back(s, s + (a.t1 - a.t0));
            sp.breaks.push_back(s);
            sp.breaks.push_back(normalize_angle(a.t1));
            continue;
        }
        if (d < 1e-300) continue; // concentric, different radius
        const double axis = (d * d + r * r - a.radius * a.radius) / (2.0 * d);
        const double h2 = r * r - axis * axis;
        if (h2 < 0.0) continue;
        const double h = std::sqrt(h2);
        const Vec2 u = (a.center - c) * (1.0 / d);
        const Vec2 v = rot90(u);
        for (const double sgn : {-1.0, 1.0}) {
            const Vec2 p = c + u * axis + v * (sgn * h);
            sp.breaks.push_back(normalize_angle(std::atan2(p.y - c.y, p.x - c.x)));
        }
    }
    double inside_len = 0.0;
    double on_len = 0.0;
    if (sp.breaks.empty()) {
        const Vec2 x = c + Vec2{r * std::cos(0.7), r * std::sin(0.7)};
        if (representative_inside(shape, x)) inside_len = 2.0 * kPi;
    } else {
        std::sort(sp.breaks.begin(), sp.breaks.end());
        sp.breaks.erase(std::unique(sp.breaks.begin(), sp.breaks.end(),
                                    [](double a, double b) { return b - a <= kAngleTol; }),
                        sp.breaks.end());
        const std::size_t n = sp.breaks.size();
        for (std::size_t i = 0; i < n; ++i) {
            const double s = sp.breaks[i];
            const double e = (i + 1 < n) ? sp.breaks[i + 1] : sp.breaks[0] + 2.0 * kPi;
            const double len = e - s;
            if (len <= kAngleTol) continue;
            const double mid = s + 0.5 * len;
            if (in_on_interval(sp, mid, 2.0 * kPi)) {
                on_len += len;
                continue;
            }
            const Vec2 x = c + Vec2{r * std::cos(mid), r * std::sin(mid)};
            if (representative_inside(shape, x)) inside_len += len;
        }
    }
    const double counted = inside_len + (side == Side::closure ? on_len : 0.0);
    return m.density() * r * counted;
}

double eval_chain_piece(const Vec2& p, const Vec2& q, double density, const Shape& shape, Side side) {
    const Vec2 d1 = q - p;
    const double len = norm(d1);
    Splits sp;
    sp.breaks = {0.0, 1.0};
    for (const Segment& e : shape.boundary().segments) {
        const Vec2 d2 = e.b - e.a;
        const double denom = cross(d1, d2);
        const double sc = norm(d1) * norm(d2) + 1e-300;
        if (std::abs(denom) <= 1e-12 * sc) {
            const double line_dist = std::abs(cross(e.a - p, d1)) / (norm(d1) + 1e-300);
            if (line_dist <= 1e-12 * std::max(1.0, norm(d1))) {
                const double ta = dot(e.a - p, d1) / dot(d1, d1);
                const double tb = dot(e.b - p, d1) / dot(d1, d1);
                const double lo = std::max(0.0, std::min(ta, tb));
                const double hi = std::min(1.0, std::max(ta, tb));
                if (hi - lo > 1e-12) {
                    sp.on.emplace_back(lo, hi);
                    sp.breaks.push_back(lo);
                    sp.breaks.push_back(hi);
                }
            }
            continue;
        }
        const double t = cross(e.a - p, d2) / denom;
        const double u = cross(e.a - p, d1) / denom;
        if (t >= -1e-9 && t <= 1.0 + 1e-9 && u >= -1e-6 && u <= 1.0 + 1e-6)
            sp.breaks.push_back(std::clamp(t, 0.0, 1.0));
    }
    for (const Arc& a : shape.boundary().arcs)
        circle_line_roots(p, d1, a.center, a.radius, 0.0, 1.0, sp.breaks);
    std::sort(sp.breaks.begin(), sp.breaks.end());
    sp.breaks.erase(std::unique(sp.breaks.begin(), sp.breaks.end(),
                                [](double a, double b) { return b - a <= 1e-12; }),
                    sp.breaks.end());
    double inside_len = 0.0;
    double on_len = 0.0;
    for (std::size_t i = 0; i + 1 < sp.breaks.size(); ++i) {
        const double s = sp.breaks[i];
        const double e = sp.breaks[i + 1];
        if (e - s <= 1e-12) continue;
        const double mid = 0.5 * (s + e);
        if (in_on_interval(sp, mid, 0.0)) {
            on_len += e - s;
            continue;
        }
        if (representative_inside(shape, p + d1 * mid)) inside_len += e - s;
    }
    const double counted = inside_len + (side == Side::closure ? on_len : 0.0);
    return density * len * counted;
}

} // namespace

CurveMeasure CurveMeasure::circle(const Vec2& center, double radius, double density) {
    if (!(radius > 0.0)) throw Error(ErrCode::invalid_input, "circle measure needs positive radius");
    CurveMeasure m;
    m.kind_ = CurveKind::circle;
    m.center_ = center;
    m.radius_ = radius;
    m.density_ = density;
    return m;
}

CurveMeasure CurveMeasure::segment(const Vec2& a, const Vec2& b, double density) {
    if (norm(b - a) <= 1e-300)
        throw Error(ErrCode::invalid_input, "segment measure needs distinct endpoints");
    CurveMeasure m;
    m.kind_ = CurveKind::segment;
    m.points_ = {a, b};
    m.density_ = density;
    return m;
}

CurveMeasure CurveMeasure::polyline(std::vector<Vec2> points, double density) {
    if (points.size() < 2)
        throw Error(ErrCode::invalid_input, "polyline measure needs at least 2 points");
    for (std::size_t i = 0; i + 1 < points.size(); ++i)
        if (norm(points[i + 1] - points[i]) <= 1e-300)
            throw Error(ErrCode::invalid_input, "polyline measure has a degenerate piece");
    CurveMeasure m;
    m.kind_ = CurveKind::polyline;
    m.points_ = std::move(points);
    m.density_ = density;
    return m;
}

CurveMeasure CurveMeasure::fractal_level(int level, double density) {
    const Shape iterate = Shape::fractal_iterate(level); // validates the level
    CurveMeasure m;
    m.kind_ = CurveKind::fractal_lumps;
    m.level_ = level;
    m.density_ = density;
    m.lumps_.reserve(iterate.triangles().size());
    const double rt2 = std::sqrt(2.0);
    for (const Tri& t : iterate.triangles())
        m.lumps_.push_back(Lump{t, density * rt2 * t.s});
    return m;
}

double CurveMeasure::total_mass() const {
    switch (kind_) {
    case CurveKind::circle:
        return density_ * 2.0 * kPi * radius_;
    case CurveKind::segment:
    case CurveKind::polyline: {
        double len = 0.0;
        for (std::size_t i = 0; i + 1 < points_.size(); ++i)
            len += norm(points_[i + 1] - points_[i]);
        return density_ * len;
    }
    case CurveKind::fractal_lumps: {
        double total = 0.0;
        for (const Lump& l : lumps_) total += l.mass;
        return total;
    }
    }
    return 0.0;
}

MeasureOfResult measure_of_detailed(const CurveMeasure& m, const Shape& shape, Side side) {
    MeasureOfResult res;
    if (shape.is_empty()) return res;
    switch (m.kind()) {
    case CurveKind::circle:
        res.value = eval_circle(m, shape, side);
        return res;
    case CurveKind::segment:
    case CurveKind::polyline: {
        const auto& pts = m.points();
        for (std::size_t i = 0; i + 1 < pts.size(); ++i)
            res.value += eval_chain_piece(pts[i], pts[i + 1], m.density(), shape, side);
        return res;
    }
    case CurveKind::fractal_lumps: {
        for (const Lump& l : m.lumps()) {
            if (triangle_within(l.support, shape)) {
                if (side == Side::closure) {
                    res.value += l.mass;
                } else if (shape.classify(l.support.centroid()) == Region::inside) {
                    res.value += l.mass;
                }
                continue;
            }
            if (triangle_disjoint(l.support, shape)) continue;
            res.approximate_membership = true;
            const Region at = shape.classify(l.support.centroid());
            const bool counted = side == Side::closure ? at != Region::outside : at == Region::inside;
            if (counted) res.value += l.mass;
        }
        return res;
    }
    }
    return res;
}

double measure_of(const CurveMeasure& m, const Shape& shape, Side side) {
    return measure_of_detailed(m, shape, side).value;
}

MeasureOfResult measure_of_detailed(const std::vector<CurveMeasure>& ms, const Shape& shape, Side side) {
    MeasureOfResult res;
    for (const CurveMeasure& m : ms) {
        const MeasureOfResult one = measure_of_detailed(m, shape, side);
        res.value += one.value;
        res.approximate_membership = res.approximate_membership || one.approximate_membership;
    }
    return res;
}

double measure_of(const std::vector<CurveMeasure>& ms, const Shape& shape, Side side) {
    return measure_of_detailed(ms, shape, side).value;
}

double ic_score(const std::vector<CurveMeasure>& mu, const std::vector<CurveMeasure>& nu,
                const Shape& shape, const Integrand& phi, double C) {
    const double plus = measure_of(mu, shape, Side::closure);
    const double minus = measure_of(nu, shape, Side::interior);
    return plus - minus - C * aniso_perimeter(shape, phi);
}

} // namespace anisotv
