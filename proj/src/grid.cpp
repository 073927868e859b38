#include "anisotv/grid.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>

namespace anisotv {

namespace {

long long pair_key(int a, int b, int n) {
    if (a > b) std::swap(a, b);
    return static_cast<long long>(a) * n + b;
}

bool finite(double v) { return std::isfinite(v); }

struct Circle {
    Vec2 c;
    double r = 0.0;
};

bool circle_contains(const Circle& c, const Vec2& p) {
    return norm(p - c.c) <= c.r + 1e-9 * (1.0 + c.r);
}

Circle circle_two(const Vec2& a, const Vec2& b) {
    Circle c;
    c.c = (a + b) * 0.5;
    c.r = 0.5 * norm(a - b);
    return c;
}

Circle circle_three(const Vec2& a, const Vec2& b, const Vec2& c) {
    const Vec2 ab = b - a;
    const Vec2 ac = c - a;
    const double d = 2.0 * cross(ab, ac);
    const double scale = std::max({1.0, norm(ab), norm(ac)});
    if (std::abs(d) <= 1e-12 * scale * scale) {
        Circle best = circle_two(a, b);
        const Circle bc = circle_two(b, c);
        if (bc.r > best.r) best = bc;
        const Circle ca = circle_two(c, a);
        if (ca.r > best.r) best = ca;
        return best;
    }
    const double la = dot(ab, ab);
    const double lc = dot(ac, ac);
    Circle out;
    out.c = a + Vec2{(ac.y * la - ab.y * lc) / d, (ab.x * lc - ac.x * la) / d};
    out.r = norm(out.c - a);
    return out;
}

}  // namespace

GridDomain GridDomain::rect(int nx, int ny, double h, const Vec2& origin) {
    if (nx < 1 || ny < 1 || !(h > 0.0)) {
        throw Error(ErrCode::invalid_input, "rect grid needs nx, ny >= 1 and h > 0");
    }
    GridDomain g;
    g.h_ = h;
    g.origin_ = origin;
    g.nx_ = nx;
    g.ny_ = ny;
    g.cell_of_.assign(static_cast<size_t>(nx) * ny, -1);
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            g.cell_of_[static_cast<size_t>(iy) * nx + ix] = static_cast<int>(g.cells_.size());
            g.cells_.push_back({ix, iy});
        }
    }
    g.build_edges();
    return g;
}

GridDomain GridDomain::from_bitmap(const std::vector<std::string>& rows, double h,
                                   const Vec2& origin) {
    if (rows.empty() || !(h > 0.0)) {
        throw Error(ErrCode::invalid_input, "bitmap grid needs rows and h > 0");
    }
    const int ny = static_cast<int>(rows.size());
    const int nx = static_cast<int>(rows.front().size());
    for (const auto& row : rows) {
        if (static_cast<int>(row.size()) != nx) {
            throw Error(ErrCode::invalid_input, "bitmap rows must have equal length");
        }
        for (char ch : row) {
            if (ch != '#' && ch != '.') {
                throw Error(ErrCode::invalid_input, "bitmap rows use '#' and '.' only");
            }
        }
    }
    GridDomain g;
    g.h_ = h;
    g.origin_ = origin;
    g.nx_ = nx;
    g.ny_ = ny;
    g.cell_of_.assign(static_cast<size_t>(nx) * ny, -1);
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            if (rows[static_cast<size_t>(ny - 1 - iy)][static_cast<size_t>(ix)] == '#') {
                g.cell_of_[static_cast<size_t>(iy) * nx + ix] =
                    static_cast<int>(g.cells_.size());
                g.cells_.push_back({ix, iy});
            }
        }
    }
    if (g.cells_.empty()) {
        throw Error(ErrCode::invalid_input, "bitmap has no active cell");
    }
    g.build_edges();
    g.require_connected();
    return g;
}

GridDomain GridDomain::from_shape(const Shape& shape, double h, const Vec2& origin,
                                  int nx, int ny) {
    if (nx < 1 || ny < 1 || !(h > 0.0)) {
        throw Error(ErrCode::invalid_input, "shape grid needs nx, ny >= 1 and h > 0");
    }
    GridDomain g;
    g.h_ = h;
    g.origin_ = origin;
    g.nx_ = nx;
    g.ny_ = ny;
    g.cell_of_.assign(static_cast<size_t>(nx) * ny, -1);
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            const Vec2 center = origin + Vec2{(ix + 0.5) * h, (iy + 0.5) * h};
            if (shape.classify(center) == Region::inside) {
                g.cell_of_[static_cast<size_t>(iy) * nx + ix] =
                    static_cast<int>(g.cells_.size());
                g.cells_.push_back({ix, iy});
            }
        }
    }
    if (g.cells_.empty()) {
        throw Error(ErrCode::invalid_input, "no cell center lies inside the shape");
    }
    g.build_edges();
    g.require_connected();
    return g;
}

GridDomain GridDomain::line(int n, double h, double origin_x) {
    if (n < 1 || !(h > 0.0)) {
        throw Error(ErrCode::invalid_input, "line grid needs n >= 1 and h > 0");
    }
    GridDomain g;
    g.h_ = h;
    g.dim_ = 1;
    g.origin_ = Vec2{origin_x, -0.5 * h};
    g.nx_ = n;
    g.ny_ = 1;
    g.cell_of_.assign(static_cast<size_t>(n), -1);
    for (int ix = 0; ix < n; ++ix) {
        g.cell_of_[static_cast<size_t>(ix)] = ix;
        g.cells_.push_back({ix, 0});
    }
    g.build_edges();
    return g;
}

void GridDomain::build_edges() {
    const bool transverse = dim_ == 2;
    std::vector<std::pair<long long, int>> keys;
    for (int idx = 0; idx < cell_count(); ++idx) {
        const auto [ix, iy] = cells_[static_cast<size_t>(idx)];
        const double x0 = origin_.x + ix * h_;
        const double y0 = origin_.y + iy * h_;
        if (cell_at(ix - 1, iy) < 0) {
            boundary_edges_.push_back({idx, Vec2{x0, y0 + 0.5 * h_}, Vec2{1.0, 0.0}});
        }
        if (transverse && cell_at(ix, iy - 1) < 0) {
            boundary_edges_.push_back({idx, Vec2{x0 + 0.5 * h_, y0}, Vec2{0.0, 1.0}});
        }
        const int right = cell_at(ix + 1, iy);
        if (right >= 0) {
            keys.push_back({pair_key(idx, right, cell_count()),
                            static_cast<int>(interior_edges_.size())});
            interior_edges_.push_back(
                {idx, right, Vec2{x0 + h_, y0 + 0.5 * h_}, Vec2{1.0, 0.0}});
        } else {
            boundary_edges_.push_back({idx, Vec2{x0 + h_, y0 + 0.5 * h_}, Vec2{-1.0, 0.0}});
        }
        const int up = transverse ? cell_at(ix, iy + 1) : -1;
        if (up >= 0) {
            keys.push_back({pair_key(idx, up, cell_count()),
                            static_cast<int>(interior_edges_.size())});
            interior_edges_.push_back(
                {idx, up, Vec2{x0 + 0.5 * h_, y0 + h_}, Vec2{0.0, 1.0}});
        } else if (transverse) {
            boundary_edges_.push_back({idx, Vec2{x0 + 0.5 * h_, y0 + h_}, Vec2{0.0, -1.0}});
        }
    }
    std::sort(keys.begin(), keys.end());
    edge_key_.reserve(keys.size());
    edge_key_idx_.reserve(keys.size());
    for (const auto& [key, idx] : keys) {
        edge_key_.push_back(key);
        edge_key_idx_.push_back(idx);
    }
}

void GridDomain::require_connected() const {
    std::vector<char> seen(cells_.size(), 0);
    std::queue<int> queue;
    queue.push(0);
    seen[0] = 1;
    size_t reached = 1;
    while (!queue.empty()) {
        const int idx = queue.front();
        queue.pop();
        const auto [ix, iy] = cells_[static_cast<size_t>(idx)];
        const int nbrs[4] = {cell_at(ix - 1, iy), cell_at(ix + 1, iy), cell_at(ix, iy - 1),
                             cell_at(ix, iy + 1)};
        for (int nbr : nbrs) {
            if (nbr >= 0 && !seen[static_cast<size_t>(nbr)]) {
                seen[static_cast<size_t>(nbr)] = 1;
                ++reached;
                queue.push(nbr);
            }
        }
    }
    if (reached != cells_.size()) {
        throw Error(ErrCode::invalid_input, "grid mask is not 4-connected");
    }
}

double GridDomain::cell_weight() const { return dim_ == 2 ? h_ * h_ : h_; }

double GridDomain::edge_weight() const { return dim_ == 2 ? h_ : 1.0; }

Vec2 GridDomain::cell_center(int idx) const {
    const auto [ix, iy] = cells_[static_cast<size_t>(idx)];
    return origin_ + Vec2{(ix + 0.5) * h_, (iy + 0.5) * h_};
}

int GridDomain::cell_at(int ix, int iy) const {
    if (ix < 0 || iy < 0 || ix >= nx_ || iy >= ny_) return -1;
    return cell_of_[static_cast<size_t>(iy) * nx_ + ix];
}

int GridDomain::interior_edge_between(int cell_a, int cell_b) const {
    if (cell_a < 0 || cell_b < 0) return -1;
    const long long key = pair_key(cell_a, cell_b, cell_count());
    const auto it = std::lower_bound(edge_key_.begin(), edge_key_.end(), key);
    if (it == edge_key_.end() || *it != key) return -1;
    return edge_key_idx_[static_cast<size_t>(it - edge_key_.begin())];
}

GridFunction make_grid_function(const GridDomain& dom,
                                const std::function<double(const Vec2&)>& interior,
                                const std::function<double(const Vec2&)>& boundary) {
    GridFunction w;
    w.values.reserve(static_cast<size_t>(dom.cell_count()));
    for (int i = 0; i < dom.cell_count(); ++i) {
        w.values.push_back(interior(dom.cell_center(i)));
    }
    w.datum = sample_datum(dom, boundary);
    return w;
}

std::vector<double> sample_datum(const GridDomain& dom,
                                 const std::function<double(const Vec2&)>& boundary) {
    std::vector<double> datum;
    datum.reserve(dom.boundary_edges().size());
    for (const auto& edge : dom.boundary_edges()) {
        datum.push_back(boundary(edge.mid));
    }
    return datum;
}

void DiscreteMeasure::validate(const GridDomain& dom) const {
    if (cell_density.size() != static_cast<size_t>(dom.cell_count())) {
        throw Error(ErrCode::invalid_input, "cell density size does not match the grid");
    }
    for (double rho : cell_density) {
        if (!finite(rho)) {
            throw Error(ErrCode::invalid_input, "cell density must be finite");
        }
    }
    for (const auto& atom : atoms) {
        if (atom.edge < 0 || atom.edge >= static_cast<int>(dom.interior_edges().size())) {
            throw Error(ErrCode::invalid_input, "atom edge index out of range");
        }
        if (!finite(atom.m_plus) || !finite(atom.m_minus) || atom.m_plus < 0.0 ||
            atom.m_minus < 0.0) {
            throw Error(ErrCode::invalid_input, "atom masses must be finite and nonnegative");
        }
        if (mutually_singular &&
            std::min(atom.m_plus, atom.m_minus) > 1e-12 * (atom.m_plus + atom.m_minus)) {
            throw Error(ErrCode::invalid_input,
                        "mutually singular measure has an atom with both masses positive");
        }
    }
}

double DiscreteMeasure::total_variation(const GridDomain& dom) const {
    double total = 0.0;
    for (double rho : cell_density) total += dom.cell_weight() * std::abs(rho);
    for (const auto& atom : atoms) total += atom.m_plus + atom.m_minus;
    return total;
}

namespace {

void check_sizes(const GridFunction& w, const GridDomain& dom) {
    if (w.values.size() != static_cast<size_t>(dom.cell_count()) ||
        w.datum.size() != dom.boundary_edges().size()) {
        throw Error(ErrCode::invalid_input, "grid function sizes do not match the domain");
    }
    for (double v : w.values) {
        if (!finite(v)) throw Error(ErrCode::invalid_input, "grid function value not finite");
    }
    for (double v : w.datum) {
        if (!finite(v)) throw Error(ErrCode::invalid_input, "boundary datum not finite");
    }
}

}  // namespace

double tv_phi(const GridFunction& w, const GridDomain& dom, const Integrand& phi) {
    check_sizes(w, dom);
    const double we = dom.edge_weight();
    double total = 0.0;
    for (const auto& e : dom.interior_edges()) {
        const double t = w.values[static_cast<size_t>(e.j)] - w.values[static_cast<size_t>(e.i)];
        if (t > 0.0) {
            total += we * t * phi.eval(e.mid, e.dir);
        } else if (t < 0.0) {
            total += we * (-t) * phi.eval(e.mid, -e.dir);
        }
    }
    for (size_t b = 0; b < dom.boundary_edges().size(); ++b) {
        const auto& e = dom.boundary_edges()[b];
        const double t = w.values[static_cast<size_t>(e.cell)] - w.datum[b];
        if (t > 0.0) {
            total += we * t * phi.eval(e.mid, e.nu_in);
        } else if (t < 0.0) {
            total += we * (-t) * phi.eval(e.mid, -e.nu_in);
        }
    }
    return total;
}

double measure_pairing(const GridFunction& w, const GridDomain& dom,
                       const DiscreteMeasure& mu, PairingMode mode) {
    check_sizes(w, dom);
    mu.validate(dom);
    double total = 0.0;
    for (int i = 0; i < dom.cell_count(); ++i) {
        total += dom.cell_weight() * mu.cell_density[static_cast<size_t>(i)] *
                 w.values[static_cast<size_t>(i)];
    }
    for (const auto& atom : mu.atoms) {
        const auto& e = dom.interior_edges()[static_cast<size_t>(atom.edge)];
        const double wi = w.values[static_cast<size_t>(e.i)];
        const double wj = w.values[static_cast<size_t>(e.j)];
        if (mode == PairingMode::lower_vs_upper) {
            total += atom.m_plus * std::min(wi, wj) - atom.m_minus * std::max(wi, wj);
        } else {
            total += (atom.m_plus - atom.m_minus) * 0.5 * (wi + wj);
        }
    }
    return total;
}

double phi_value(const GridFunction& w, const GridDomain& dom, const Integrand& phi,
                 const DiscreteMeasure& mu) {
    return tv_phi(w, dom, phi) + measure_pairing(w, dom, mu, PairingMode::average);
}

double phi_hat_value(const GridFunction& w, const GridDomain& dom, const Integrand& phi,
                     const DiscreteMeasure& mu) {
    return tv_phi(w, dom, phi) + measure_pairing(w, dom, mu, PairingMode::lower_vs_upper);
}

GridFunction truncate(const GridFunction& w, double M) {
    if (!(M > 0.0)) throw Error(ErrCode::invalid_input, "truncation level must be positive");
    GridFunction out = w;
    for (double& v : out.values) v = std::clamp(v, -M, M);
    for (double& v : out.datum) v = std::clamp(v, -M, M);
    return out;
}

double coarea_tv(const GridFunction& w, const GridDomain& dom, const Integrand& phi) {
    check_sizes(w, dom);
    std::vector<double> levels = w.values;
    levels.insert(levels.end(), w.datum.begin(), w.datum.end());
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    if (levels.size() < 2) return 0.0;
    const double we = dom.edge_weight();
    double total = 0.0;
    for (size_t m = 0; m + 1 < levels.size(); ++m) {
        const double t = 0.5 * (levels[m] + levels[m + 1]);
        const double width = levels[m + 1] - levels[m];
        double per = 0.0;
        for (const auto& e : dom.interior_edges()) {
            const bool in_i = w.values[static_cast<size_t>(e.i)] > t;
            const bool in_j = w.values[static_cast<size_t>(e.j)] > t;
            if (in_i != in_j) {
                per += we * phi.eval(e.mid, in_i ? -e.dir : e.dir);
            }
        }
        for (size_t b = 0; b < dom.boundary_edges().size(); ++b) {
            const auto& e = dom.boundary_edges()[b];
            const bool in_c = w.values[static_cast<size_t>(e.cell)] > t;
            const bool in_d = w.datum[b] > t;
            if (in_c != in_d) {
                per += we * phi.eval(e.mid, in_c ? e.nu_in : -e.nu_in);
            }
        }
        total += width * per;
    }
    return total;
}

double pixel_set_perimeter(const std::vector<char>& in_set, const GridDomain& dom,
                           const Integrand& phi) {
    if (in_set.size() != static_cast<size_t>(dom.cell_count())) {
        throw Error(ErrCode::invalid_input, "pixel set size does not match the grid");
    }
    const double we = dom.edge_weight();
    double per = 0.0;
    for (const auto& e : dom.interior_edges()) {
        const bool in_i = in_set[static_cast<size_t>(e.i)] != 0;
        const bool in_j = in_set[static_cast<size_t>(e.j)] != 0;
        if (in_i != in_j) {
            per += we * phi.eval(e.mid, in_i ? -e.dir : e.dir);
        }
    }
    for (const auto& e : dom.boundary_edges()) {
        if (in_set[static_cast<size_t>(e.cell)] != 0) {
            per += we * phi.eval(e.mid, e.nu_in);
        }
    }
    return per;
}

double mask_circumradius(const GridDomain& dom, unsigned long long seed) {
    std::vector<long long> corner_keys;
    corner_keys.reserve(static_cast<size_t>(dom.cell_count()) * 4);
    const long long stride = dom.nx() + 1;
    for (int i = 0; i < dom.cell_count(); ++i) {
        const auto [ix, iy] = dom.cell_coords(i);
        corner_keys.push_back(static_cast<long long>(iy) * stride + ix);
        corner_keys.push_back(static_cast<long long>(iy) * stride + ix + 1);
        corner_keys.push_back(static_cast<long long>(iy + 1) * stride + ix);
        corner_keys.push_back(static_cast<long long>(iy + 1) * stride + ix + 1);
    }
    std::sort(corner_keys.begin(), corner_keys.end());
    corner_keys.erase(std::unique(corner_keys.begin(), corner_keys.end()), corner_keys.end());
    std::vector<Vec2> pts;
    pts.reserve(corner_keys.size());
    for (long long key : corner_keys) {
        const long long iy = key / stride;
        const long long ix = key % stride;
        pts.push_back(dom.origin() + Vec2{static_cast<double>(ix) * dom.h(),
                                          static_cast<double>(iy) * dom.h()});
    }
    Rng rng(seed);
    for (size_t i = pts.size(); i > 1; --i) {
        std::swap(pts[i - 1], pts[rng.next_below(i)]);
    }
    Circle best{pts[0], 0.0};
    for (size_t i = 1; i < pts.size(); ++i) {
        if (circle_contains(best, pts[i])) continue;
        best = Circle{pts[i], 0.0};
        for (size_t j = 0; j < i; ++j) {
            if (circle_contains(best, pts[j])) continue;
            best = circle_two(pts[i], pts[j]);
            for (size_t k = 0; k < j; ++k) {
                if (circle_contains(best, pts[k])) continue;
                best = circle_three(pts[i], pts[j], pts[k]);
            }
        }
    }
    return best.r;
}

namespace {

// Accumulates signed curve mass into per-edge plus/minus slots in edge order.
class AtomAccumulator {
  public:
    explicit AtomAccumulator(const GridDomain& dom) : dom_(dom) {}

    void deposit(int edge, double mass, bool plus_list) {
        if (edge < 0) {
            throw Error(ErrCode::invalid_input,
                        "no interior edge available to carry a rasterized atom");
        }
        if (mass == 0.0) return;
        const bool plus = plus_list == (mass > 0.0);
        auto& slot = acc_[edge];
        (plus ? slot.first : slot.second) += std::abs(mass);
    }

    int nearest_interior_edge(const Vec2& p) const {
        int best = -1;
        double best_d = 0.0;
        for (size_t e = 0; e < dom_.interior_edges().size(); ++e) {
            const Vec2 diff = dom_.interior_edges()[e].mid - p;
            const double d = dot(diff, diff);
            if (best < 0 || d < best_d) {
                best = static_cast<int>(e);
                best_d = d;
            }
        }
        return best;
    }

    DiscreteMeasure finish() const {
        DiscreteMeasure mu;
        mu.cell_density.assign(static_cast<size_t>(dom_.cell_count()), 0.0);
        bool singular = true;
        for (const auto& [edge, masses] : acc_) {
            mu.atoms.push_back({edge, masses.first, masses.second});
            if (std::min(masses.first, masses.second) > 0.0) singular = false;
        }
        mu.mutually_singular = singular;
        return mu;
    }

  private:
    const GridDomain& dom_;
    std::map<int, std::pair<double, double>> acc_;
};

double norm_sq_local(const Vec2& v) { return v.x * v.x + v.y * v.y; }

// Splits [lo, hi] at the lattice lines origin + k*h and appends interior
// breakpoints to out.
void lattice_breaks(double lo, double hi, double origin, double h, std::vector<double>* out) {
    const long long k0 = static_cast<long long>(std::ceil((lo - origin) / h - 1e-12));
    const long long k1 = static_cast<long long>(std::floor((hi - origin) / h + 1e-12));
    for (long long k = k0; k <= k1; ++k) {
        const double v = origin + static_cast<double>(k) * h;
        if (v > lo + 1e-12 && v < hi - 1e-12) out->push_back(v);
    }
}

void rasterize_circle(const CurveMeasure& curve, const GridDomain& dom, bool plus_list,
                      AtomAccumulator* acc) {
    const Vec2 c = curve.center();
    const double r = curve.radius();
    std::vector<char> inside(static_cast<size_t>(dom.cell_count()), 0);
    for (int i = 0; i < dom.cell_count(); ++i) {
        inside[static_cast<size_t>(i)] = norm(dom.cell_center(i) - c) < r ? 1 : 0;
    }
    std::vector<int> candidates;
    for (size_t e = 0; e < dom.interior_edges().size(); ++e) {
        const auto& edge = dom.interior_edges()[e];
        if (inside[static_cast<size_t>(edge.i)] != inside[static_cast<size_t>(edge.j)]) {
            candidates.push_back(static_cast<int>(e));
        }
    }
    std::vector<double> angles;
    auto add_angle = [&angles](double t) {
        t = std::fmod(t, 2.0 * kPi);
        if (t < 0.0) t += 2.0 * kPi;
        angles.push_back(t);
    };
    std::vector<double> vertical;
    lattice_breaks(c.x - r, c.x + r, dom.origin().x, dom.h(), &vertical);
    for (double line : vertical) {
        const double d = std::clamp((line - c.x) / r, -1.0, 1.0);
        const double t = std::acos(d);
        add_angle(t);
        add_angle(-t);
    }
    std::vector<double> horizontal;
    lattice_breaks(c.y - r, c.y + r, dom.origin().y, dom.h(), &horizontal);
    for (double line : horizontal) {
        const double d = std::clamp((line - c.y) / r, -1.0, 1.0);
        const double t = std::asin(d);
        add_angle(t);
        add_angle(kPi - t);
    }
    std::sort(angles.begin(), angles.end());
    angles.erase(std::unique(angles.begin(), angles.end(),
                             [](double a, double b) { return std::abs(a - b) <= 1e-12; }),
                 angles.end());
    if (angles.size() > 1 && angles.back() - angles.front() >= 2.0 * kPi - 1e-12) {
        angles.pop_back();
    }
    std::vector<std::pair<double, double>> arcs;
    if (angles.empty()) {
        arcs.push_back({0.0, 2.0 * kPi});
    } else {
        for (size_t k = 0; k + 1 < angles.size(); ++k) {
            arcs.push_back({angles[k], angles[k + 1]});
        }
        arcs.push_back({angles.back(), angles.front() + 2.0 * kPi});
    }
    for (const auto& [t0, t1] : arcs) {
        if (t1 - t0 <= 1e-14) continue;
        const double tm = 0.5 * (t0 + t1);
        const Vec2 p = c + Vec2{r * std::cos(tm), r * std::sin(tm)};
        const double mass = curve.density() * r * (t1 - t0);
        int best = -1;
        double best_d = 0.0;
        for (int e : candidates) {
            const double d = norm_sq_local(dom.interior_edges()[static_cast<size_t>(e)].mid - p);
            if (best < 0 || d < best_d) {
                best = e;
                best_d = d;
            }
        }
        if (best < 0) best = acc->nearest_interior_edge(p);
        acc->deposit(best, mass, plus_list);
    }
}

// Interior edges incident to a cell, in deterministic neighbor order.
void incident_edges(const GridDomain& dom, int cell, std::vector<int>* out) {
    out->clear();
    if (cell < 0) return;
    const auto [ix, iy] = dom.cell_coords(cell);
    const int nbrs[4] = {dom.cell_at(ix - 1, iy), dom.cell_at(ix + 1, iy),
                         dom.cell_at(ix, iy - 1), dom.cell_at(ix, iy + 1)};
    for (int nbr : nbrs) {
        const int e = dom.interior_edge_between(cell, nbr);
        if (e >= 0) out->push_back(e);
    }
}

void deposit_near_cell(const Vec2& p, double mass, bool plus_list, const GridDomain& dom,
                       AtomAccumulator* acc) {
    const int ix = static_cast<int>(std::floor((p.x - dom.origin().x) / dom.h()));
    const int iy = static_cast<int>(std::floor((p.y - dom.origin().y) / dom.h()));
    std::vector<int> local;
    incident_edges(dom, dom.cell_at(ix, iy), &local);
    int best = -1;
    double best_d = 0.0;
    for (int e : local) {
        const double d = norm_sq_local(dom.interior_edges()[static_cast<size_t>(e)].mid - p);
        if (best < 0 || d < best_d) {
            best = e;
            best_d = d;
        }
    }
    if (best < 0) best = acc->nearest_interior_edge(p);
    acc->deposit(best, mass, plus_list);
}

// Chain piece lying on the lattice line of the given axis (0 = vertical line
// x = const, splitting along y; 1 = horizontal line y = const).
void rasterize_on_line(const Vec2& a, const Vec2& b, double density, int axis, long long line_k,
                       const GridDomain& dom, bool plus_list, AtomAccumulator* acc) {
    const double lo = axis == 0 ? std::min(a.y, b.y) : std::min(a.x, b.x);
    const double hi = axis == 0 ? std::max(a.y, b.y) : std::max(a.x, b.x);
    std::vector<double> cuts{lo, hi};
    lattice_breaks(lo, hi, axis == 0 ? dom.origin().y : dom.origin().x, dom.h(), &cuts);
    std::sort(cuts.begin(), cuts.end());
    for (size_t s = 0; s + 1 < cuts.size(); ++s) {
        const double len = cuts[s + 1] - cuts[s];
        if (len <= 1e-14) continue;
        const double m = 0.5 * (cuts[s] + cuts[s + 1]);
        const int k = static_cast<int>(line_k);
        const int jm = static_cast<int>(
            std::floor((m - (axis == 0 ? dom.origin().y : dom.origin().x)) / dom.h()));
        const int ca = axis == 0 ? dom.cell_at(k - 1, jm) : dom.cell_at(jm, k - 1);
        const int cb = axis == 0 ? dom.cell_at(k, jm) : dom.cell_at(jm, k);
        const int edge = dom.interior_edge_between(ca, cb);
        const double mass = density * len;
        if (edge >= 0) {
            acc->deposit(edge, mass, plus_list);
        } else {
            const Vec2 p = axis == 0
                               ? Vec2{dom.origin().x + static_cast<double>(line_k) * dom.h(), m}
                               : Vec2{m, dom.origin().y + static_cast<double>(line_k) * dom.h()};
            acc->deposit(acc->nearest_interior_edge(p), mass, plus_list);
        }
    }
}

void rasterize_chain_piece(const Vec2& a, const Vec2& b, double density, const GridDomain& dom,
                           bool plus_list, AtomAccumulator* acc) {
    const Vec2 d = b - a;
    const double len = norm(d);
    if (len <= 1e-14) return;
    const double kx = (a.x - dom.origin().x) / dom.h();
    const double ky = (a.y - dom.origin().y) / dom.h();
    if (std::abs(d.x) <= 1e-12 && std::abs(kx - std::round(kx)) <= 1e-9) {
        rasterize_on_line(a, b, density, 0, static_cast<long long>(std::round(kx)), dom,
                          plus_list, acc);
        return;
    }
    if (std::abs(d.y) <= 1e-12 && std::abs(ky - std::round(ky)) <= 1e-9) {
        rasterize_on_line(a, b, density, 1, static_cast<long long>(std::round(ky)), dom,
                          plus_list, acc);
        return;
    }
    std::vector<double> ts{0.0, 1.0};
    if (std::abs(d.x) > 1e-14) {
        std::vector<double> cuts;
        lattice_breaks(std::min(a.x, b.x), std::max(a.x, b.x), dom.origin().x, dom.h(), &cuts);
        for (double v : cuts) ts.push_back((v - a.x) / d.x);
    }
    if (std::abs(d.y) > 1e-14) {
        std::vector<double> cuts;
        lattice_breaks(std::min(a.y, b.y), std::max(a.y, b.y), dom.origin().y, dom.h(), &cuts);
        for (double v : cuts) ts.push_back((v - a.y) / d.y);
    }
    std::sort(ts.begin(), ts.end());
    for (size_t s = 0; s + 1 < ts.size(); ++s) {
        const double dt = ts[s + 1] - ts[s];
        if (dt <= 1e-14) continue;
        const Vec2 p = a + d * (0.5 * (ts[s] + ts[s + 1]));
        deposit_near_cell(p, density * len * dt, plus_list, dom, acc);
    }
}

void rasterize_curve(const CurveMeasure& curve, const GridDomain& dom, bool plus_list,
                     AtomAccumulator* acc) {
    switch (curve.kind()) {
        case CurveKind::circle:
            rasterize_circle(curve, dom, plus_list, acc);
            return;
        case CurveKind::segment:
        case CurveKind::polyline: {
            const auto& pts = curve.points();
            for (size_t k = 0; k + 1 < pts.size(); ++k) {
                rasterize_chain_piece(pts[k], pts[k + 1], curve.density(), dom, plus_list, acc);
            }
            return;
        }
        case CurveKind::fractal_lumps:
            for (const auto& lump : curve.lumps()) {
                deposit_near_cell(lump.support.centroid(), lump.mass, plus_list, dom, acc);
            }
            return;
    }
    throw Error(ErrCode::invalid_input, "unsupported curve kind in rasterize");
}

}  // namespace

DiscreteMeasure rasterize(const std::vector<CurveMeasure>& plus,
                          const std::vector<CurveMeasure>& minus, const GridDomain& dom) {
    if (dom.interior_edges().empty() && !(plus.empty() && minus.empty())) {
        throw Error(ErrCode::invalid_input, "grid has no interior edge to carry atoms");
    }
    AtomAccumulator acc(dom);
    for (const auto& curve : plus) rasterize_curve(curve, dom, true, &acc);
    for (const auto& curve : minus) rasterize_curve(curve, dom, false, &acc);
    return acc.finish();
}

}  // namespace anisotv
