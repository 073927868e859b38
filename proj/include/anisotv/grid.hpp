#ifndef ANISOTV_GRID_HPP
#define ANISOTV_GRID_HPP

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "anisotv/core.hpp"
#include "anisotv/integrand.hpp"
#include "anisotv/measures.hpp"
#include "anisotv/shapes.hpp"

namespace anisotv {

// Face shared by active cells i and j; dir is the unit vector from the
// center of cell i to the center of cell j, mid the face midpoint.
struct InteriorEdge {
    int i = -1;
    int j = -1;
    Vec2 mid;
    Vec2 dir;
};

// Face between an active cell and the complement; nu_in is the unit normal
// pointing from the face into the cell (the inward normal of the domain).
struct BoundaryEdge {
    int cell = -1;
    Vec2 mid;
    Vec2 nu_in;
};

// Axis-aligned masked pixel grid. The active set must be nonempty and
// 4-connected. Cells are indexed row-major over the active subset; the edge
// lists are built in a fixed deterministic order.
class GridDomain {
  public:
    static GridDomain rect(int nx, int ny, double h, const Vec2& origin);
    static GridDomain from_bitmap(const std::vector<std::string>& rows, double h,
                                  const Vec2& origin);
    // Activates cells whose center lies strictly inside the shape.
    static GridDomain from_shape(const Shape& shape, double h, const Vec2& origin,
                                 int nx, int ny);
    // 1-d chain of n cells; edge weight h^0 = 1, cell weight h.
    static GridDomain line(int n, double h, double origin_x);

    int dim() const { return dim_; }
    double h() const { return h_; }
    const Vec2& origin() const { return origin_; }
    int nx() const { return nx_; }
    int ny() const { return ny_; }
    int cell_count() const { return static_cast<int>(cells_.size()); }
    double cell_weight() const;  // h^dim
    double edge_weight() const;  // h^(dim-1)

    Vec2 cell_center(int idx) const;
    std::pair<int, int> cell_coords(int idx) const { return cells_[idx]; }
    // Cell index at lattice coordinates, -1 when absent or out of range.
    int cell_at(int ix, int iy) const;
    // Interior edge index between adjacent active cells, -1 when absent.
    int interior_edge_between(int cell_a, int cell_b) const;

    const std::vector<InteriorEdge>& interior_edges() const { return interior_edges_; }
    const std::vector<BoundaryEdge>& boundary_edges() const { return boundary_edges_; }

  private:
    GridDomain() = default;
    void build_edges();
    void require_connected() const;

    double h_ = 1.0;
    int dim_ = 2;
    Vec2 origin_;
    int nx_ = 0;
    int ny_ = 0;
    std::vector<int> cell_of_;                  // nx*ny lattice -> cell index or -1
    std::vector<std::pair<int, int>> cells_;    // cell index -> (ix, iy)
    std::vector<InteriorEdge> interior_edges_;
    std::vector<BoundaryEdge> boundary_edges_;
    std::vector<long long> edge_key_;           // sorted keys for interior edge lookup
    std::vector<int> edge_key_idx_;
};

// Cell values plus the boundary trace sampled per boundary edge.
struct GridFunction {
    std::vector<double> values;
    std::vector<double> datum;
};

GridFunction make_grid_function(const GridDomain& dom,
                                const std::function<double(const Vec2&)>& interior,
                                const std::function<double(const Vec2&)>& boundary);

std::vector<double> sample_datum(const GridDomain& dom,
                                 const std::function<double(const Vec2&)>& boundary);

// Atom sitting on an interior edge, split into nonnegative parts.
struct EdgeAtom {
    int edge = -1;
    double m_plus = 0.0;
    double m_minus = 0.0;
};

// Signed measure on the grid: absolutely continuous part as a per-cell
// density (mass h^dim * density) plus edge atoms.
struct DiscreteMeasure {
    std::vector<double> cell_density;
    std::vector<EdgeAtom> atoms;
    bool mutually_singular = false;

    void validate(const GridDomain& dom) const;
    double total_variation(const GridDomain& dom) const;
};

// Anisotropic total variation with boundary penalization. Interior faces pay
// h^(dim-1)*[(w_j-w_i)+ phi(mid,dir) + (w_i-w_j)+ phi(mid,-dir)]; boundary
// faces pay h^(dim-1)*[(w-u0)+ phi(mid,nu_in) + (u0-w)+ phi(mid,-nu_in)], so
// that every level set is charged its perimeter with inward normals.
double tv_phi(const GridFunction& w, const GridDomain& dom, const Integrand& phi);

enum class PairingMode {
    lower_vs_upper,  // mass_plus*min(w_i,w_j) - mass_minus*max(w_i,w_j)
    average,         // (mass_plus-mass_minus)*(w_i+w_j)/2
};

double measure_pairing(const GridFunction& w, const GridDomain& dom,
                       const DiscreteMeasure& mu, PairingMode mode);

// Convex functional: tv + average pairing.
double phi_value(const GridFunction& w, const GridDomain& dom, const Integrand& phi,
                 const DiscreteMeasure& mu);
// Lower-semicontinuous relaxation shape: tv + lower-vs-upper pairing.
double phi_hat_value(const GridFunction& w, const GridDomain& dom, const Integrand& phi,
                     const DiscreteMeasure& mu);

// Clamps values and datum to [-M, M].
GridFunction truncate(const GridFunction& w, double M);

// Layer-cake evaluation of tv_phi: exact finite sum of level-set perimeters
// over the gaps between sorted distinct values of w and datum.
double coarea_tv(const GridFunction& w, const GridDomain& dom, const Integrand& phi);

// Anisotropic perimeter of a union of active cells, viewed as a subset of the
// plane (domain-boundary faces of flagged cells are counted).
double pixel_set_perimeter(const std::vector<char>& in_set, const GridDomain& dom,
                           const Integrand& phi);

// Radius of the smallest circle enclosing every corner of every active cell.
double mask_circumradius(const GridDomain& dom, unsigned long long seed = 0x9e3779b97f4a7c15ull);

// Snaps curve measures onto interior edges, preserving total mass per curve.
// Circles are split at grid lines and each sub-arc goes to the nearest face
// of the pixel set {cells with center inside the disc}; segments lying on a
// grid line map directly onto the overlapped faces; other segments and lumps
// go to the nearest interior face of the containing cell.
DiscreteMeasure rasterize(const std::vector<CurveMeasure>& plus,
                          const std::vector<CurveMeasure>& minus,
                          const GridDomain& dom);

}  // namespace anisotv

#endif
