// Acceptance gate: every release criterion in one binary, one line per
// criterion. Exits nonzero when any criterion fails; the line reports the
// computed values so a failure is diagnosable from the log alone.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "anisotv/certificates.hpp"
#include "anisotv/core.hpp"
#include "anisotv/gallery.hpp"
#include "anisotv/grid.hpp"
#include "anisotv/icheck.hpp"
#include "anisotv/integrand.hpp"
#include "anisotv/measures.hpp"
#include "anisotv/shapes.hpp"
#include "anisotv/solve.hpp"

namespace {

using namespace anisotv;

double now_seconds() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

Vec2 random_direction(Rng& rng) {
    const double t = rng.uniform(0.0, 2.0 * kPi);
    return {std::cos(t), std::sin(t)};
}

std::vector<std::string> random_bitmap(Rng& rng, int nx, int ny, int target) {
    std::vector<std::string> rows(static_cast<size_t>(ny), std::string(static_cast<size_t>(nx), '.'));
    std::vector<std::pair<int, int>> active;
    const int sx = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(nx)));
    const int sy = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(ny)));
    rows[static_cast<size_t>(sy)][static_cast<size_t>(sx)] = '#';
    active.push_back({sx, sy});
    const int dx[4] = {1, -1, 0, 0};
    const int dy[4] = {0, 0, 1, -1};
    for (int grow = 1; grow < target; ++grow) {
        for (int tries = 0; tries < 64; ++tries) {
            const auto [cx, cy] = active[rng.next_below(active.size())];
            const int d = static_cast<int>(rng.next_below(4));
            const int px = cx + dx[d];
            const int py = cy + dy[d];
            if (px < 0 || py < 0 || px >= nx || py >= ny) continue;
            if (rows[static_cast<size_t>(py)][static_cast<size_t>(px)] == '#') continue;
            rows[static_cast<size_t>(py)][static_cast<size_t>(px)] = '#';
            active.push_back({px, py});
            break;
        }
    }
    return rows;
}

GridDomain random_domain(Rng& rng) {
    const double hs[3] = {0.25, 0.5, 1.0};
    const double h = hs[rng.next_below(3)];
    const int nx = 2 + static_cast<int>(rng.next_below(5));
    const int ny = 2 + static_cast<int>(rng.next_below(5));
    const int target = 2 + static_cast<int>(rng.next_below(
                               static_cast<std::uint64_t>(nx * ny - 1)));
    return GridDomain::from_bitmap(random_bitmap(rng, nx, ny, target), h,
                                   {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)});
}

GridFunction random_function(Rng& rng, const GridDomain& dom, bool lattice, bool zero_datum) {
    GridFunction w;
    w.values.resize(static_cast<size_t>(dom.cell_count()));
    for (double& v : w.values) {
        v = lattice ? 0.25 * static_cast<double>(static_cast<int>(rng.next_below(17)) - 8)
                    : rng.uniform(-2.0, 2.0);
    }
    w.datum.resize(dom.boundary_edges().size());
    for (double& d : w.datum) {
        d = zero_datum ? 0.0 : rng.uniform(-2.0, 2.0);
    }
    return w;
}

const Integrand& catalog_phi(int k) {
    static const Integrand phis[3] = {Integrand::isotropic(), Integrand::quadrant(),
                                      Integrand::weighted_l1(0.8, 1.4)};
    return phis[k % 3];
}

bool criterion_exact_perimeters(std::string& detail) {
    const Shape tri = Shape::unit_triangle();
    const Integrand quad = Integrand::quadrant();
    const Integrand mirror = quad.mirrored();
    (void)aniso_perimeter(tri, quad);  // warm up before timing
    const double t0 = now_seconds();
    const double p = aniso_perimeter(tri, quad);
    const double pm = aniso_perimeter(tri, mirror);
    const double elapsed = now_seconds() - t0;
    const bool ok = std::abs(p - 4.0) <= 1e-12 &&
                    std::abs(pm - (2.0 + std::sqrt(2.0))) <= 1e-12 && elapsed < 1e-3;
    std::ostringstream os;
    os << "P=" << fmt(p) << " (target 4, tol 1e-12), reflected P=" << fmt(pm)
       << " (target 2+sqrt2), " << fmt(elapsed * 1e3) << " ms";
    detail = os.str();
    return ok;
}

bool criterion_fractal_chain(std::string& detail) {
    const double t0 = now_seconds();
    const Integrand mirror = Integrand::quadrant().mirrored();
    const std::vector<CurveMeasure> mu = {CurveMeasure::fractal_level(6)};
    bool mass_ok = true;
    bool per_ok = true;
    int area_fail = 0;
    double worst_area_gap = 0.0;
    for (int k = 0; k <= 6; ++k) {
        const Shape it = Shape::fractal_iterate(k);
        if (std::abs(measure_of(mu, it, Side::closure) - 4.0) > 1e-9) mass_ok = false;
        if (std::abs(aniso_perimeter(it, mirror) - (2.0 + std::sqrt(2.0))) > 1e-9) per_ok = false;
        const double gap = std::abs(it.area() - 0.5 * std::pow(4.0, -k));
        if (gap > 1e-12) {
            ++area_fail;
            worst_area_gap = std::max(worst_area_gap, gap);
        }
    }
    const double elapsed = now_seconds() - t0;
    const bool ok = mass_ok && per_ok && area_fail == 0 && elapsed < 1.0;
    std::ostringstream os;
    os << "mass==4 " << (mass_ok ? "ok" : "FAIL") << ", reflected perimeter==2+sqrt2 "
       << (per_ok ? "ok" : "FAIL") << ", area==4^-k/2 fails at " << area_fail
       << " of 7 levels (worst gap " << fmt(worst_area_gap)
       << "; the three-map iterates have area 3^-k/2), " << fmt(elapsed) << " s";
    detail = os.str();
    return ok;
}

bool criterion_certificates(std::string& detail) {
    const double t0 = now_seconds();
    struct Case {
        std::string tag;
        CertificateReport rep;
        size_t shapes;
    };
    std::vector<Case> cases;
    {
        const double theta = 1.0;
        const auto shapes = signed_balance_test_shapes();
        cases.push_back({"radial", check_certificate(signed_balance_field(theta),
                                                     signed_balance_mu_plus(theta),
                                                     signed_balance_mu_minus(theta), shapes,
                                                     Integrand::isotropic()),
                         shapes.size()});
    }
    {
        const auto shapes = alternating_shell_test_shapes();
        cases.push_back({"shell", check_certificate(alternating_shell_field(),
                                                    alternating_shell_mu_plus(),
                                                    alternating_shell_mu_minus(), shapes,
                                                    Integrand::isotropic()),
                         shapes.size()});
    }
    for (int k = 1; k <= 4; ++k) {
        const auto shapes = fractal_test_shapes(k);
        cases.push_back({"refine-" + std::to_string(k),
                         check_certificate(build_fractal_certificate(k),
                                           triangle_boundary_measure(k), {}, shapes,
                                           Integrand::quadrant()),
                         shapes.size()});
    }
    bool ok = true;
    double worst_res = 0.0;
    double worst_polar = 0.0;
    for (const auto& c : cases) {
        worst_res = std::max(worst_res, c.rep.max_residual);
        worst_polar = std::max(worst_polar, c.rep.sup_polar);
        if (!c.rep.pass || c.rep.max_residual > 1e-6 || c.rep.sup_polar > 1.0 + 1e-9 ||
            c.shapes < 20) {
            ok = false;
        }
    }
    const double elapsed = now_seconds() - t0;
    ok = ok && elapsed < 30.0;
    std::ostringstream os;
    os << cases.size() << " fields, worst flux residual " << fmt(worst_res)
       << " (tol 1e-6), worst polar " << fmt(worst_polar) << " (bound 1+1e-9), "
       << fmt(elapsed) << " s";
    detail = os.str();
    return ok;
}

bool criterion_signed_dual(std::string& detail) {
    const double t0 = now_seconds();
    const double theta = 1.0;
    const Shape big = Shape::disc({0.0, 0.0}, 2.0);
    const double ratio = measure_of(signed_balance_mu_plus(theta), big, Side::closure) /
                         aniso_perimeter(big, Integrand::isotropic());
    const double h = 1.0 / 32.0;
    const GridDomain dom = GridDomain::rect(160, 160, h, {-2.5, -2.5});
    const DiscreteMeasure mu =
        rasterize({CurveMeasure::circle({0.0, 0.0}, 2.0, 1.0 + theta / 2.0)},
                  {CurveMeasure::circle({0.0, 0.0}, 1.0, theta)}, dom);
    DualNormOptions opts;
    opts.max_iters = 400000;
    opts.tol = 0.02;
    const DualNormReport rep = dual_norm(mu, dom, Integrand::isotropic(), opts);
    const double elapsed = now_seconds() - t0;
    const bool ok = rep.value <= 1.05 && std::abs(ratio - 1.5) <= 1e-9 && ratio > 1.0 &&
                    elapsed < 60.0;
    std::ostringstream os;
    os << "dual norm " << fmt(rep.value) << " (bound 1.05, witness " << fmt(rep.lower)
       << "), closed-disc mass over perimeter " << fmt(ratio) << " (target 1.5), "
       << fmt(elapsed) << " s";
    detail = os.str();
    return ok;
}

bool criterion_consistency_gap(std::string& detail) {
    const double t0 = now_seconds();
    SolveConfig cfg;
    cfg.max_iters = 200000;
    cfg.tol_primal_dual = 1e-4;
    std::vector<double> phis;
    double hat_finest = 0.0;
    for (const double h : {1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0}) {
        const ConsistencyGap gap = consistency_gap(h, cfg);
        phis.push_back(gap.inf_phi);
        hat_finest = gap.min_phi_hat;
    }
    double worst_increase = -1e300;
    for (size_t t = 0; t + 1 < phis.size(); ++t) {
        worst_increase = std::max(worst_increase,
                                  std::abs(phis[t + 1] - 4.0) - std::abs(phis[t] - 4.0));
    }
    const double elapsed = now_seconds() - t0;
    const bool ok = std::abs(phis.back() - 4.0) <= 0.4 && hat_finest >= -0.1 &&
                    hat_finest <= 0.4 && worst_increase <= 1e-9 && elapsed < 120.0;
    std::ostringstream os;
    os << "sharp-trace value " << fmt(phis.back()) << " (target 4 +- 0.4), relaxed value "
       << fmt(hat_finest) << " (range [-0.1, 0.4]), refinement distance increase "
       << fmt(worst_increase) << ", " << fmt(elapsed) << " s";
    detail = os.str();
    return ok;
}

bool criterion_failure_lsc(std::string& detail) {
    const double t0 = now_seconds();
    const ScenarioReport rep = run_scenario("failure-lsc");
    bool ok = rep.checks.size() == 6;
    double worst = 0.0;
    if (ok) {
        for (int i = 0; i < 5; ++i) {
            worst = std::max(worst, std::abs(rep.checks[static_cast<size_t>(i)].computed + 1.0));
        }
        worst = std::max(worst, std::abs(rep.checks[5].computed));
        ok = worst <= 1e-12;
    }
    const double elapsed = now_seconds() - t0;
    ok = ok && elapsed < 1.0;
    std::ostringstream os;
    os << "five scaled indicators at value -1 and the zero function at 0, worst residual "
       << fmt(worst) << " (tol 1e-12), " << fmt(elapsed) << " s";
    detail = os.str();
    return ok;
}

bool criterion_property_batteries(std::string& detail) {
    const int kCases = 1000;
    int suites_passed = 0;
    std::ostringstream os;

    // Coarea identity.
    {
        Rng rng(0xc0a3ea00aa110001ull);
        bool ok = true;
        for (int c = 0; c < kCases && ok; ++c) {
            const GridDomain dom = random_domain(rng);
            const Integrand& phi = catalog_phi(c);
            const GridFunction w = random_function(rng, dom, true, false);
            const double direct = tv_phi(w, dom, phi);
            ok = std::abs(coarea_tv(w, dom, phi) - direct) <= 1e-10 * (1.0 + std::abs(direct));
        }
        suites_passed += ok;
        os << "coarea " << (ok ? "ok" : "FAIL");
    }
    // Sign decomposition of the zero-datum functional.
    {
        Rng rng(0x51de0c0de0000002ull);
        bool ok = true;
        for (int c = 0; c < kCases && ok; ++c) {
            const GridDomain dom = random_domain(rng);
            const Integrand& phi = catalog_phi(c);
            const GridFunction w = random_function(rng, dom, false, true);
            GridFunction plus = w;
            GridFunction minus = w;
            for (size_t i = 0; i < w.values.size(); ++i) {
                plus.values[i] = pos_part(w.values[i]);
                minus.values[i] = -neg_part(w.values[i]);
            }
            const double total = tv_phi(w, dom, phi);
            ok = std::abs(tv_phi(plus, dom, phi) + tv_phi(minus, dom, phi) - total) <=
                 1e-9 * (1.0 + std::abs(total));
        }
        suites_passed += ok;
        os << ", sign split " << (ok ? "ok" : "FAIL");
    }
    // Truncation additivity: clamped part plus overshoot part.
    {
        Rng rng(0x7a0bc1ca00000003ull);
        bool ok = true;
        for (int c = 0; c < kCases && ok; ++c) {
            const GridDomain dom = random_domain(rng);
            const Integrand& phi = catalog_phi(c);
            const GridFunction w = random_function(rng, dom, false, false);
            const double M = rng.uniform(0.1, 1.8);
            const GridFunction t = truncate(w, M);
            GridFunction excess = w;
            for (size_t i = 0; i < w.values.size(); ++i) excess.values[i] -= t.values[i];
            for (size_t b = 0; b < w.datum.size(); ++b) excess.datum[b] -= t.datum[b];
            const double total = tv_phi(w, dom, phi);
            ok = std::abs(tv_phi(t, dom, phi) + tv_phi(excess, dom, phi) - total) <=
                 1e-9 * (1.0 + std::abs(total));
        }
        suites_passed += ok;
        os << ", truncation " << (ok ? "ok" : "FAIL");
    }
    // Representative decomposition: atom pairings against min, max, and mean.
    {
        Rng rng(0x3e9a3e5e00000004ull);
        bool ok = true;
        for (int c = 0; c < kCases && ok; ++c) {
            const GridDomain dom = random_domain(rng);
            const GridFunction w = random_function(rng, dom, false, false);
            DiscreteMeasure mu;
            mu.cell_density.resize(static_cast<size_t>(dom.cell_count()));
            for (double& rho : mu.cell_density) rho = rng.uniform(-2.0, 2.0);
            const size_t n_edges = dom.interior_edges().size();
            for (int a = 0; a < 3 && n_edges > 0; ++a) {
                mu.atoms.push_back({static_cast<int>(rng.next_below(n_edges)),
                                    rng.uniform(0.0, 1.5), rng.uniform(0.0, 1.5)});
            }
            double density = 0.0;
            for (size_t i = 0; i < mu.cell_density.size(); ++i) {
                density += dom.cell_weight() * mu.cell_density[i] * w.values[i];
            }
            double manual_lower = density;
            double pair_min = density;
            double pair_max = density;
            for (const auto& atom : mu.atoms) {
                const auto& e = dom.interior_edges()[static_cast<size_t>(atom.edge)];
                const double lo = std::min(w.values[static_cast<size_t>(e.i)],
                                           w.values[static_cast<size_t>(e.j)]);
                const double hi = std::max(w.values[static_cast<size_t>(e.i)],
                                           w.values[static_cast<size_t>(e.j)]);
                manual_lower += atom.m_plus * lo - atom.m_minus * hi;
                pair_min += (atom.m_plus - atom.m_minus) * lo;
                pair_max += (atom.m_plus - atom.m_minus) * hi;
            }
            const double scale = 1.0 + std::abs(manual_lower) + std::abs(pair_min) +
                                 std::abs(pair_max);
            ok = std::abs(measure_pairing(w, dom, mu, PairingMode::lower_vs_upper) -
                          manual_lower) <= 1e-11 * scale &&
                 std::abs(measure_pairing(w, dom, mu, PairingMode::average) -
                          0.5 * (pair_min + pair_max)) <= 1e-11 * scale;
        }
        suites_passed += ok;
        os << ", representative " << (ok ? "ok" : "FAIL");
    }
    // Polar duality inequality.
    {
        Rng rng(0x90a1d0a100000005ull);
        bool ok = true;
        for (int c = 0; c < kCases && ok; ++c) {
            const Integrand& phi = catalog_phi(c);
            const Vec2 x = {rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
            const Vec2 q = random_direction(rng) * rng.uniform(0.1, 3.0);
            const double pq = phi.polar(x, q);
            double attained = 0.0;
            for (int s = 0; s < 48; ++s) {
                const Vec2 xi = random_direction(rng) * rng.uniform(0.1, 2.0);
                const double pv = phi.eval(x, xi);
                if (dot(q, xi) > pq * pv + 1e-9 * (1.0 + pq * pv)) ok = false;
                attained = std::max(attained, dot(q, xi) / pv);
            }
            if (attained > pq + 1e-9) ok = false;
        }
        suites_passed += ok;
        os << ", polar " << (ok ? "ok" : "FAIL");
    }
    // Poincare inequality with the circumradius constant.
    {
        Rng rng(0x90ca1e0000000006ull);
        bool ok = true;
        for (int c = 0; c < kCases && ok; ++c) {
            const GridDomain dom = random_domain(rng);
            const GridFunction w = random_function(rng, dom, false, true);
            double lhs = 0.0;
            for (double v : w.values) lhs += dom.cell_weight() * std::abs(v);
            const double rhs =
                0.5 * mask_circumradius(dom) * tv_phi(w, dom, Integrand::isotropic());
            ok = lhs <= rhs * (1.0 + 1e-9) + 1e-12;
        }
        suites_passed += ok;
        os << ", poincare " << (ok ? "ok" : "FAIL");
    }
    // Isoperimetric inequality on pixel sets.
    {
        Rng rng(0x150be0100000007ull);
        bool ok = true;
        for (int c = 0; c < kCases && ok; ++c) {
            const GridDomain dom = random_domain(rng);
            std::vector<char> in(static_cast<size_t>(dom.cell_count()), 0);
            int count = 0;
            for (auto& f : in) {
                f = rng.next_double() < 0.5;
                count += f;
            }
            if (count == 0) {
                in[0] = 1;
                count = 1;
            }
            const double area = count * dom.cell_weight();
            ok = 2.0 * std::sqrt(kPi * area) <=
                 pixel_set_perimeter(in, dom, Integrand::isotropic()) + 1e-9;
        }
        suites_passed += ok;
        os << ", isoperimetric " << (ok ? "ok" : "FAIL");
    }
    // Comparability and homogeneity of the integrand catalog.
    {
        Rng rng(0xc03a9a8b00000008ull);
        bool ok = true;
        for (int c = 0; c < kCases && ok; ++c) {
            const Integrand& phi = catalog_phi(c);
            const Vec2 x = {rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
            const Vec2 xi = random_direction(rng) * rng.uniform(0.05, 4.0);
            const double t = rng.uniform(0.1, 5.0);
            const double v = phi.eval(x, xi);
            ok = v >= phi.alpha() * norm(xi) - 1e-12 && v <= phi.beta() * norm(xi) + 1e-12 &&
                 std::abs(phi.eval(x, xi * t) - t * v) <= 1e-9 * (1.0 + t * v);
        }
        suites_passed += ok;
        os << ", comparability " << (ok ? "ok" : "FAIL");
    }

    os << "; " << suites_passed << "/8 batteries x " << kCases << " cases";
    detail = os.str();
    return suites_passed == 8;
}

bool criterion_oracle_agreement(std::string& detail) {
    bool ok = true;
    std::ostringstream os;

    // Difference-of-convex and convex solver values against the frontier oracle.
    {
        Rng rng(0x0a9ec0de00000009ull);
        SolveConfig cfg;
        cfg.max_iters = 200000;
        cfg.tol_primal_dual = 1e-6;
        const double datum_pool[8] = {-0.75, -0.5, -0.25, 0.0, 0.25, 0.5, 0.75, 1.0};
        int solved = 0;
        double worst_phi_gap = 0.0;
        double worst_hat_excess = -1e300;
        for (int c = 0; c < 50; ++c) {
            const int shapes[3][2] = {{2, 2}, {3, 2}, {3, 3}};
            const GridDomain dom =
                GridDomain::rect(shapes[c % 3][0], shapes[c % 3][1], 0.5, {0.0, 0.0});
            const Integrand& phi = catalog_phi(c);
            std::vector<double> u0(dom.boundary_edges().size());
            for (double& d : u0) d = datum_pool[rng.next_below(8)];
            DiscreteMeasure mu;
            mu.cell_density.resize(static_cast<size_t>(dom.cell_count()));
            for (double& rho : mu.cell_density) {
                rho = rng.next_double() < 0.4 ? 0.0 : rng.uniform(-1.0, 1.0);
            }
            const size_t n_edges = dom.interior_edges().size();
            const int n_atoms = static_cast<int>(rng.next_below(3));
            for (int a = 0; a < n_atoms; ++a) {
                const int edge = static_cast<int>(rng.next_below(n_edges));
                bool dup = false;
                for (const auto& atom : mu.atoms) dup = dup || atom.edge == edge;
                if (dup) continue;
                const double m = rng.uniform(0.05, 0.35);
                const double r = rng.next_double();
                if (r < 0.4) {
                    mu.atoms.push_back({edge, m, 0.0});
                } else if (r < 0.8) {
                    mu.atoms.push_back({edge, 0.0, m});
                } else {
                    mu.atoms.push_back({edge, m, m});
                }
            }
            const OracleReport oracle =
                oracle_minimize(dom, phi, mu, u0, make_value_set(u0, 0.125));
            const SolveReport conv = minimize_phi(dom, phi, mu, u0, cfg);
            const SolveReport dc = minimize_phi_hat(dom, phi, mu, u0, cfg);
            const double band = oracle.error_band + 1e-9;
            worst_phi_gap = std::max(worst_phi_gap, std::abs(conv.value - oracle.phi.value));
            worst_hat_excess = std::max(worst_hat_excess, dc.value - oracle.phi_hat.value);
            if (!conv.converged || !dc.converged ||
                std::abs(conv.value - oracle.phi.value) > band ||
                dc.value > oracle.phi_hat.value + band) {
                ok = false;
            }
            ++solved;
        }
        os << solved << " solver instances (worst convex gap " << fmt(worst_phi_gap)
           << ", worst relaxed excess " << fmt(worst_hat_excess) << ")";
    }

    // Exhaustive set search against the certified dual norm. The dual prices
    // test functions with phi, so indicators of A enter the set form with the
    // mirrored weight in the forward role; running the set search on the
    // mirrored integrand makes the two verdicts test the same inequality.
    {
        Rng rng(0xa93ee3a90000000aull);
        DualNormOptions opts;
        opts.max_iters = 400000;
        opts.tol = 1e-4;
        int decisive_holds = 0;
        int decisive_violated = 0;
        int abstained = 0;
        int disagreements = 0;
        for (int c = 0; c < 50; ++c) {
            const GridDomain dom = GridDomain::rect(4, 4, c % 2 == 0 ? 0.5 : 1.0, {0.0, 0.0});
            const Integrand& phi = catalog_phi(c);
            DiscreteMeasure mu;
            mu.cell_density.resize(static_cast<size_t>(dom.cell_count()));
            const bool strong = c % 2 == 0;
            for (double& rho : mu.cell_density) {
                rho = rng.next_double() < 0.5 ? 0.0
                                              : rng.uniform(-1.0, 1.0) * (strong ? 2.0 : 0.4);
            }
            const size_t n_edges = dom.interior_edges().size();
            for (int a = 0; a < 2; ++a) {
                const int edge = static_cast<int>(rng.next_below(n_edges));
                bool dup = false;
                for (const auto& atom : mu.atoms) dup = dup || atom.edge == edge;
                if (dup) continue;
                const double m = strong ? rng.uniform(1.0, 3.0) : rng.uniform(0.05, 0.5);
                if (rng.next_double() < 0.5) {
                    mu.atoms.push_back({edge, m, 0.0});
                } else {
                    mu.atoms.push_back({edge, 0.0, m});
                }
            }
            const double C = rng.uniform(0.2, 1.6);
            ICQuery query;
            query.measure = mu;
            query.integrand = phi.mirrored();
            query.C = C;
            BruteForceOptions brute_opts;
            brute_opts.atom_rule = BruteAtomRule::average;
            query.direction = ICDirection::forward;
            const ICReport fw = brute_force_ic(query, dom, brute_opts);
            query.direction = ICDirection::mirrored;
            const ICReport bw = brute_force_ic(query, dom, brute_opts);
            const bool brute_holds =
                fw.verdict == ICVerdict::holds && bw.verdict == ICVerdict::holds;
            const DualNormReport rep = dual_norm(mu, dom, phi, opts);
            const ICVerdict dual = dual_verdict(rep, C);
            if (dual == ICVerdict::inconclusive) {
                ++abstained;
                continue;
            }
            if (dual == ICVerdict::holds) {
                ++decisive_holds;
                if (!brute_holds) ++disagreements;
            } else {
                ++decisive_violated;
                if (brute_holds) ++disagreements;
            }
        }
        if (disagreements != 0 || decisive_holds < 5 || decisive_violated < 5) ok = false;
        os << "; 50 set-search instances: " << decisive_holds << " holds, "
           << decisive_violated << " violated, " << abstained << " abstained, "
           << disagreements << " disagreements";
    }

    detail = os.str();
    return ok;
}

bool criterion_blowup_diagnostic(std::string& detail) {
    const ScenarioReport rep = run_scenario("non-exist");
    bool values_ok = true;
    bool growth_ok = true;
    std::vector<double> growth;
    for (const auto& check : rep.checks) {
        if (check.description.find("relative value change") != std::string::npos) {
            values_ok = values_ok && check.pass;
        }
        if (check.description.find("sup-norm growth") != std::string::npos) {
            growth_ok = growth_ok && check.pass;
            growth.push_back(check.computed);
        }
    }
    std::ostringstream os;
    os << "values stabilize within 5%: " << (values_ok ? "yes" : "NO")
       << "; sup-norm growth factors h=1/8 -> 1/64:";
    for (double g : growth) os << " " << fmt(g);
    os << " (required >= 2; capped and unbounded densities both admit uniformly bounded "
          "minimizers, so the factor stays near 1)";
    detail = os.str();
    return values_ok && growth_ok && growth.size() == 2;
}

struct Criterion {
    int id;
    const char* label;
    std::function<bool(std::string&)> body;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "exact triangle perimeters under the split and reflected weights",
         criterion_exact_perimeters},
        {2, "fractal chain masses, perimeters, and iterate areas", criterion_fractal_chain},
        {3, "divergence-field certificates over the shape batteries", criterion_certificates},
        {4, "signed radial measure: grid dual norm and single-set ratio",
         criterion_signed_dual},
        {5, "sharp-trace versus relaxed optimal values under refinement",
         criterion_consistency_gap},
        {6, "relaxed values of the scaled indicator family", criterion_failure_lsc},
        {7, "randomized property batteries", criterion_property_batteries},
        {8, "solver values and set-search verdicts against exact oracles",
         criterion_oracle_agreement},
        {9, "refinement diagnostic for minimizer blow-up", criterion_blowup_diagnostic},
    };
    int passed = 0;
    for (const auto& crit : criteria) {
        const double t0 = now_seconds();
        bool ok = false;
        std::string detail;
        try {
            ok = crit.body(detail);
        } catch (const std::exception& err) {
            detail = std::string("exception: ") + err.what();
        }
        const double elapsed = now_seconds() - t0;
        std::printf("[%s] criterion %d: %s (%.2fs) %s\n", ok ? "PASS" : "FAIL", crit.id,
                    crit.label, elapsed, detail.c_str());
        std::fflush(stdout);
        passed += ok;
    }
    std::printf("acceptance: %d of %zu criteria passed\n", passed, criteria.size());
    return passed == static_cast<int>(criteria.size()) ? 0 : 1;
}
