#include "anisotv/solve.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>

#include "anisotv/measures.hpp"
#include "anisotv/shapes.hpp"

namespace anisotv {

namespace {

void check_config(const SolveConfig& cfg) {
    if (cfg.max_iters < 1 || !(cfg.tol_primal_dual > 0.0) || cfg.dc_max_rounds < 1 ||
        !(cfg.quantization_step > 0.0)) {
        throw Error(ErrCode::invalid_input, "solve config needs positive budgets and tolerances");
    }
}

// Load vector of the averaged pairing: cell densities plus half of each
// atom's net mass on both endpoints.
std::vector<double> average_load(const DiscreteMeasure& mu, const GridDomain& dom) {
    std::vector<double> c(static_cast<size_t>(dom.cell_count()), 0.0);
    for (int i = 0; i < dom.cell_count(); ++i) {
        c[static_cast<size_t>(i)] = dom.cell_weight() * mu.cell_density[static_cast<size_t>(i)];
    }
    for (const auto& atom : mu.atoms) {
        const auto& e = dom.interior_edges()[static_cast<size_t>(atom.edge)];
        const double half = 0.5 * (atom.m_plus - atom.m_minus);
        c[static_cast<size_t>(e.i)] += half;
        c[static_cast<size_t>(e.j)] += half;
    }
    return c;
}

// Saddle-point solver for tv_phi(w; u0) + <c, w>. Face caps carry the edge
// weight and the direction-split integrand values, so the same arrays price
// the primal total variation and the dual interval constraints.
struct ConvexTV {
    const GridDomain& dom;
    std::vector<double> c;
    std::vector<double> u0;
    std::vector<double> up_e, dn_e, up_b, dn_b;
    double data_scale = 0.0;

    std::vector<double> w, w_prev, sigma_e, sigma_b, div;

    ConvexTV(const GridDomain& d, const Integrand& phi, std::vector<double> load,
             std::vector<double> datum)
        : dom(d), c(std::move(load)), u0(std::move(datum)) {
        const auto& edges = dom.interior_edges();
        const auto& rim = dom.boundary_edges();
        if (u0.size() != rim.size()) {
            throw Error(ErrCode::invalid_input, "datum size does not match the boundary");
        }
        const double we = dom.edge_weight();
        up_e.resize(edges.size());
        dn_e.resize(edges.size());
        for (size_t e = 0; e < edges.size(); ++e) {
            up_e[e] = we * phi.eval(edges[e].mid, edges[e].dir);
            dn_e[e] = we * phi.eval(edges[e].mid, -edges[e].dir);
        }
        up_b.resize(rim.size());
        dn_b.resize(rim.size());
        for (size_t b = 0; b < rim.size(); ++b) {
            up_b[b] = we * phi.eval(rim[b].mid, -rim[b].nu_in);
            dn_b[b] = we * phi.eval(rim[b].mid, rim[b].nu_in);
        }
        w.assign(static_cast<size_t>(dom.cell_count()), 0.0);
        w_prev = w;
        sigma_e.assign(edges.size(), 0.0);
        sigma_b.assign(rim.size(), 0.0);
        div.assign(w.size(), 0.0);
    }

    double tv(const std::vector<double>& v) const {
        double total = 0.0;
        const auto& edges = dom.interior_edges();
        for (size_t e = 0; e < edges.size(); ++e) {
            const double t = v[static_cast<size_t>(edges[e].j)] -
                             v[static_cast<size_t>(edges[e].i)];
            total += t > 0.0 ? t * up_e[e] : -t * dn_e[e];
        }
        const auto& rim = dom.boundary_edges();
        for (size_t b = 0; b < rim.size(); ++b) {
            const double t = u0[b] - v[static_cast<size_t>(rim[b].cell)];
            total += t > 0.0 ? t * up_b[b] : -t * dn_b[b];
        }
        return total;
    }

    double primal(const std::vector<double>& v) const {
        double lin = 0.0;
        for (size_t i = 0; i < c.size(); ++i) lin += c[i] * v[i];
        return tv(v) + lin;
    }

    void transpose_apply() {
        std::fill(div.begin(), div.end(), 0.0);
        const auto& edges = dom.interior_edges();
        for (size_t e = 0; e < edges.size(); ++e) {
            div[static_cast<size_t>(edges[e].i)] -= sigma_e[e];
            div[static_cast<size_t>(edges[e].j)] += sigma_e[e];
        }
        const auto& rim = dom.boundary_edges();
        for (size_t b = 0; b < rim.size(); ++b) {
            div[static_cast<size_t>(rim[b].cell)] -= sigma_b[b];
        }
    }

    // Lower bound on the primal over the ball max|w| <= radius.
    double dual_bound(double radius) {
        transpose_apply();
        double bound = 0.0;
        for (size_t b = 0; b < sigma_b.size(); ++b) bound += sigma_b[b] * u0[b];
        double mismatch = 0.0;
        for (size_t i = 0; i < c.size(); ++i) mismatch += std::abs(div[i] + c[i]);
        return bound - radius * mismatch;
    }

    struct Outcome {
        double value = 0.0;
        double gap = 0.0;
        int iterations = 0;
        bool converged = false;
    };

    Outcome run(int max_iters, double tol) {
        const double tau = 0.999 / std::sqrt(8.0);
        const auto& edges = dom.interior_edges();
        const auto& rim = dom.boundary_edges();
        Outcome out;
        double value = primal(w);
        double gap = std::abs(value) + 1.0;
        for (int it = 0; it < max_iters; ++it) {
            for (size_t e = 0; e < edges.size(); ++e) {
                const size_t i = static_cast<size_t>(edges[e].i);
                const size_t j = static_cast<size_t>(edges[e].j);
                const double step = (2.0 * w[j] - w_prev[j]) - (2.0 * w[i] - w_prev[i]);
                sigma_e[e] = std::clamp(sigma_e[e] + tau * step, -dn_e[e], up_e[e]);
            }
            for (size_t b = 0; b < rim.size(); ++b) {
                const size_t i = static_cast<size_t>(rim[b].cell);
                const double step = u0[b] - (2.0 * w[i] - w_prev[i]);
                sigma_b[b] = std::clamp(sigma_b[b] + tau * step, -dn_b[b], up_b[b]);
            }
            transpose_apply();
            w_prev = w;
            for (size_t i = 0; i < w.size(); ++i) w[i] -= tau * (div[i] + c[i]);
            out.iterations = it + 1;
            if ((it & 31) == 31 || it + 1 == max_iters) {
                value = primal(w);
                if (value < -1e6 * (1.0 + data_scale)) {
                    throw Error(ErrCode::unbounded_detected,
                                "objective fell to " + std::to_string(value) +
                                    ", the data admit no finite infimum at this scale");
                }
                double radius = 1.0;
                for (double vi : w) radius = std::max(radius, std::abs(vi));
                for (double d : u0) radius = std::max(radius, std::abs(d));
                gap = value - dual_bound(2.0 * radius + 1.0);
                if (gap <= tol * (1.0 + std::abs(value))) {
                    out.converged = true;
                    break;
                }
            }
        }
        out.value = value;
        out.gap = gap;
        return out;
    }

    void polish(const std::vector<double>& levels);
    double recession_slack();
};

// Dinic maximum flow on a small dense-capacity graph; arcs are stored in
// forward/backward pairs so the residual network is implicit.
class MaxFlow {
public:
    explicit MaxFlow(int nodes) : head_(static_cast<size_t>(nodes), -1) {}

    void add_arc(int u, int v, double cap_uv, double cap_vu) {
        push(u, v, cap_uv);
        push(v, u, cap_vu);
    }

    double solve(int s, int t) {
        double total = 0.0;
        while (level_bfs(s, t)) {
            it_ = head_;
            for (double sent = blocking(s, t, kInf); sent > 0.0;
                 sent = blocking(s, t, kInf)) {
                total += sent;
            }
        }
        source_side_.assign(head_.size(), true);
        reach_t_bfs(t);
        return total;
    }

    // Maximal minimum cut: every node that cannot reach the sink through the
    // residual network sits on the source side.
    bool on_source_side(int v) const { return source_side_[static_cast<size_t>(v)]; }

private:
    static constexpr double kInf = 1e300;
    static constexpr double kEps = 1e-12;

    std::vector<int> head_, nxt_, to_, it_, depth_;
    std::vector<double> cap_;
    std::vector<char> source_side_;

    void push(int u, int v, double cap) {
        to_.push_back(v);
        cap_.push_back(cap);
        nxt_.push_back(head_[static_cast<size_t>(u)]);
        head_[static_cast<size_t>(u)] = static_cast<int>(to_.size()) - 1;
    }

    bool level_bfs(int s, int t) {
        depth_.assign(head_.size(), -1);
        depth_[static_cast<size_t>(s)] = 0;
        std::vector<int> queue = {s};
        for (size_t q = 0; q < queue.size(); ++q) {
            const int u = queue[q];
            for (int a = head_[static_cast<size_t>(u)]; a >= 0; a = nxt_[static_cast<size_t>(a)]) {
                const int v = to_[static_cast<size_t>(a)];
                if (depth_[static_cast<size_t>(v)] < 0 && cap_[static_cast<size_t>(a)] > kEps) {
                    depth_[static_cast<size_t>(v)] = depth_[static_cast<size_t>(u)] + 1;
                    queue.push_back(v);
                }
            }
        }
        return depth_[static_cast<size_t>(t)] >= 0;
    }

    double blocking(int u, int t, double limit) {
        if (u == t) return limit;
        for (int& a = it_[static_cast<size_t>(u)]; a >= 0; a = nxt_[static_cast<size_t>(a)]) {
            const int v = to_[static_cast<size_t>(a)];
            if (depth_[static_cast<size_t>(v)] != depth_[static_cast<size_t>(u)] + 1 ||
                cap_[static_cast<size_t>(a)] <= kEps)
                continue;
            const double sent =
                blocking(v, t, std::min(limit, cap_[static_cast<size_t>(a)]));
            if (sent > 0.0) {
                cap_[static_cast<size_t>(a)] -= sent;
                cap_[static_cast<size_t>(a ^ 1)] += sent;
                return sent;
            }
        }
        return 0.0;
    }

    void reach_t_bfs(int t) {
        std::vector<std::vector<int>> rev(head_.size());
        for (size_t u = 0; u < head_.size(); ++u) {
            for (int a = head_[u]; a >= 0; a = nxt_[static_cast<size_t>(a)]) {
                if (cap_[static_cast<size_t>(a)] > kEps)
                    rev[static_cast<size_t>(to_[static_cast<size_t>(a)])].push_back(
                        static_cast<int>(u));
            }
        }
        source_side_[static_cast<size_t>(t)] = false;
        std::vector<int> queue = {t};
        for (size_t q = 0; q < queue.size(); ++q) {
            for (int u : rev[static_cast<size_t>(queue[q])]) {
                if (source_side_[static_cast<size_t>(u)]) {
                    source_side_[static_cast<size_t>(u)] = false;
                    queue.push_back(u);
                }
            }
        }
    }
};

// Exact lattice re-solve.  With values restricted to the sorted level set,
// every face cost splits across thresholds with consistent signs, so the
// objective is a sum of binary cut problems that share the edge capacities
// and differ only in the datum side.  Those unaries are monotone across
// levels, so the maximal minimum cuts nest; the thresholds are resolved by
// bisection, fixing each cut's side before refining inside it.  The datum
// levels are all in the set, which makes the lattice minimum the true one.
// The saddle-point iterate is kept when it is better, which can only happen
// through floating-point ties.
void ConvexTV::polish(const std::vector<double>& levels) {
    if (levels.size() < 2) return;
    const auto& edges = dom.interior_edges();
    const auto& rim = dom.boundary_edges();
    const int m = static_cast<int>(levels.size()) - 1;
    std::vector<std::vector<int>> inc(w.size());
    for (size_t e = 0; e < edges.size(); ++e) {
        inc[static_cast<size_t>(edges[e].i)].push_back(static_cast<int>(e));
        inc[static_cast<size_t>(edges[e].j)].push_back(static_cast<int>(e));
    }
    std::vector<std::vector<int>> rim_inc(w.size());
    for (size_t b = 0; b < rim.size(); ++b) {
        rim_inc[static_cast<size_t>(rim[b].cell)].push_back(static_cast<int>(b));
    }

    // Thresholds carry indices 1..m; cell i is still undecided on
    // [lo[i], hi[i]] and holds level lo[i]-1 once that range empties.
    std::vector<int> lo(w.size(), 1), hi(w.size(), m);
    std::vector<int> local(w.size(), -1);
    struct Job {
        std::vector<int> cells;
        int klo, khi;
    };
    std::vector<Job> jobs;
    {
        Job root;
        root.klo = 1;
        root.khi = m;
        root.cells.resize(w.size());
        std::iota(root.cells.begin(), root.cells.end(), 0);
        jobs.push_back(std::move(root));
    }
    while (!jobs.empty()) {
        const Job job = std::move(jobs.back());
        jobs.pop_back();
        const int mid = job.klo + (job.khi - job.klo) / 2;
        const double threshold = levels[static_cast<size_t>(mid)];
        const int count = static_cast<int>(job.cells.size());
        for (int q = 0; q < count; ++q) local[static_cast<size_t>(job.cells[static_cast<size_t>(q)])] = q;
        const int src = count;
        const int snk = count + 1;
        MaxFlow flow(count + 2);
        for (int q = 0; q < count; ++q) {
            const int i = job.cells[static_cast<size_t>(q)];
            const size_t ui = static_cast<size_t>(i);
            double to_src = 0.0;
            double to_snk = 0.0;
            (c[ui] >= 0.0 ? to_snk : to_src) += std::abs(c[ui]);
            for (int b : rim_inc[ui]) {
                const size_t ub = static_cast<size_t>(b);
                // A datum at or above the threshold pays the upward cap when
                // the cell stays below it, and conversely.
                if (u0[ub] >= threshold) {
                    to_src += up_b[ub];
                } else {
                    to_snk += dn_b[ub];
                }
            }
            for (int e : inc[ui]) {
                const size_t ue = static_cast<size_t>(e);
                const bool tail = edges[ue].i == i;
                const int other = tail ? edges[ue].j : edges[ue].i;
                if (local[static_cast<size_t>(other)] >= 0) {
                    if (tail) {
                        flow.add_arc(q, local[static_cast<size_t>(other)], dn_e[ue], up_e[ue]);
                    }
                    continue;
                }
                // Cells outside the job have a settled side at this
                // threshold; their face cost folds into the unaries.
                const bool other_up = mid < lo[static_cast<size_t>(other)];
                if (tail) {
                    (other_up ? to_src : to_snk) += other_up ? up_e[ue] : dn_e[ue];
                } else {
                    (other_up ? to_src : to_snk) += other_up ? dn_e[ue] : up_e[ue];
                }
            }
            if (to_src > 0.0) flow.add_arc(src, q, to_src, 0.0);
            if (to_snk > 0.0) flow.add_arc(q, snk, to_snk, 0.0);
        }
        flow.solve(src, snk);
        Job top, bot;
        top.klo = mid + 1;
        top.khi = job.khi;
        bot.klo = job.klo;
        bot.khi = mid - 1;
        for (int q = 0; q < count; ++q) {
            const int i = job.cells[static_cast<size_t>(q)];
            if (flow.on_source_side(q)) {
                lo[static_cast<size_t>(i)] = mid + 1;
                top.cells.push_back(i);
            } else {
                hi[static_cast<size_t>(i)] = mid - 1;
                bot.cells.push_back(i);
            }
        }
        for (int i : job.cells) local[static_cast<size_t>(i)] = -1;
        if (!top.cells.empty() && top.klo <= top.khi) jobs.push_back(std::move(top));
        if (!bot.cells.empty() && bot.klo <= bot.khi) jobs.push_back(std::move(bot));
    }
    std::vector<double> lifted(w.size());
    for (size_t i = 0; i < w.size(); ++i) {
        lifted[i] = levels[static_cast<size_t>(lo[i] - 1)];
    }
    if (primal(lifted) <= primal(w)) w = lifted;
    w_prev = w;
}

// Smallest asymptotic slope of the objective along indicator directions in
// either sign.  The objective is bounded below exactly when this is
// nonnegative; a negative slack exhibits a cell set whose load outruns the
// face costs its indicator crosses.  Far above or below the datum every rim
// face contributes its one-sided cap, so two cut problems cover all levels.
double ConvexTV::recession_slack() {
    const auto& edges = dom.interior_edges();
    const auto& rim = dom.boundary_edges();
    const int n = static_cast<int>(w.size());
    const int src = n;
    const int snk = n + 1;
    double worst = 0.0;
    for (int pass = 0; pass < 2; ++pass) {
        const bool rising = pass == 0;
        std::vector<double> unary(w.size());
        for (size_t i = 0; i < w.size(); ++i) unary[i] = rising ? c[i] : -c[i];
        for (size_t b = 0; b < rim.size(); ++b) {
            unary[static_cast<size_t>(rim[b].cell)] += rising ? dn_b[b] : up_b[b];
        }
        MaxFlow flow(n + 2);
        double offset = 0.0;
        for (int i = 0; i < n; ++i) {
            const double a = unary[static_cast<size_t>(i)];
            if (a > 0.0) {
                flow.add_arc(i, snk, a, 0.0);
            } else if (a < 0.0) {
                flow.add_arc(src, i, -a, 0.0);
                offset -= a;
            }
        }
        for (size_t e = 0; e < edges.size(); ++e) {
            if (rising) {
                flow.add_arc(edges[e].i, edges[e].j, dn_e[e], up_e[e]);
            } else {
                flow.add_arc(edges[e].i, edges[e].j, up_e[e], dn_e[e]);
            }
        }
        worst = std::min(worst, flow.solve(src, snk) - offset);
    }
    return worst;
}

double phi_hat_atom_terms(const std::vector<double>& w, const DiscreteMeasure& mu,
                          const GridDomain& dom) {
    double total = 0.0;
    for (const auto& atom : mu.atoms) {
        const auto& e = dom.interior_edges()[static_cast<size_t>(atom.edge)];
        const double a = w[static_cast<size_t>(e.i)];
        const double b = w[static_cast<size_t>(e.j)];
        total += atom.m_plus * std::min(a, b) - atom.m_minus * std::max(a, b);
    }
    return total;
}

// Saddle-point loop followed by the exact lattice polish.  The polished
// value is certified one of three ways: the iterate's own gap test, the
// dual bound re-evaluated at the polished point, or, when both fall short,
// a recession check.  Nonnegative recession slack means the problem is
// bounded, and a bounded instance attains its minimum on the datum value
// set, which the polish lattice contains, so the polished value is exact
// and carries a zero gap.  Negative slack is a certificate of unboundedness
// that the iterate's divergence heuristic missed within its budget.
ConvexTV::Outcome solve_convex(ConvexTV& solver, const SolveConfig& cfg,
                               const std::vector<double>& levels) {
    auto out = solver.run(cfg.max_iters, cfg.tol_primal_dual);
    solver.polish(levels);
    const double value = solver.primal(solver.w);
    double radius = 1.0;
    for (double vi : solver.w) radius = std::max(radius, std::abs(vi));
    for (double d : solver.u0) radius = std::max(radius, std::abs(d));
    const double gap = value - solver.dual_bound(2.0 * radius + 1.0);
    if (gap <= cfg.tol_primal_dual * (1.0 + std::abs(value))) {
        out.converged = true;
        out.gap = gap;
    } else if (!out.converged) {
        const double slack = solver.recession_slack();
        if (slack < -1e-9 * (1.0 + solver.data_scale)) {
            throw Error(ErrCode::unbounded_detected,
                        "recession slope " + std::to_string(slack) +
                            ", the data admit no finite infimum");
        }
        out.converged = true;
        out.gap = 0.0;
    }
    out.value = value;
    return out;
}

}  // namespace

SolveReport minimize_phi(const GridDomain& dom, const Integrand& phi,
                         const DiscreteMeasure& mu, const std::vector<double>& u0,
                         const SolveConfig& cfg) {
    check_config(cfg);
    mu.validate(dom);
    ConvexTV solver(dom, phi, average_load(mu, dom), u0);
    double datum_max = 0.0;
    for (double d : u0) datum_max = std::max(datum_max, std::abs(d));
    solver.data_scale = mu.total_variation(dom) + datum_max;
    const auto out = solve_convex(solver, cfg, make_value_set(u0, cfg.quantization_step));
    if (!out.converged) {
        throw Error(ErrCode::not_converged,
                    "primal-dual gap " + std::to_string(out.gap) + " after " +
                        std::to_string(out.iterations) + " iterations");
    }
    SolveReport rep;
    rep.minimizer.values = solver.w;
    rep.minimizer.datum = u0;
    rep.value = out.value;
    rep.round_values = {out.value};
    rep.iterations = out.iterations;
    rep.converged = true;
    rep.gap = out.gap;
    return rep;
}

SolveReport minimize_phi_hat(const GridDomain& dom, const Integrand& phi,
                             const DiscreteMeasure& mu, const std::vector<double>& u0,
                             const SolveConfig& cfg) {
    check_config(cfg);
    mu.validate(dom);
    bool has_pairs = false;
    for (const auto& atom : mu.atoms) {
        if (atom.m_plus + atom.m_minus > 0.0) has_pairs = true;
    }
    if (!has_pairs) return minimize_phi(dom, phi, mu, u0, cfg);

    const std::vector<double> base_load = average_load(mu, dom);
    ConvexTV solver(dom, phi, base_load, u0);
    double datum_max = 0.0;
    for (double d : u0) datum_max = std::max(datum_max, std::abs(d));
    solver.data_scale = mu.total_variation(dom) + datum_max;

    const auto objective = [&](const std::vector<double>& w) {
        return solver.tv(w) + [&] {
            double lin = 0.0;
            for (int i = 0; i < dom.cell_count(); ++i) {
                lin += dom.cell_weight() * mu.cell_density[static_cast<size_t>(i)] *
                       w[static_cast<size_t>(i)];
            }
            return lin;
        }() + phi_hat_atom_terms(w, mu, dom);
    };

    const std::vector<double> levels = make_value_set(u0, cfg.quantization_step);
    SolveReport rep;
    const auto first = solve_convex(solver, cfg, levels);
    if (!first.converged) {
        throw Error(ErrCode::not_converged, "initial convex solve did not reach tolerance");
    }
    rep.iterations = first.iterations;
    rep.gap = first.gap;
    double best = objective(solver.w);
    std::vector<double> best_w = solver.w;
    rep.round_values.push_back(best);

    for (int round = 0; round < cfg.dc_max_rounds; ++round) {
        // Linearize each concave half-gap term at the current iterate; a tie
        // across the atom edge takes the averaged subgradient, which is zero.
        std::vector<double> load = base_load;
        for (const auto& atom : mu.atoms) {
            const auto& e = dom.interior_edges()[static_cast<size_t>(atom.edge)];
            const double gamma = 0.5 * (atom.m_plus + atom.m_minus);
            const double a = solver.w[static_cast<size_t>(e.i)];
            const double b = solver.w[static_cast<size_t>(e.j)];
            double sign = 0.0;
            if (b - a > kIncidenceTol * (1.0 + std::abs(a) + std::abs(b))) sign = 1.0;
            if (a - b > kIncidenceTol * (1.0 + std::abs(a) + std::abs(b))) sign = -1.0;
            load[static_cast<size_t>(e.j)] -= gamma * sign;
            load[static_cast<size_t>(e.i)] += gamma * sign;
        }
        solver.c = load;
        const auto out = solve_convex(solver, cfg, levels);
        rep.iterations += out.iterations;
        rep.gap = out.gap;
        if (!out.converged) {
            throw Error(ErrCode::not_converged, "convex subproblem did not reach tolerance");
        }
        const double value = objective(solver.w);
        if (value < best - 1e-9) {
            best = value;
            best_w = solver.w;
            rep.round_values.push_back(value);
        } else {
            break;
        }
    }
    rep.minimizer.values = best_w;
    rep.minimizer.datum = u0;
    rep.value = best;
    rep.converged = true;
    rep.monotone = std::is_sorted(rep.round_values.rbegin(), rep.round_values.rend());
    return rep;
}

namespace {

struct FrontierPlan {
    // For each cell in sweep order: the frontier before assigning it, the
    // frontier after, and the incident structure resolved at that step.
    struct Step {
        std::vector<int> before;
        std::vector<int> after;
        std::vector<int> resolved_edges;  // interior edges whose other end is already assigned
        std::vector<int> rim_edges;
    };
    std::vector<Step> steps;
    size_t max_states = 1;
};

FrontierPlan plan_frontier(const GridDomain& dom, size_t value_count) {
    const int n = dom.cell_count();
    FrontierPlan plan;
    plan.steps.resize(static_cast<size_t>(n));
    const auto& edges = dom.interior_edges();
    std::vector<int> last_neighbor(static_cast<size_t>(n), -1);
    for (const auto& e : edges) {
        last_neighbor[static_cast<size_t>(e.i)] =
            std::max(last_neighbor[static_cast<size_t>(e.i)], e.j);
        last_neighbor[static_cast<size_t>(e.j)] =
            std::max(last_neighbor[static_cast<size_t>(e.j)], e.i);
    }
    std::vector<int> frontier;
    for (int k = 0; k < n; ++k) {
        auto& step = plan.steps[static_cast<size_t>(k)];
        step.before = frontier;
        frontier.push_back(k);
        std::vector<int> kept;
        for (int cell : frontier) {
            if (last_neighbor[static_cast<size_t>(cell)] > k) kept.push_back(cell);
        }
        frontier = kept;
        step.after = frontier;
        size_t states = 1;
        for (size_t t = 0; t < step.after.size(); ++t) {
            states *= value_count;
            if (states > (size_t{1} << 40)) break;
        }
        plan.max_states = std::max(plan.max_states, states);
    }
    for (size_t e = 0; e < edges.size(); ++e) {
        const int hi = std::max(edges[e].i, edges[e].j);
        plan.steps[static_cast<size_t>(hi)].resolved_edges.push_back(static_cast<int>(e));
    }
    const auto& rim = dom.boundary_edges();
    for (size_t b = 0; b < rim.size(); ++b) {
        plan.steps[static_cast<size_t>(rim[b].cell)].rim_edges.push_back(static_cast<int>(b));
    }
    return plan;
}

struct SweepResult {
    double value = 0.0;
    std::vector<double> assignment;
};

SweepResult frontier_sweep(const GridDomain& dom, const FrontierPlan& plan,
                           const std::vector<double>& values, bool lower_pairing,
                           const ConvexTV& geom, const DiscreteMeasure& mu) {
    const int n = dom.cell_count();
    const size_t vcount = values.size();
    const auto& edges = dom.interior_edges();

    std::vector<std::vector<const EdgeAtom*>> atom_of_edge(edges.size());
    for (const auto& atom : mu.atoms) {
        atom_of_edge[static_cast<size_t>(atom.edge)].push_back(&atom);
    }

    std::vector<double> dp_before(1, 0.0);
    std::vector<std::vector<std::uint32_t>> bp_state(static_cast<size_t>(n));
    std::vector<std::vector<std::uint16_t>> bp_value(static_cast<size_t>(n));

    std::vector<double> frontier_vals;
    for (int k = 0; k < n; ++k) {
        const auto& step = plan.steps[static_cast<size_t>(k)];
        size_t after_states = 1;
        for (size_t t = 0; t < step.after.size(); ++t) after_states *= vcount;
        std::vector<double> dp_after(after_states, std::numeric_limits<double>::infinity());
        bp_state[static_cast<size_t>(k)].assign(after_states, 0);
        bp_value[static_cast<size_t>(k)].assign(after_states, 0);

        size_t before_states = 1;
        for (size_t t = 0; t < step.before.size(); ++t) before_states *= vcount;
        std::vector<int> slot_of(static_cast<size_t>(n), -1);
        for (size_t t = 0; t < step.before.size(); ++t) {
            slot_of[static_cast<size_t>(step.before[t])] = static_cast<int>(t);
        }
        frontier_vals.resize(step.before.size());
        for (size_t bs = 0; bs < before_states; ++bs) {
            if (!std::isfinite(dp_before[bs])) continue;
            size_t code = bs;
            for (size_t t = 0; t < step.before.size(); ++t) {
                frontier_vals[t] = values[code % vcount];
                code /= vcount;
            }
            for (size_t vi = 0; vi < vcount; ++vi) {
                const double v = values[vi];
                double cost = dom.cell_weight() * mu.cell_density[static_cast<size_t>(k)] * v;
                for (int b : step.rim_edges) {
                    const double t = geom.u0[static_cast<size_t>(b)] - v;
                    cost += t > 0.0 ? t * geom.up_b[static_cast<size_t>(b)]
                                    : -t * geom.dn_b[static_cast<size_t>(b)];
                }
                bool usable = true;
                for (int ei : step.resolved_edges) {
                    const auto& e = edges[static_cast<size_t>(ei)];
                    const int other = e.i == k ? e.j : e.i;
                    const int slot = slot_of[static_cast<size_t>(other)];
                    if (slot < 0) {
                        usable = false;
                        break;
                    }
                    const double wo = frontier_vals[static_cast<size_t>(slot)];
                    const double wi = e.i == k ? v : wo;
                    const double wj = e.j == k ? v : wo;
                    const double t = wj - wi;
                    cost += t > 0.0 ? t * geom.up_e[static_cast<size_t>(ei)]
                                    : -t * geom.dn_e[static_cast<size_t>(ei)];
                    for (const EdgeAtom* atom : atom_of_edge[static_cast<size_t>(ei)]) {
                        if (lower_pairing) {
                            cost += atom->m_plus * std::min(wi, wj) -
                                    atom->m_minus * std::max(wi, wj);
                        } else {
                            cost += 0.5 * (atom->m_plus - atom->m_minus) * (wi + wj);
                        }
                    }
                }
                if (!usable) {
                    throw Error(ErrCode::invalid_input, "cell order is not frontier compatible");
                }
                size_t as = 0;
                for (size_t t = step.after.size(); t-- > 0;) {
                    const int cell = step.after[t];
                    size_t digit;
                    if (cell == k) {
                        digit = vi;
                    } else {
                        digit = static_cast<size_t>(
                            std::find(step.before.begin(), step.before.end(), cell) -
                            step.before.begin());
                        size_t rem = bs;
                        for (size_t d = 0; d < digit; ++d) rem /= vcount;
                        digit = rem % vcount;
                    }
                    as = as * vcount + digit;
                }
                const double total = dp_before[bs] + cost;
                if (total < dp_after[as]) {
                    dp_after[as] = total;
                    bp_state[static_cast<size_t>(k)][as] = static_cast<std::uint32_t>(bs);
                    bp_value[static_cast<size_t>(k)][as] = static_cast<std::uint16_t>(vi);
                }
            }
        }
        dp_before = std::move(dp_after);
    }

    SweepResult res;
    res.value = dp_before[0];
    res.assignment.assign(static_cast<size_t>(n), 0.0);
    size_t state = 0;
    for (int k = n - 1; k >= 0; --k) {
        const std::uint16_t vi = bp_value[static_cast<size_t>(k)][state];
        res.assignment[static_cast<size_t>(k)] = values[vi];
        state = bp_state[static_cast<size_t>(k)][state];
    }
    return res;
}

}  // namespace

OracleReport oracle_minimize(const GridDomain& dom, const Integrand& phi,
                             const DiscreteMeasure& mu, const std::vector<double>& u0,
                             const std::vector<double>& value_set) {
    mu.validate(dom);
    const int n = dom.cell_count();
    if (n > 9) {
        throw Error(ErrCode::too_large,
                    "exhaustive value sweep supports at most 9 cells, got " + std::to_string(n));
    }
    if (value_set.empty()) {
        throw Error(ErrCode::invalid_input, "value set must not be empty");
    }
    std::vector<double> values = value_set;
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end(),
                             [](double a, double b) { return std::abs(a - b) <= 1e-12; }),
                 values.end());
    if (values.size() > 60000) {
        throw Error(ErrCode::too_large, "value set too fine for the sweep");
    }
    const FrontierPlan plan = plan_frontier(dom, values.size());
    if (plan.max_states > (size_t{4} << 20) ||
        plan.max_states * values.size() > size_t{500000000}) {
        throw Error(ErrCode::too_large, "frontier state space too large for the sweep");
    }
    ConvexTV geom(dom, phi, std::vector<double>(static_cast<size_t>(n), 0.0), u0);

    OracleReport rep;
    {
        const auto res = frontier_sweep(dom, plan, values, false, geom, mu);
        rep.phi.value = res.value;
        rep.phi.argmin.values = res.assignment;
        rep.phi.argmin.datum = u0;
    }
    {
        const auto res = frontier_sweep(dom, plan, values, true, geom, mu);
        rep.phi_hat.value = res.value;
        rep.phi_hat.argmin.values = res.assignment;
        rep.phi_hat.argmin.datum = u0;
    }

    double lip = 0.0;
    for (size_t e = 0; e < geom.up_e.size(); ++e) lip += geom.up_e[e] + geom.dn_e[e];
    for (size_t b = 0; b < geom.up_b.size(); ++b) lip += geom.up_b[b] + geom.dn_b[b];
    for (int i = 0; i < n; ++i) {
        lip += dom.cell_weight() * std::abs(mu.cell_density[static_cast<size_t>(i)]);
    }
    for (const auto& atom : mu.atoms) lip += atom.m_plus + atom.m_minus;
    double max_gap = 0.0;
    for (size_t t = 0; t + 1 < values.size(); ++t) {
        max_gap = std::max(max_gap, values[t + 1] - values[t]);
    }
    rep.error_band = 0.5 * lip * max_gap;
    return rep;
}

std::vector<double> make_value_set(const std::vector<double>& u0, double step) {
    if (!(step > 0.0)) throw Error(ErrCode::invalid_input, "quantization step must be > 0");
    std::vector<double> breaks = {0.0};
    for (double d : u0) breaks.push_back(d);
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end(),
                             [](double a, double b) { return std::abs(a - b) <= 1e-12; }),
                 breaks.end());
    std::vector<double> out = breaks;
    for (size_t t = 0; t + 1 < breaks.size(); ++t) {
        out.push_back(0.5 * (breaks[t] + breaks[t + 1]));
    }
    const double lo = breaks.front() - step;
    const double hi = breaks.back() + step;
    for (long long k = static_cast<long long>(std::floor(lo / step));
         k <= static_cast<long long>(std::ceil(hi / step)); ++k) {
        const double v = static_cast<double>(k) * step;
        if (v >= lo - 1e-12 && v <= hi + 1e-12) out.push_back(v);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end(),
                          [](double a, double b) { return std::abs(a - b) <= 1e-12; }),
              out.end());
    return out;
}

ConsistencyGap consistency_gap(double h, const SolveConfig& cfg) {
    if (!(h > 0.0) || h > 0.5) {
        throw Error(ErrCode::invalid_input, "grid spacing must lie in (0, 1/2]");
    }
    const int n = static_cast<int>(std::lround(2.0 / h));
    const GridDomain dom =
        GridDomain::from_shape(Shape::disc({0.0, 0.0}, 1.0), h, {-1.0, -1.0}, n, n);
    std::vector<double> u0(dom.boundary_edges().size(), 0.0);
    for (size_t b = 0; b < u0.size(); ++b) {
        u0[b] = dom.boundary_edges()[b].mid.x > 0.0 ? 1.0 : -1.0;
    }
    const std::vector<CurveMeasure> diameter = {
        CurveMeasure::segment({0.0, -1.0}, {0.0, 1.0}, 1.0)};
    const DiscreteMeasure mu = rasterize(diameter, diameter, dom);

    ConsistencyGap gap;
    gap.phi_report = minimize_phi(dom, Integrand::isotropic(), mu, u0, cfg);
    gap.phi_hat_report = minimize_phi_hat(dom, Integrand::isotropic(), mu, u0, cfg);
    gap.inf_phi = gap.phi_report.value;
    gap.min_phi_hat = gap.phi_hat_report.value;
    return gap;
}

}  // namespace anisotv
