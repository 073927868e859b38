#include "anisotv/icheck.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <string>

namespace anisotv {

namespace {

// Direction-resolved score data. closure-role mass gains whenever the atom
// touches A, interior-role mass is charged only when A covers both cells.
struct ScoreContext {
    struct Atom {
        int i = 0;
        int j = 0;
        double closure = 0.0;
        double interior = 0.0;
    };
    struct Edge {
        int i = 0;
        int j = 0;
        double cost_only_i = 0.0;
        double cost_only_j = 0.0;
    };
    struct Rim {
        int cell = 0;
        double cost = 0.0;
    };
    std::vector<double> cell_net;
    std::vector<Atom> atoms;
    std::vector<Edge> edges;
    std::vector<Rim> rims;
    BruteAtomRule rule = BruteAtomRule::closure_vs_interior;
    double C = 1.0;

    double eval(const std::vector<char>& in) const {
        double score = 0.0;
        for (size_t i = 0; i < cell_net.size(); ++i) {
            if (in[i]) score += cell_net[i];
        }
        for (const auto& a : atoms) {
            const bool in_i = in[static_cast<size_t>(a.i)] != 0;
            const bool in_j = in[static_cast<size_t>(a.j)] != 0;
            if (rule == BruteAtomRule::closure_vs_interior) {
                if (in_i || in_j) score += a.closure;
                if (in_i && in_j) score -= a.interior;
            } else {
                score += (a.closure - a.interior) * 0.5 *
                         (static_cast<double>(in_i) + static_cast<double>(in_j));
            }
        }
        double per = 0.0;
        for (const auto& e : edges) {
            const bool in_i = in[static_cast<size_t>(e.i)] != 0;
            const bool in_j = in[static_cast<size_t>(e.j)] != 0;
            if (in_i && !in_j) per += e.cost_only_i;
            if (in_j && !in_i) per += e.cost_only_j;
        }
        for (const auto& r : rims) {
            if (in[static_cast<size_t>(r.cell)]) per += r.cost;
        }
        return score - C * per;
    }
};

ScoreContext build_score_context(const ICQuery& query, const GridDomain& dom,
                                 BruteAtomRule rule) {
    query.measure.validate(dom);
    if (query.C < 0.0) throw Error(ErrCode::invalid_input, "score constant must be >= 0");
    if (query.delta > 0.0 && !(query.delta > 0.0)) {
        throw Error(ErrCode::invalid_input, "small-volume mode needs delta > 0");
    }
    const bool forward = query.direction == ICDirection::forward;
    const Integrand per = forward ? query.integrand : query.integrand.mirrored();
    ScoreContext ctx;
    ctx.rule = rule;
    ctx.C = query.C;
    ctx.cell_net.resize(static_cast<size_t>(dom.cell_count()));
    for (int i = 0; i < dom.cell_count(); ++i) {
        const double rho = query.measure.cell_density[static_cast<size_t>(i)];
        ctx.cell_net[static_cast<size_t>(i)] = dom.cell_weight() * (forward ? -rho : rho);
    }
    for (const auto& atom : query.measure.atoms) {
        const auto& e = dom.interior_edges()[static_cast<size_t>(atom.edge)];
        ScoreContext::Atom a;
        a.i = e.i;
        a.j = e.j;
        a.closure = forward ? atom.m_minus : atom.m_plus;
        a.interior = forward ? atom.m_plus : atom.m_minus;
        ctx.atoms.push_back(a);
    }
    const double we = dom.edge_weight();
    for (const auto& e : dom.interior_edges()) {
        ctx.edges.push_back(
            {e.i, e.j, we * per.eval(e.mid, -e.dir), we * per.eval(e.mid, e.dir)});
    }
    for (const auto& b : dom.boundary_edges()) {
        ctx.rims.push_back({b.cell, we * per.eval(b.mid, b.nu_in)});
    }
    return ctx;
}

ICReport exhaustive_search(const ICQuery& query, const GridDomain& dom,
                           const ScoreContext& ctx) {
    const int n = dom.cell_count();
    if (n > 22) {
        throw Error(ErrCode::too_large_for_exhaustive,
                    "exhaustive subset search supports at most 22 cells, got " +
                        std::to_string(n));
    }
    const bool small_volume = query.delta > 0.0;
    ICReport rep;
    rep.exhaustive = true;
    rep.small_volume_mode = small_volume;
    rep.worst_score = 0.0;
    rep.worst_set.assign(static_cast<size_t>(n), 0);
    std::vector<char> in(static_cast<size_t>(n), 0);
    const std::uint32_t total = static_cast<std::uint32_t>(1u) << n;
    for (std::uint32_t mask = 1; mask < total; ++mask) {
        if (small_volume &&
            !(std::popcount(mask) * dom.cell_weight() < query.delta)) {
            continue;
        }
        for (int i = 0; i < n; ++i) in[static_cast<size_t>(i)] = (mask >> i) & 1u;
        const double score = ctx.eval(in);
        if (score > rep.worst_score) {
            rep.worst_score = score;
            rep.worst_set = in;
        }
    }
    const double bar = small_volume ? query.epsilon : 0.0;
    rep.verdict = rep.worst_score > bar ? ICVerdict::violated : ICVerdict::holds;
    return rep;
}

ICReport anneal_search(const ICQuery& query, const GridDomain& dom, const ScoreContext& ctx,
                       const BruteForceOptions& opts) {
    const int n = dom.cell_count();
    const bool small_volume = query.delta > 0.0;
    const auto area_ok = [&](int count) {
        return !small_volume || count * dom.cell_weight() < query.delta;
    };
    ICReport rep;
    rep.exhaustive = false;
    rep.small_volume_mode = small_volume;
    rep.worst_score = 0.0;
    rep.worst_set.assign(static_cast<size_t>(n), 0);
    Rng rng(opts.seed);
    const double t_start = std::max(1.0, query.measure.total_variation(dom));
    const double t_end = 1e-4;
    for (int restart = 0; restart < opts.restarts; ++restart) {
        std::vector<char> in(static_cast<size_t>(n), 0);
        int count = 0;
        double score = 0.0;
        const double cool =
            std::pow(t_end / t_start, 1.0 / std::max(1, opts.steps_per_restart - 1));
        double temp = t_start;
        std::vector<int> flips;
        for (int step = 0; step < opts.steps_per_restart; ++step, temp *= cool) {
            flips.clear();
            const int c = static_cast<int>(rng.next_below(static_cast<size_t>(n)));
            flips.push_back(c);
            if (rng.next_double() < 0.25) {
                const auto [ix, iy] = dom.cell_coords(c);
                const int nbrs[4] = {dom.cell_at(ix - 1, iy), dom.cell_at(ix + 1, iy),
                                     dom.cell_at(ix, iy - 1), dom.cell_at(ix, iy + 1)};
                const char target = in[static_cast<size_t>(c)] ? 0 : 1;
                for (int nbr : nbrs) {
                    if (nbr >= 0 && in[static_cast<size_t>(nbr)] != target) {
                        flips.push_back(nbr);
                    }
                }
            }
            int new_count = count;
            for (int f : flips) {
                in[static_cast<size_t>(f)] ^= 1;
                new_count += in[static_cast<size_t>(f)] ? 1 : -1;
            }
            const double new_score = ctx.eval(in);
            const bool admissible = area_ok(new_count);
            const double gain = new_score - score;
            const bool accept =
                admissible && (gain >= 0.0 || rng.next_double() < std::exp(gain / temp));
            if (accept) {
                score = new_score;
                count = new_count;
                if (score > rep.worst_score) {
                    rep.worst_score = score;
                    rep.worst_set = in;
                }
            } else {
                for (int f : flips) in[static_cast<size_t>(f)] ^= 1;
            }
        }
    }
    const double bar = small_volume ? query.epsilon : 0.0;
    rep.verdict =
        rep.worst_score > bar ? ICVerdict::violated : ICVerdict::inconclusive;
    return rep;
}

}  // namespace

ICReport brute_force_ic(const ICQuery& query, const GridDomain& dom,
                        const BruteForceOptions& opts) {
    const ScoreContext ctx = build_score_context(query, dom, opts.atom_rule);
    if (opts.mode == BruteMode::exhaustive) {
        return exhaustive_search(query, dom, ctx);
    }
    return anneal_search(query, dom, ctx, opts);
}

namespace {

// Saddle-solver workspace for the dual norm. Interval caps per face are
// lambda * [-dn, up]; the polar gauge and the witness TV reuse the same caps.
struct DualWorkspace {
    const GridDomain& dom;
    std::vector<double> c;
    std::vector<double> up_e, dn_e, up_b, dn_b;
    std::vector<double> sigma_e, sigma_b;
    std::vector<double> w, w_prev, div;
    double box = 0.0;

    explicit DualWorkspace(const GridDomain& d) : dom(d) {}

    double tv0(const std::vector<double>& v) const {
        double total = 0.0;
        const auto& edges = dom.interior_edges();
        for (size_t e = 0; e < edges.size(); ++e) {
            const double t = v[static_cast<size_t>(edges[e].j)] -
                             v[static_cast<size_t>(edges[e].i)];
            total += t > 0.0 ? t * up_e[e] : -t * dn_e[e];
        }
        const auto& rim = dom.boundary_edges();
        for (size_t b = 0; b < rim.size(); ++b) {
            const double t = -v[static_cast<size_t>(rim[b].cell)];
            total += t > 0.0 ? t * up_b[b] : -t * dn_b[b];
        }
        return total;
    }

    double witness_ratio(const std::vector<double>& v) const {
        const double den = tv0(v);
        if (!(den > 0.0)) return 0.0;
        double num = 0.0;
        for (size_t i = 0; i < c.size(); ++i) num += c[i] * v[i];
        return num / den;
    }

    // Valid upper bound for any edge field: polar gauge plus the divergence
    // mismatch priced at the box radius.
    double field_bound() const {
        double gauge = 0.0;
        for (size_t e = 0; e < sigma_e.size(); ++e) {
            gauge = std::max(gauge, std::max(sigma_e[e] / up_e[e], -sigma_e[e] / dn_e[e]));
        }
        for (size_t b = 0; b < sigma_b.size(); ++b) {
            gauge = std::max(gauge, std::max(sigma_b[b] / up_b[b], -sigma_b[b] / dn_b[b]));
        }
        double mismatch = 0.0;
        apply_divergence();
        for (size_t i = 0; i < c.size(); ++i) mismatch += std::abs(c[i] - div[i]);
        return gauge + box * mismatch;
    }

    void apply_divergence() const {
        auto& d = const_cast<std::vector<double>&>(div);
        std::fill(d.begin(), d.end(), 0.0);
        const auto& edges = dom.interior_edges();
        for (size_t e = 0; e < edges.size(); ++e) {
            d[static_cast<size_t>(edges[e].i)] -= sigma_e[e];
            d[static_cast<size_t>(edges[e].j)] += sigma_e[e];
        }
        const auto& rim = dom.boundary_edges();
        for (size_t b = 0; b < rim.size(); ++b) {
            d[static_cast<size_t>(rim[b].cell)] -= sigma_b[b];
        }
    }
};

}  // namespace

DualNormReport dual_norm(const DiscreteMeasure& mu, const GridDomain& dom,
                         const Integrand& phi, const DualNormOptions& opts) {
    mu.validate(dom);
    if (opts.max_iters < 1 || !(opts.tol > 0.0)) {
        throw Error(ErrCode::invalid_input, "dual norm needs max_iters >= 1 and tol > 0");
    }
    DualWorkspace ws(dom);
    const int n = dom.cell_count();
    ws.c.assign(static_cast<size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        ws.c[static_cast<size_t>(i)] =
            dom.cell_weight() * mu.cell_density[static_cast<size_t>(i)];
    }
    DualNormReport rep;
    for (const auto& atom : mu.atoms) {
        const auto& e = dom.interior_edges()[static_cast<size_t>(atom.edge)];
        const double half = 0.5 * (atom.m_plus - atom.m_minus);
        ws.c[static_cast<size_t>(e.i)] += half;
        ws.c[static_cast<size_t>(e.j)] += half;
        if (std::min(atom.m_plus, atom.m_minus) > 0.0) rep.singular_pair_required = true;
    }
    double c_norm1 = 0.0;
    for (double v : ws.c) c_norm1 += std::abs(v);
    if (c_norm1 == 0.0) {
        rep.converged = true;
        return rep;
    }
    if (!(phi.alpha() > 0.0)) {
        throw Error(ErrCode::invalid_input, "integrand lower comparability constant must be > 0");
    }
    const double we = dom.edge_weight();
    ws.box = 1.0 / (phi.alpha() * we);
    const auto& edges = dom.interior_edges();
    const auto& rim = dom.boundary_edges();
    ws.up_e.resize(edges.size());
    ws.dn_e.resize(edges.size());
    for (size_t e = 0; e < edges.size(); ++e) {
        ws.up_e[e] = we * phi.eval(edges[e].mid, edges[e].dir);
        ws.dn_e[e] = we * phi.eval(edges[e].mid, -edges[e].dir);
    }
    ws.up_b.resize(rim.size());
    ws.dn_b.resize(rim.size());
    for (size_t b = 0; b < rim.size(); ++b) {
        ws.up_b[b] = we * phi.eval(rim[b].mid, -rim[b].nu_in);
        ws.dn_b[b] = we * phi.eval(rim[b].mid, rim[b].nu_in);
    }
    ws.sigma_e.assign(edges.size(), 0.0);
    ws.sigma_b.assign(rim.size(), 0.0);
    ws.w.assign(static_cast<size_t>(n), 0.0);
    ws.w_prev = ws.w;
    ws.div.assign(static_cast<size_t>(n), 0.0);

    // Seed lower bound from single-cell witnesses.
    std::vector<double> tv_plus(static_cast<size_t>(n), 0.0);
    std::vector<double> tv_minus(static_cast<size_t>(n), 0.0);
    for (size_t e = 0; e < edges.size(); ++e) {
        tv_plus[static_cast<size_t>(edges[e].i)] += ws.dn_e[e];
        tv_minus[static_cast<size_t>(edges[e].i)] += ws.up_e[e];
        tv_plus[static_cast<size_t>(edges[e].j)] += ws.up_e[e];
        tv_minus[static_cast<size_t>(edges[e].j)] += ws.dn_e[e];
    }
    for (size_t b = 0; b < rim.size(); ++b) {
        tv_plus[static_cast<size_t>(rim[b].cell)] += ws.dn_b[b];
        tv_minus[static_cast<size_t>(rim[b].cell)] += ws.up_b[b];
    }
    double lower = 0.0;
    for (int i = 0; i < n; ++i) {
        const size_t si = static_cast<size_t>(i);
        if (tv_plus[si] > 0.0) lower = std::max(lower, ws.c[si] / tv_plus[si]);
        if (tv_minus[si] > 0.0) lower = std::max(lower, -ws.c[si] / tv_minus[si]);
    }
    double upper = ws.box * c_norm1;

    const double tau = 0.999 / std::sqrt(8.0);
    int iters = 0;
    int leg_budget = 400;
    const auto bracket_ok = [&] { return upper - lower <= opts.tol * std::max(1.0, upper); };
    while (!bracket_ok() && iters < opts.max_iters) {
        const double lam = 0.5 * (lower + upper);
        bool moved = false;
        for (int step = 0; step < leg_budget && iters < opts.max_iters; ++step, ++iters) {
            for (size_t e = 0; e < edges.size(); ++e) {
                const double wb_j = 2.0 * ws.w[static_cast<size_t>(edges[e].j)] -
                                    ws.w_prev[static_cast<size_t>(edges[e].j)];
                const double wb_i = 2.0 * ws.w[static_cast<size_t>(edges[e].i)] -
                                    ws.w_prev[static_cast<size_t>(edges[e].i)];
                ws.sigma_e[e] = std::clamp(ws.sigma_e[e] + tau * (wb_j - wb_i),
                                           -lam * ws.dn_e[e], lam * ws.up_e[e]);
            }
            for (size_t b = 0; b < rim.size(); ++b) {
                const double wb = 2.0 * ws.w[static_cast<size_t>(rim[b].cell)] -
                                  ws.w_prev[static_cast<size_t>(rim[b].cell)];
                ws.sigma_b[b] = std::clamp(ws.sigma_b[b] - tau * wb, -lam * ws.dn_b[b],
                                           lam * ws.up_b[b]);
            }
            ws.apply_divergence();
            ws.w_prev = ws.w;
            for (int i = 0; i < n; ++i) {
                const size_t si = static_cast<size_t>(i);
                ws.w[si] = std::clamp(ws.w[si] - tau * (ws.div[si] - ws.c[si]), -ws.box, ws.box);
            }
            if ((step & 15) == 15 || step + 1 == leg_budget) {
                const double cand_low = ws.witness_ratio(ws.w);
                if (cand_low > lower) {
                    lower = cand_low;
                    moved = true;
                }
                const double cand_up = ws.field_bound();
                if (cand_up < upper) {
                    upper = cand_up;
                    moved = true;
                }
                if (lower > lam || upper <= lam * (1.0 + 1e-6) || bracket_ok()) break;
            }
        }
        if (!moved) leg_budget = std::min(leg_budget * 2, 20000);
    }
    rep.value = upper;
    rep.lower = lower;
    rep.residual = upper - lower;
    rep.iterations = iters;
    rep.converged = bracket_ok();
    if (!rep.converged) {
        throw Error(ErrCode::not_converged,
                    "dual norm bracket residual " + std::to_string(rep.residual) + " after " +
                        std::to_string(iters) + " iterations");
    }
    return rep;
}

ICVerdict dual_verdict(const DualNormReport& rep, double C, double tol) {
    if (C < 0.0) throw Error(ErrCode::invalid_input, "verdict constant must be >= 0");
    const double upper_thr = C * (1.0 + 1e-3) + tol;
    const double lower_thr = C * (1.0 - 1e-3) - tol;
    if (rep.value <= std::max(lower_thr, 1e-12)) return ICVerdict::holds;
    if (rep.lower > upper_thr) return ICVerdict::violated;
    return ICVerdict::inconclusive;
}

GlobalCheckReport global_inequality_check(const std::vector<GridFunction>& samples,
                                          const ICQuery& query, const GridDomain& dom) {
    query.measure.validate(dom);
    const bool forward = query.direction == ICDirection::forward;
    const Integrand per = forward ? query.integrand : query.integrand.mirrored();
    std::vector<double> c(static_cast<size_t>(dom.cell_count()), 0.0);
    for (int i = 0; i < dom.cell_count(); ++i) {
        c[static_cast<size_t>(i)] =
            dom.cell_weight() * query.measure.cell_density[static_cast<size_t>(i)];
    }
    for (const auto& atom : query.measure.atoms) {
        const auto& e = dom.interior_edges()[static_cast<size_t>(atom.edge)];
        const double half = 0.5 * (atom.m_plus - atom.m_minus);
        c[static_cast<size_t>(e.i)] += half;
        c[static_cast<size_t>(e.j)] += half;
    }
    GlobalCheckReport rep;
    for (const auto& sample : samples) {
        if (sample.values.size() != static_cast<size_t>(dom.cell_count())) {
            throw Error(ErrCode::invalid_input, "sample size does not match the grid");
        }
        GridFunction v;
        v.values = sample.values;
        v.datum.assign(dom.boundary_edges().size(), 0.0);
        double lhs = 0.0;
        for (size_t i = 0; i < c.size(); ++i) {
            lhs += (forward ? -c[i] : c[i]) * v.values[i];
        }
        const double rhs = query.C * tv_phi(v, dom, per);
        rep.max_violation = std::max(rep.max_violation, lhs - rhs);
        ++rep.samples;
        if (lhs - rhs > 1e-9 * (1.0 + std::abs(rhs))) rep.consistent = false;
    }
    return rep;
}

}  // namespace anisotv
