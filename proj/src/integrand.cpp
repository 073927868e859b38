#include "anisotv/integrand.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace anisotv {

namespace {

constexpr double kDegenerateTol = 1e-12;

// Maximizes ratio(theta) = dot(q, u(theta)) / phi(x, u(theta)) over the unit
// circle by a quasi-uniform golden-angle sweep followed by one golden-section
// refinement around the best sampled direction.
double sweep_polar(const std::function<double(double)>& ratio, double q_norm) {
    const int kDirections = 4096;
    const double golden_angle = kPi * (3.0 - std::sqrt(5.0));

    double best_theta = 0.0;
    double best = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < kDirections; ++k) {
        const double theta = std::fmod(k * golden_angle, 2.0 * kPi);
        const double r = ratio(theta);
        if (r > best) {
            best = r;
            best_theta = theta;
        }
    }

    // Local refinement.  Bracket two sweep spacings on each side; ratio is
    // continuous, so on this small bracket golden-section converges to the
    // local (= sampled global) maximizer well within the 1e-6 tolerance.
    const double spacing = 2.0 * kPi / kDirections;
    double a = best_theta - 2.0 * spacing;
    double b = best_theta + 2.0 * spacing;
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = ratio(x1);
    double f2 = ratio(x2);
    const double tol = 1e-9 / (1.0 + q_norm);
    while (b - a > tol) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = ratio(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = ratio(x1);
        }
    }
    return std::max({best, f1, f2});
}

} // namespace

Integrand::Integrand(std::string id, Rule eval, double alpha, double beta, bool even,
                     Rule polar)
    : id_(std::move(id)),
      eval_(std::move(eval)),
      alpha_(alpha),
      beta_(beta),
      even_(even),
      polar_(std::move(polar)) {
    if (!eval_) throw Error(ErrCode::invalid_input, "integrand '" + id_ + "' has no eval rule");
    if (!(alpha_ > 0.0) || !(beta_ >= alpha_))
        throw Error(ErrCode::invalid_input,
                    "integrand '" + id_ + "' needs 0 < alpha <= beta");
}

double Integrand::polar(const Vec2& x, const Vec2& q) const {
    if (polar_) return polar_(x, q);
    return polar_by_direction_sweep(*this, x, q);
}

Integrand Integrand::mirrored() const {
    const std::string suffix = "-mirrored";
    std::string mid;
    if (id_.size() > suffix.size() &&
        id_.compare(id_.size() - suffix.size(), suffix.size(), suffix) == 0) {
        mid = id_.substr(0, id_.size() - suffix.size());
    } else {
        mid = id_ + suffix;
    }
    Rule base = eval_;
    Rule mirrored_eval = [base](const Vec2& x, const Vec2& xi) { return base(x, Vec2{-xi.x, -xi.y}); };
    Rule mirrored_polar;
    if (polar_) {
        Rule basep = polar_;
        // sup over xi of dot(q,xi)/phi(x,-xi) equals the original polar at -q.
        mirrored_polar = [basep](const Vec2& x, const Vec2& q) {
            return basep(x, Vec2{-q.x, -q.y});
        };
    }
    return Integrand(std::move(mid), std::move(mirrored_eval), alpha_, beta_, even_,
                     std::move(mirrored_polar));
}

Integrand Integrand::isotropic() {
    return Integrand(
        "isotropic", [](const Vec2&, const Vec2& xi) { return norm(xi); }, 1.0, 1.0, true,
        [](const Vec2&, const Vec2& q) { return norm(q); });
}

Integrand Integrand::quadrant() {
    auto eval = [](const Vec2&, const Vec2& xi) {
        return xi.y >= 0.0 ? norm(xi) : norm1(xi);
    };
    // The unit ball is the upper unit half-disc glued to the lower half of the
    // l1 ball; its support function is the Euclidean norm for q.y >= 0 and the
    // max norm for q.y <= 0 (both branches give |q.x| on the axis).
    auto polar = [](const Vec2&, const Vec2& q) {
        return q.y >= 0.0 ? norm(q) : std::max(std::abs(q.x), std::abs(q.y));
    };
    return Integrand("quadrant", eval, 1.0, std::sqrt(2.0), false, polar);
}

Integrand Integrand::weighted_l1(double c1, double c2) {
    if (!(c1 > 0.0) || !(c2 > 0.0))
        throw Error(ErrCode::invalid_input, "weighted-l1 coefficients must be positive");
    auto eval = [c1, c2](const Vec2&, const Vec2& xi) {
        return c1 * std::abs(xi.x) + c2 * std::abs(xi.y);
    };
    auto polar = [c1, c2](const Vec2&, const Vec2& q) {
        return std::max(std::abs(q.x) / c1, std::abs(q.y) / c2);
    };
    const double alpha = std::min(c1, c2);
    const double beta = std::hypot(c1, c2);
    return Integrand("weighted-l1", eval, alpha, beta, true, polar);
}

double polar_by_direction_sweep(const Integrand& phi, const Vec2& x, const Vec2& q) {
    const double qn = norm(q);
    if (qn == 0.0) return 0.0;
    auto ratio = [&](double theta) {
        const Vec2 u{std::cos(theta), std::sin(theta)};
        const double denom = phi.eval(x, u);
        if (denom < kDegenerateTol)
            throw Error(ErrCode::sampling_budget_exceeded,
                        "integrand '" + phi.id() +
                            "' nearly vanishes on a unit direction; polar sweep cannot certify a finite value");
        return dot(q, u) / denom;
    };
    return sweep_polar(ratio, qn);
}

StructureReport check_structure(const Integrand& phi, int sample_count, std::uint64_t seed) {
    if (sample_count <= 0)
        throw Error(ErrCode::invalid_input, "check_structure needs a positive sample count");
    Rng rng(seed);
    StructureReport rep;
    rep.samples = sample_count;
    rep.alpha_hat = std::numeric_limits<double>::infinity();
    rep.beta_hat = 0.0;

    for (int s = 0; s < sample_count; ++s) {
        const Vec2 x{rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
        const double a1 = rng.uniform(0.0, 2.0 * kPi);
        const Vec2 u{std::cos(a1), std::sin(a1)};

        const double pu = phi.eval(x, u);
        rep.alpha_hat = std::min(rep.alpha_hat, pu);
        rep.beta_hat = std::max(rep.beta_hat, pu);

        const double mag = rng.uniform(0.0, 3.0);
        const Vec2 xi = u * mag;
        const double t = rng.uniform(0.0, 10.0);
        const double hom =
            std::abs(phi.eval(x, xi * t) - t * phi.eval(x, xi)) / (1.0 + t * norm(xi));
        rep.homogeneity_residual = std::max(rep.homogeneity_residual, hom);

        const double a2 = rng.uniform(0.0, 2.0 * kPi);
        const Vec2 tau = Vec2{std::cos(a2), std::sin(a2)} * rng.uniform(0.0, 3.0);
        const double tri = phi.eval(x, xi + tau) - phi.eval(x, xi) - phi.eval(x, tau);
        rep.triangle_violation = std::max(rep.triangle_violation, tri);

        const double ev = std::abs(phi.eval(x, xi) - phi.eval(x, Vec2{-xi.x, -xi.y}));
        rep.evenness_residual = std::max(rep.evenness_residual, ev);
    }
    return rep;
}

} // namespace anisotv
