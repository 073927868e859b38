#ifndef ANISOTV_INTEGRAND_HPP
#define ANISOTV_INTEGRAND_HPP

#include <functional>
#include <memory>
#include <string>

#include "anisotv/core.hpp"

namespace anisotv {

// Empirical structure probe for a surface-energy integrand.  All quantities
// are measured on random samples; exact integrands report residuals at
// floating-point noise level.
struct StructureReport {
    double homogeneity_residual = 0.0; // max |phi(x,t xi) - t phi(x,xi)| / (1 + t|xi|)
    double alpha_hat = 0.0;            // min of phi(x,u) over sampled unit u
    double beta_hat = 0.0;             // max of phi(x,u) over sampled unit u
    double triangle_violation = 0.0;   // max of phi(x,xi+tau) - phi(x,xi) - phi(x,tau)
    double evenness_residual = 0.0;    // max |phi(x,xi) - phi(x,-xi)|; near zero certifies evenness
    int samples = 0;
};

// Direction-dependent surface energy density phi(x, xi).
//
// Contract: phi(x, .) is positively 1-homogeneous, convex, and comparable to
// the Euclidean norm with constants alpha, beta: alpha|xi| <= phi(x,xi) <=
// beta|xi|.  The spatial argument is kept in every rule signature even though
// the built-in catalog is x-independent; custom integrands may use it.
class Integrand {
public:
    using Rule = std::function<double(const Vec2& x, const Vec2& xi)>;

    Integrand(std::string id, Rule eval, double alpha, double beta, bool even,
              Rule polar = nullptr);

    const std::string& id() const { return id_; }
    double alpha() const { return alpha_; }
    double beta() const { return beta_; }
    bool is_even() const { return even_; }
    bool has_polar_rule() const { return static_cast<bool>(polar_); }

    double eval(const Vec2& x, const Vec2& xi) const { return eval_(x, xi); }

    // Dual density: polar(x, q) = sup { dot(q, xi) : phi(x, xi) <= 1 }.
    // Uses the closed-form rule when available, otherwise a golden-angle
    // direction sweep (4096 directions, one golden-section refinement pass,
    // absolute tolerance 1e-6).  Throws SamplingBudgetExceeded when the sweep
    // meets a direction where phi nearly vanishes, since the supremum is then
    // unbounded and no sampling budget can certify a value.
    double polar(const Vec2& x, const Vec2& q) const;

    // Reflected integrand x -> phi(x, -xi).  Applying it twice restores the
    // original rule and id.
    Integrand mirrored() const;

    static Integrand isotropic();
    // Euclidean norm on the upper half-plane of directions, l1 norm on the
    // lower half-plane (the two branches agree on the axis xi.y = 0).
    static Integrand quadrant();
    static Integrand weighted_l1(double c1, double c2);

private:
    std::string id_;
    Rule eval_;
    double alpha_;
    double beta_;
    bool even_;
    Rule polar_;
};

// Direction-sweep evaluation of the polar, independent of any closed-form
// rule.  Exposed so tests can cross-check closed forms against the sweep.
double polar_by_direction_sweep(const Integrand& phi, const Vec2& x, const Vec2& q);

StructureReport check_structure(const Integrand& phi, int sample_count, std::uint64_t seed);

} // namespace anisotv

#endif
