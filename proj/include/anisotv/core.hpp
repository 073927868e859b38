#ifndef ANISOTV_CORE_HPP
#define ANISOTV_CORE_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace anisotv {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double xx, double yy) : x(xx), y(yy) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator-() const { return {-x, -y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator/(double s) const { return {x / s, y / s}; }
};

inline Vec2 operator*(double s, const Vec2& v) { return {s * v.x, s * v.y}; }
inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Vec2& v) { return std::hypot(v.x, v.y); }
inline double norm1(const Vec2& v) { return std::fabs(v.x) + std::fabs(v.y); }
// Rotation by +90 degrees; for a CCW-oriented edge direction this points
// into the enclosed region (left-hand side).
inline Vec2 rot90(const Vec2& v) { return {-v.y, v.x}; }
inline Vec2 normalized(const Vec2& v) {
    double n = norm(v);
    return n > 0.0 ? v / n : Vec2{0.0, 0.0};
}

inline double pos_part(double t) { return t > 0.0 ? t : 0.0; }
inline double neg_part(double t) { return t < 0.0 ? -t : 0.0; }

// Error taxonomy shared by all modules.  The CLI maps codes to process exit
// codes (config -> 2, non-convergence -> 3).
enum class ErrCode {
    config,
    no_polar_rule,
    sampling_budget_exceeded,
    ambiguous_incidence,
    quadrature_non_convergence,
    level_out_of_range,
    too_large_for_exhaustive,
    not_converged,
    too_large,
    unknown_scenario,
    unbounded_detected,
    invalid_input,
};

class Error : public std::runtime_error {
public:
    Error(ErrCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrCode code() const { return code_; }

private:
    ErrCode code_;
};

inline const char* err_code_name(ErrCode c) {
    switch (c) {
        case ErrCode::config: return "ConfigError";
        case ErrCode::no_polar_rule: return "NoPolarRule";
        case ErrCode::sampling_budget_exceeded: return "SamplingBudgetExceeded";
        case ErrCode::ambiguous_incidence: return "AmbiguousIncidence";
        case ErrCode::quadrature_non_convergence: return "QuadratureNonConvergence";
        case ErrCode::level_out_of_range: return "LevelOutOfRange";
        case ErrCode::too_large_for_exhaustive: return "TooLargeForExhaustive";
        case ErrCode::not_converged: return "NotConverged";
        case ErrCode::too_large: return "TooLarge";
        case ErrCode::unknown_scenario: return "UnknownScenario";
        case ErrCode::unbounded_detected: return "UnboundedDetected";
        case ErrCode::invalid_input: return "InvalidInput";
    }
    return "Unknown";
}

// Deterministic 64-bit PRNG (splitmix64 seeded xoshiro-style scrambler is
// overkill here; splitmix64 alone has more than enough quality for property
// sampling and annealing moves, and its one-word state keeps runs byte
// reproducible across platforms).
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0x9e3779b97f4a7c15ull) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform in [0,1).
    double next_double() { return (next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in [lo,hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // Uniform integer in [0, n).
    std::uint64_t next_below(std::uint64_t n) { return n == 0 ? 0 : next_u64() % n; }

private:
    std::uint64_t state_;
};

constexpr double kPi = 3.14159265358979323846;

// Geometric predicate tolerance: points/curves closer than this to a boundary
// are treated as lying on it.
constexpr double kIncidenceTol = 1e-12;

} // namespace anisotv

#endif
