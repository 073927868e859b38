#pragma once

#include <functional>
#include <string>

#include "anisotv/core.hpp"

namespace anisotv {

// Compiles a scalar expression of a plane point into a callable. Available
// symbols: coordinates x and y, the radius r = |(x,y)|, numeric literals,
// operators + - * / with unary minus, parentheses, and the functions
// abs, sgn, sqrt, exp, log, pow, min, max. Unknown symbols are rejected.
std::function<double(const Vec2&)> compile_expr(const std::string& text);

}  // namespace anisotv
