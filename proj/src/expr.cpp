#include "anisotv/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <vector>

namespace anisotv {

namespace {

using Fn = std::function<double(const Vec2&)>;

struct Parser {
    const std::string& text;
    size_t pos = 0;

    explicit Parser(const std::string& t) : text(t) {}

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }

    bool eat(char c) {
        skip_ws();
        if (pos < text.size() && text[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw Error(ErrCode::invalid_input,
                    "expression error at offset " + std::to_string(pos) + ": " + what);
    }

    Fn parse_expression() {
        Fn left = parse_term();
        for (;;) {
            if (eat('+')) {
                Fn right = parse_term();
                left = [left, right](const Vec2& p) { return left(p) + right(p); };
            } else if (eat('-')) {
                Fn right = parse_term();
                left = [left, right](const Vec2& p) { return left(p) - right(p); };
            } else {
                return left;
            }
        }
    }

    Fn parse_term() {
        Fn left = parse_factor();
        for (;;) {
            if (eat('*')) {
                Fn right = parse_factor();
                left = [left, right](const Vec2& p) { return left(p) * right(p); };
            } else if (eat('/')) {
                Fn right = parse_factor();
                left = [left, right](const Vec2& p) { return left(p) / right(p); };
            } else {
                return left;
            }
        }
    }

    Fn parse_factor() {
        if (eat('-')) {
            Fn inner = parse_factor();
            return [inner](const Vec2& p) { return -inner(p); };
        }
        return parse_primary();
    }

    Fn parse_primary() {
        skip_ws();
        if (pos >= text.size()) fail("unexpected end of input");
        const char c = text[pos];
        if (c == '(') {
            ++pos;
            Fn inner = parse_expression();
            if (!eat(')')) fail("expected ')'");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const char* start = text.c_str() + pos;
            char* end = nullptr;
            const double value = std::strtod(start, &end);
            if (end == start) fail("malformed number");
            pos += static_cast<size_t>(end - start);
            return [value](const Vec2&) { return value; };
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            const size_t start = pos;
            while (pos < text.size() &&
                   (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_')) {
                ++pos;
            }
            const std::string name = text.substr(start, pos - start);
            if (name == "x") return [](const Vec2& p) { return p.x; };
            if (name == "y") return [](const Vec2& p) { return p.y; };
            if (name == "r") return [](const Vec2& p) { return norm(p); };
            return parse_call(name);
        }
        fail(std::string("unexpected character '") + c + "'");
    }

    Fn parse_call(const std::string& name) {
        if (!eat('(')) fail("unknown symbol '" + name + "'");
        std::vector<Fn> args;
        args.push_back(parse_expression());
        while (eat(',')) args.push_back(parse_expression());
        if (!eat(')')) fail("expected ')'");
        const auto need = [&](size_t n) {
            if (args.size() != n) {
                fail("'" + name + "' takes " + std::to_string(n) + " argument(s)");
            }
        };
        if (name == "abs") {
            need(1);
            Fn a = args[0];
            return [a](const Vec2& p) { return std::abs(a(p)); };
        }
        if (name == "sgn") {
            need(1);
            Fn a = args[0];
            return [a](const Vec2& p) {
                const double v = a(p);
                return static_cast<double>(v > 0.0) - static_cast<double>(v < 0.0);
            };
        }
        if (name == "sqrt") {
            need(1);
            Fn a = args[0];
            return [a](const Vec2& p) { return std::sqrt(a(p)); };
        }
        if (name == "exp") {
            need(1);
            Fn a = args[0];
            return [a](const Vec2& p) { return std::exp(a(p)); };
        }
        if (name == "log") {
            need(1);
            Fn a = args[0];
            return [a](const Vec2& p) { return std::log(a(p)); };
        }
        if (name == "pow") {
            need(2);
            Fn a = args[0];
            Fn b = args[1];
            return [a, b](const Vec2& p) { return std::pow(a(p), b(p)); };
        }
        if (name == "min") {
            need(2);
            Fn a = args[0];
            Fn b = args[1];
            return [a, b](const Vec2& p) { return std::min(a(p), b(p)); };
        }
        if (name == "max") {
            need(2);
            Fn a = args[0];
            Fn b = args[1];
            return [a, b](const Vec2& p) { return std::max(a(p), b(p)); };
        }
        fail("unknown function '" + name + "'");
    }
};

}  // namespace

std::function<double(const Vec2&)> compile_expr(const std::string& text) {
    Parser parser(text);
    Fn fn = parser.parse_expression();
    parser.skip_ws();
    if (parser.pos != text.size()) parser.fail("trailing input");
    return fn;
}

}  // namespace anisotv
