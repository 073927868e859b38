#pragma once

// Minimal always-on test harness shared by the test executables.
// REQUIRE never compiles out; a failure prints [FAIL] with location and
// exits with status 1 so ctest flags the binary.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>

namespace testsupport {

inline int g_checks = 0;

inline void fail_exit(const char* file, int line, const std::string& msg) {
    std::fprintf(stderr, "[FAIL] %s:%d %s\n", file, line, msg.c_str());
    std::exit(1);
}

inline void check_true(bool ok, const char* file, int line, const char* expr) {
    ++g_checks;
    if (!ok) fail_exit(file, line, std::string("condition failed: ") + expr);
}

inline void check_near(double a, double b, double tol, const char* file, int line,
                       const char* ea, const char* eb) {
    ++g_checks;
    if (!(std::isfinite(a) && std::isfinite(b))) {
        fail_exit(file, line, std::string("non-finite operand in ") + ea + " ~ " + eb);
    }
    if (std::abs(a - b) > tol) {
        char buf[256];
        std::snprintf(buf, sizeof(buf), "%s = %.17g vs %s = %.17g (diff %.3g > tol %.3g)",
                      ea, a, eb, b, std::abs(a - b), tol);
        fail_exit(file, line, buf);
    }
}

template <typename Fn>
inline void check_throws(Fn&& fn, const char* file, int line, const char* what) {
    ++g_checks;
    bool threw = false;
    try {
        fn();
    } catch (...) {
        threw = true;
    }
    if (!threw) fail_exit(file, line, std::string("expected exception: ") + what);
}

inline void pass_line(const char* name) {
    std::printf("[ ok ] %s\n", name);
    std::fflush(stdout);
}

inline int summary(const char* suite) {
    std::printf("%s: all checks passed (%d assertions)\n", suite, g_checks);
    return 0;
}

}  // namespace testsupport

#define REQUIRE(cond) ::testsupport::check_true((cond), __FILE__, __LINE__, #cond)
#define REQUIRE_NEAR(a, b, tol) ::testsupport::check_near((a), (b), (tol), __FILE__, __LINE__, #a, #b)
#define REQUIRE_THROWS(stmt) \
    ::testsupport::check_throws([&] { stmt; }, __FILE__, __LINE__, #stmt)
#define TEST_DONE(name) ::testsupport::pass_line(name)
