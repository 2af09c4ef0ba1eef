#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "fufs/errors.hpp"

namespace fufs::detail {

/// Newton iteration kept inside a sign-change bracket, falling back to
/// bisection whenever the Newton step leaves the bracket or stalls.
/// `fdf(x)` returns {f(x), f'(x)}; f(lo) and f(hi) must differ in sign.
/// Stops when a step falls below rel_tol * max(1, |x|), or one Newton step
/// after a Newton step below 1e-9 * max(1, |x|) (quadratic convergence has
/// then reached the rounding level of f).
template <typename F>
double safeguarded_newton(F&& fdf, double lo, double hi, double x, double rel_tol, int max_iter,
                          const char* who) {
    const double flo = fdf(lo).first;
    const double fhi = fdf(hi).first;
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0)) {
        throw ConvergenceError(std::string(who) + ": root is not bracketed");
    }
    // Orient so that f(neg) < 0 < f(pos).
    double neg = flo < 0.0 ? lo : hi;
    double pos = flo < 0.0 ? hi : lo;
    if (!(x > std::fmin(lo, hi) && x < std::fmax(lo, hi))) x = 0.5 * (lo + hi);
    double step_before = std::fabs(hi - lo);
    double step = step_before;
    auto [f, df] = fdf(x);
    auto inside = [&](double t) {
        return std::isfinite(t) && t > std::fmin(neg, pos) && t < std::fmax(neg, pos);
    };
    for (int iter = 0; iter < max_iter; ++iter) {
        if (f == 0.0) return x;
        if (f < 0.0) {
            neg = x;
        } else {
            pos = x;
        }
        const double newton = df != 0.0 ? x - f / df : std::numeric_limits<double>::quiet_NaN();
        const bool use_newton =
            inside(newton) && std::fabs(2.0 * f) <= std::fabs(step_before * df);
        step_before = step;
        const double next = use_newton ? newton : 0.5 * (neg + pos);
        step = next - x;
        x = next;
        const double scale = std::fmax(1.0, std::fabs(x));
        if (std::fabs(step) <= rel_tol * scale || std::fabs(pos - neg) <= rel_tol * scale) return x;
        std::tie(f, df) = fdf(x);
        if (use_newton && std::fabs(step) <= 1e-9 * scale) {
            if (f == 0.0 || df == 0.0) return x;
            const double polish = x - f / df;
            return inside(polish) ? polish : x;
        }
    }
    throw ConvergenceError(std::string(who) + ": no convergence in " + std::to_string(max_iter) +
                           " iterations");
}

}  // namespace fufs::detail
