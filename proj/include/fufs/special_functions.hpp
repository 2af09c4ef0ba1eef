#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

namespace fufs {

// Overflow-safe scalar special functions. All functions are pure and
// thread-safe; invalid arguments raise DomainError.

/// ln Gamma(x), x > 0.
double log_gamma(double x);

/// psi(x) = Gamma'(x)/Gamma(x), x > 0.
double digamma(double x);

/// psi'(x), x > 0.
double trigamma(double x);

/// psi(a + n) - psi(a) for a > 0, n >= 0, without the cancellation of
/// subtracting two large digamma values.
double digamma_difference(double a, double n);

/// psi'(a + n) - psi'(a) for a > 0, n >= 0.
double trigamma_difference(double a, double n);

/// Remainder of Stirling's series: ln Gamma(x) - [(x - 1/2) ln x - x + ln(2 pi)/2].
double stirling_remainder(double x);

/// log1p(x) - x without cancellation for small |x|. Requires x > -1.
double log1pmx(double x);

/// ln (theta)_n = ln Gamma(theta + n) - ln Gamma(theta). Exactly 0 for n == 0.
double log_pochhammer(double theta, std::int64_t n);

/// f_n(theta) = n! / (theta)_n. Uses the forward recursion for n <= 64.
double pochhammer_ratio(double theta, std::int64_t n);

/// ln C(n, k); -infinity when k < 0 or k > n.
double log_binomial(std::int64_t n, std::int64_t k);

struct BetaParams {
    double p;
    double q;
    double x;
};

/// Regularized incomplete beta I_x(p, q) by continued fraction.
double inc_beta(const BetaParams& params);

/// ln I_x(p, q). `y` must equal 1 - x; passing it separately keeps full
/// relative accuracy when x is close to 1.
double log_inc_beta(double p, double q, double x, double y);
double log_inc_beta(const BetaParams& params);

/// (1 + tau)^-n * sum_{j=m}^{n} C(n, j) tau^j, summed in log space. Equal to
/// I_{tau/(1+tau)}(m, n - m + 1); used as the integer-parameter oracle.
double inc_beta_binomial_sum(std::int64_t m, std::int64_t n, double tau);

/// ln of the sum above.
double log_inc_beta_binomial_sum(std::int64_t m, std::int64_t n, double tau);

/// ln of (1 + tau)^-n * sum_{j=0}^{m-1} C(n, j) tau^j, i.e. of
/// I_{1/(1+tau)}(n - m + 1, m).
double log_inc_beta_binomial_sum_lower(std::int64_t m, std::int64_t n, double tau);

/// ln(sum exp(values)) over a range, -infinity for an empty range.
template <typename Range>
double log_sum_exp(const Range& values) {
    double top = -std::numeric_limits<double>::infinity();
    for (double v : values) top = std::max(top, v);
    if (!std::isfinite(top)) return top;
    double sum = 0.0;
    for (double v : values) sum += std::exp(v - top);
    return top + std::log(sum);
}

}  // namespace fufs
