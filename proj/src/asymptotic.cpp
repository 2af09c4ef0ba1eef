#include "fufs/asymptotic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "fufs/errors.hpp"
#include "fufs/special_functions.hpp"
#include "fufs/stirling_exact.hpp"
#include "roots.hpp"

namespace fufs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTauMin = 1e-300;
constexpr double kTauMax = 1e300;
constexpr int kMaxIterations = 200;
// Quadrature is used for phi(theta) - phi(z0) when |theta - z0| <= this * z0.
constexpr double kQuadratureSpan = 0.25;

// 10-point Gauss-Legendre nodes and weights on [-1, 1] (positive half).
constexpr std::array<double, 5> kGlNodes = {
    0.1488743389816312108848260, 0.4333953941292471907992659, 0.6794095682990244062343274,
    0.8650633666889845107320967, 0.9739065285171717200779640};
constexpr std::array<double, 5> kGlWeights = {
    0.2955242247147528701738930, 0.2692667193099963550912269, 0.2190863625159820439955349,
    0.1494513491505805931457763, 0.0666713443086881375935688};

void require_interior(int n, int m, const char* who) {
    if (n < 2 || m < 1 || m >= n) {
        throw DomainError(std::string(who) + ": need 1 <= m < n, got n=" + std::to_string(n) +
                          ", m=" + std::to_string(m));
    }
}

void require_positive(double x, const char* who) {
    if (!(x > 0.0)) throw DomainError(std::string(who) + ": argument must be positive, got " + std::to_string(x));
}

}  // namespace

std::string_view to_string(Branch branch) {
    switch (branch) {
        case Branch::SBranch: return "S";
        case Branch::TBranch: return "T";
        case Branch::Coalesced: return "coalesced";
    }
    return "unknown";
}

std::string_view to_string(Method method) {
    switch (method) {
        case Method::Asymptotic: return "asymptotic";
        case Method::Exact: return "exact";
        case Method::ClosedForm: return "closed_form";
    }
    return "unknown";
}

void validate(const ParameterTriple& params) {
    if (params.n_seq < 2) {
        throw DomainError("n must be at least 2, got " + std::to_string(params.n_seq));
    }
    if (params.m_alleles < 1 || params.m_alleles > params.n_seq) {
        throw DomainError("m must satisfy 1 <= m <= n, got m=" + std::to_string(params.m_alleles) +
                          ", n=" + std::to_string(params.n_seq));
    }
    if (!(params.theta > 0.0) || !std::isfinite(params.theta)) {
        throw DomainError("theta must be positive and finite");
    }
}

double phi(double z, int n, int m) {
    require_positive(z, "phi");
    return log_gamma(z + n + 1.0) - log_gamma(z + 1.0) - m * std::log(z);
}

double phi_prime(double z, int n, int m) {
    require_positive(z, "phi_prime");
    return digamma_difference(z + 1.0, n) - m / z;
}

double phi_second(double z, int n, int m) {
    require_positive(z, "phi_second");
    return trigamma_difference(z + 1.0, n) + m / (z * z);
}

double chi(double t, int n, int m) {
    require_positive(t, "chi");
    return n * std::log1p(t) - m * std::log(t);
}

double chi_prime(double t, int n, int m) {
    require_positive(t, "chi_prime");
    return n / (1.0 + t) - m / t;
}

double chi_second(double t, int n, int m) {
    require_positive(t, "chi_second");
    return -n / ((1.0 + t) * (1.0 + t)) + m / (t * t);
}

double chi_minimum(int n, int m) {
    require_interior(n, m, "chi_minimum");
    return static_cast<double>(m) / static_cast<double>(n - m);
}

double solve_saddle(int n, int m) {
    require_interior(n, m, "solve_saddle");
    // phi'(z) -> -infinity as z -> 0 and behaves like (n - m)/z for large z.
    double lo = m * 1e-3;
    while (phi_prime(lo, n, m) >= 0.0) {
        lo *= 1e-3;
        if (lo < 1e-300) throw ConvergenceError("solve_saddle: no lower bracket");
    }
    double hi = std::max(static_cast<double>(m), 1.0);
    while (phi_prime(hi, n, m) <= 0.0) {
        hi *= 2.0;
        if (hi > 1e300) throw ConvergenceError("solve_saddle: no upper bracket");
    }
    // Starting point from psi(z+n+1) - psi(z+1) ~ ln(1 + n/(z + 1/2)), then
    // Newton in v = ln z on the exact equation.
    auto approx = [n, m](double v) {
        const double z = std::exp(v);
        const double h = z + 0.5;
        const double d = std::log1p(n / h) - m / z;
        return std::pair{d, z * (m / (z * z) - n / (h * (h + n)))};
    };
    const double v_lo = std::log(lo);
    const double v_hi = std::log(hi);
    double guess = 0.5 * (v_lo + v_hi);
    if (approx(v_lo).first < 0.0 && approx(v_hi).first > 0.0) {
        guess = detail::safeguarded_newton(approx, v_lo, v_hi, guess, 1e-6, kMaxIterations,
                                           "solve_saddle");
    }
    auto fdf = [n, m](double v) {
        const double z = std::exp(v);
        return std::pair{phi_prime(z, n, m), z * phi_second(z, n, m)};
    };
    const double v = detail::safeguarded_newton(fdf, v_lo, v_hi, guess, 1e-15, kMaxIterations,
                                                "solve_saddle");
    return std::exp(v);
}

double phi_drop(double theta, double z0, int n, int m) {
    if (theta == z0) return 0.0;
    if (std::fabs(theta - z0) <= kQuadratureSpan * z0) {
        const double half = 0.5 * (theta - z0);
        const double mid = 0.5 * (theta + z0);
        double sum = 0.0;
        for (std::size_t i = 0; i < kGlNodes.size(); ++i) {
            const double dz = half * kGlNodes[i];
            sum += kGlWeights[i] * (phi_prime(mid - dz, n, m) + phi_prime(mid + dz, n, m));
        }
        return half * sum;
    }
    return (log_gamma(theta + n + 1.0) - log_gamma(z0 + n + 1.0)) -
           (log_gamma(theta + 1.0) - log_gamma(z0 + 1.0)) - m * std::log(theta / z0);
}

double chi_drop(double t, int n, int m) {
    require_positive(t, "chi_drop");
    const double t0 = chi_minimum(n, m);
    const double u = t - t0;
    // chi(t) - chi(t0) = n ln(1 + u/(1+t0)) - m ln(1 + u/t0); the linear terms
    // cancel because chi'(t0) = 0.
    const double a = u / (1.0 + t0);
    const double b = u / t0;
    const double pa = std::fabs(a) < 0.5 ? log1pmx(a) : std::log((1.0 + t) / (1.0 + t0)) - a;
    const double pb = std::fabs(b) < 0.5 ? log1pmx(b) : std::log(t / t0) - b;
    return n * pa - m * pb;
}

double solve_tau(int n, int m, double theta, double z0) {
    require_interior(n, m, "solve_tau");
    const double t0 = chi_minimum(n, m);
    if (theta == z0) return t0;
    const double drop = phi_drop(theta, z0, n, m);
    if (!(drop > 0.0)) return t0;
    const bool below = theta < z0;
    const double v0 = std::log(t0);
    auto fdf = [n, m, drop, t0](double v) {
        const double t = std::exp(v);
        // d/dv chi(e^v) = t chi'(t) = (n - m)(t - t0)/(1 + t)
        return std::pair{chi_drop(t, n, m) - drop, (n - m) * (t - t0) / (1.0 + t)};
    };
    // Expand away from ln t0 until chi_drop exceeds the target.
    double width = 1.0;
    double outer = below ? v0 - width : v0 + width;
    while (fdf(outer).first <= 0.0) {
        width *= 2.0;
        outer = below ? v0 - width : v0 + width;
        if (outer < std::log(kTauMin) || outer > std::log(kTauMax)) {
            throw ConvergenceError("solve_tau: tau leaves [1e-300, 1e300]");
        }
    }
    const double guess_t = below ? t0 - std::sqrt(2.0 * drop / chi_second(t0, n, m))
                                 : t0 + std::sqrt(2.0 * drop / chi_second(t0, n, m));
    const double guess = guess_t > 0.0 ? std::log(guess_t) : 0.5 * (v0 + outer);
    const double v = detail::safeguarded_newton(fdf, std::min(v0, outer), std::max(v0, outer),
                                                guess, 1e-15, kMaxIterations, "solve_tau");
    return std::exp(v);
}

double transition_alleles(int n, double theta) {
    if (n < 1) throw DomainError("transition_alleles: n must be positive");
    if (!(theta > 0.0) || !std::isfinite(theta)) {
        throw DomainError("transition_alleles: theta must be positive and finite");
    }
    return theta * digamma_difference(theta + 1.0, n);
}

SaddleContext make_context(int n, int m, double theta, const EstimatorOptions& options) {
    require_interior(n, m, "make_context");
    if (!(theta > 0.0) || !std::isfinite(theta)) {
        throw DomainError("make_context: theta must be positive and finite");
    }
    SaddleContext ctx;
    ctx.n = n;
    ctx.m = m;
    ctx.z0 = solve_saddle(n, m);
    ctx.t0 = chi_minimum(n, m);
    ctx.phi_drop = phi_drop(theta, ctx.z0, n, m);
    ctx.tau = solve_tau(n, m, theta, ctx.z0);
    ctx.chi_tau = chi(ctx.tau, n, m);
    ctx.phi_pp_z0 = phi_second(ctx.z0, n, m);
    ctx.chi_pp_t0 = chi_second(ctx.t0, n, m);
    if (std::fabs(ctx.tau - ctx.t0) <= options.coalescence_threshold * std::max(ctx.t0, 1.0)) {
        ctx.branch = Branch::Coalesced;
    } else {
        ctx.branch = theta < ctx.z0 ? Branch::SBranch : Branch::TBranch;
    }
    return ctx;
}

namespace {

double g_value(const SaddleContext& ctx, double theta, double tau) {
    const double f = std::sqrt(ctx.chi_pp_t0 / ctx.phi_pp_z0) / (ctx.z0 - theta);
    return f - 1.0 / (ctx.t0 - tau);
}

Correction assemble(const SaddleContext& ctx, double g) {
    Correction c;
    c.g = g;
    c.sign = g > 0.0 ? 1 : (g < 0.0 ? -1 : 0);
    c.log_magnitude =
        c.sign == 0 ? -kInf : -ctx.chi_tau + log_binomial(ctx.n, ctx.m - 1) + std::log(std::fabs(g));
    c.value = c.sign * std::exp(c.log_magnitude);
    return c;
}

}  // namespace

std::optional<Correction> correction_term(const SaddleContext& ctx, double theta) {
    if (ctx.branch == Branch::Coalesced || ctx.tau == ctx.t0 || theta == ctx.z0) {
        return std::nullopt;
    }
    return assemble(ctx, g_value(ctx, theta, ctx.tau));
}

Correction coalesced_correction(const SaddleContext& ctx, double theta,
                                const EstimatorOptions& options) {
    // Linearised map: tau - t0 ~ (theta - z0) sqrt(phi''/chi'').
    const double dtau = 2.0 * options.coalescence_threshold * std::max(ctx.t0, 1.0);
    double dtheta = dtau * std::sqrt(ctx.chi_pp_t0 / ctx.phi_pp_z0);
    dtheta = std::min(dtheta, 0.5 * ctx.z0);
    const double lo = ctx.z0 - dtheta;
    const double hi = ctx.z0 + dtheta;
    const double g_lo = g_value(ctx, lo, solve_tau(ctx.n, ctx.m, lo, ctx.z0));
    const double g_hi = g_value(ctx, hi, solve_tau(ctx.n, ctx.m, hi, ctx.z0));
    const double w = (theta - lo) / (hi - lo);
    return assemble(ctx, g_lo + w * (g_hi - g_lo));
}

double s_prime_by_formula(const SaddleContext& ctx, double theta, Branch formula,
                          const EstimatorOptions& options) {
    if (formula == Branch::Coalesced) {
        throw DomainError("s_prime_by_formula: formula must be SBranch or TBranch");
    }
    const Correction corr = ctx.branch == Branch::Coalesced
                                ? coalesced_correction(ctx, theta, options)
                                : *correction_term(ctx, theta);
    const double x = ctx.tau / (1.0 + ctx.tau);
    const double y = 1.0 / (1.0 + ctx.tau);
    const int n = ctx.n;
    const int m = ctx.m;
    if (formula == Branch::SBranch) {
        return std::exp(log_inc_beta(m, n - m + 1, x, y)) + corr.value;
    }
    return 1.0 - (std::exp(log_inc_beta(n - m + 1, m, y, x)) - corr.value);
}

namespace {

FsResult closed_form(const ParameterTriple& params) {
    // M == N: S' = theta^N / (theta)_N, i.e. ln S' = -sum_{j<N} ln(1 + j/theta).
    double log_s = 0.0;
    for (int j = 1; j < params.n_seq; ++j) log_s -= std::log1p(j / params.theta);
    FsResult r;
    r.method = Method::ClosedForm;
    r.log_s_prime = log_s;
    r.s_prime = std::exp(log_s);
    r.t_prime = -std::expm1(log_s);
    r.log_t_prime = std::log(r.t_prime);
    r.fs = r.log_s_prime - r.log_t_prime;
    r.branch = r.s_prime <= 0.5 ? Branch::SBranch : Branch::TBranch;
    r.main_term = r.s_prime;
    r.log_main_term = r.log_s_prime;
    r.saturated = !std::isfinite(r.fs);
    return r;
}

void fill_exact(FsResult& r, const ParameterTriple& params, const EstimatorOptions& options) {
    const int bits = options.oracle_bits > 0 ? options.oracle_bits : default_oracle_bits();
    const ExactEvaluation ev = exact_s_prime(params.n_seq, params.m_alleles, params.theta, bits);
    r.method = Method::Exact;
    r.s_prime = ev.s_prime.to_double();
    r.t_prime = ev.t_prime.to_double();
    r.log_s_prime = ev.s_prime.is_zero() ? -kInf : ev.s_prime.log().to_double();
    r.log_t_prime = ev.t_prime.is_zero() ? -kInf : ev.t_prime.log().to_double();
    r.fs = r.log_s_prime - r.log_t_prime;
    r.saturated = !std::isfinite(r.fs);
    r.main_term_only = false;
}

// Completes r from ln of the estimated quantity (S' when s_side, else T').
void fill_from_log(FsResult& r, double log_est, bool s_side) {
    const double est = std::exp(log_est);
    const double other = -std::expm1(log_est);
    const double log_other = std::log(other);
    r.s_prime = s_side ? est : other;
    r.t_prime = s_side ? other : est;
    r.log_s_prime = s_side ? log_est : log_other;
    r.log_t_prime = s_side ? log_other : log_est;
    r.fs = r.log_s_prime - r.log_t_prime;
    r.saturated = !std::isfinite(r.fs);
}

}  // namespace

FsResult estimate(const ParameterTriple& params, const EstimatorOptions& options) {
    validate(params);
    if (params.m_alleles == 1) {
        throw DegenerateError("degenerate: single allele (M = 1 gives S' = 1)");
    }
    if (params.m_alleles == params.n_seq) return closed_form(params);

    const int n = params.n_seq - 1;
    const int m = params.m_alleles - 1;
    const double theta = params.theta;
    const SaddleContext ctx = make_context(n, m, theta, options);

    FsResult r;
    r.saddle = ctx;
    r.branch = ctx.branch;
    const bool s_side = theta <= ctx.z0;
    const double x = ctx.tau / (1.0 + ctx.tau);
    const double y = 1.0 / (1.0 + ctx.tau);
    r.log_main_term = s_side ? log_inc_beta(m, n - m + 1, x, y) : log_inc_beta(n - m + 1, m, y, x);
    r.main_term = std::exp(r.log_main_term);

    const bool can_fallback = options.exact_fallback && n <= options.fallback_cap;
    if (ctx.branch == Branch::Coalesced && can_fallback) {
        fill_exact(r, params, options);
        return r;
    }
    const Correction corr = ctx.branch == Branch::Coalesced
                                ? coalesced_correction(ctx, theta, options)
                                : *correction_term(ctx, theta);
    r.correction = corr.value;

    // S' = I + R' on the S side, T' = I - R' on the T side.
    const int applied = s_side ? corr.sign : -corr.sign;
    const double ratio = applied * std::exp(corr.log_magnitude - r.log_main_term);
    const double log_est = r.log_main_term + std::log1p(ratio);
    if (!(1.0 + ratio > 0.0) || !std::isfinite(ratio) || !(log_est < 0.0)) {
        if (can_fallback) {
            fill_exact(r, params, options);
            return r;
        }
        r.main_term_only = true;
        fill_from_log(r, r.log_main_term, s_side);
        return r;
    }
    fill_from_log(r, log_est, s_side);
    return r;
}

}  // namespace fufs
