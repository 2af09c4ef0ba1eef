#pragma once

#include <optional>
#include <string_view>

namespace fufs {

// Single-shot estimator of S'_{N,M}(theta), T'_{N,M}(theta) and Fu's Fs.
//
// The expansion is written for S'_{n+1,m+1}; user-facing counts (N sequences,
// M alleles) map to n = N - 1, m = M - 1. The functions phi, chi, solve_saddle,
// solve_tau and correction_term below all take these shifted indices.
//
//   phi(z) = ln Gamma(z+n+1) - ln Gamma(z+1) - m ln z     saddle z0: phi'(z0) = 0
//   chi(t) = n ln(1+t) - m ln t                           minimum t0 = m/(n-m)
//   tau:  chi(tau) - chi(t0) = phi(theta) - phi(z0),  sign(tau - t0) = sign(theta - z0)
//
//   S' ~ I_{tau/(1+tau)}(m, n-m+1) + R',   T' ~ I_{1/(1+tau)}(n-m+1, m) - R'
//   R' ~ exp(-chi(tau)) C(n, m-1) g(t0),   g(t0) = f(t0) - 1/(t0 - tau)
//   f(t0) = sqrt(chi''(t0) / phi''(z0)) / (z0 - theta)

enum class Branch { SBranch, TBranch, Coalesced };
enum class Method { Asymptotic, Exact, ClosedForm };

std::string_view to_string(Branch branch);
std::string_view to_string(Method method);

struct ParameterTriple {
    int n_seq = 0;      // N >= 2
    int m_alleles = 0;  // 1 <= M <= N
    double theta = 0.0;
};

/// Throws DomainError unless 2 <= N, 1 <= M <= N and theta is positive and finite.
void validate(const ParameterTriple& params);

double phi(double z, int n, int m);
double phi_prime(double z, int n, int m);
double phi_second(double z, int n, int m);

double chi(double t, int n, int m);
double chi_prime(double t, int n, int m);
double chi_second(double t, int n, int m);

/// t0 = m / (n - m).
double chi_minimum(int n, int m);

/// Positive zero of phi'. Requires 1 <= m < n.
double solve_saddle(int n, int m);

/// phi(theta) - phi(z0), accurate also when theta is close to z0.
double phi_drop(double theta, double z0, int n, int m);

/// chi(t) - chi(t0) written without cancellation near t0.
double chi_drop(double t, int n, int m);

/// Root of chi(tau) - chi(t0) = phi(theta) - phi(z0) on the branch with
/// sign(tau - t0) = sign(theta - z0). Returns t0 exactly when theta == z0.
double solve_tau(int n, int m, double theta, double z0);

/// Real-valued allele count m0 at which z0(n, m0) = theta, i.e. the transition
/// value in m: m0 = theta (psi(theta+n+1) - psi(theta+1)). Diagnostic only.
double transition_alleles(int n, double theta);

struct SaddleContext {
    int n = 0;  // N - 1
    int m = 0;  // M - 1
    double z0 = 0.0;
    double t0 = 0.0;
    double tau = 0.0;
    double phi_drop = 0.0;  // phi(theta) - phi(z0)
    double chi_tau = 0.0;
    double phi_pp_z0 = 0.0;
    double chi_pp_t0 = 0.0;
    Branch branch = Branch::SBranch;
};

struct EstimatorOptions {
    /// |tau - t0| <= threshold * max(t0, 1) counts as coalesced.
    double coalescence_threshold = 1e-4;
    /// Use the exact oracle for coalesced or failed corrections when n <= cap.
    bool exact_fallback = true;
    int fallback_cap = 2000;
    /// 0 selects default_oracle_bits().
    int oracle_bits = 0;
};

/// Steps 1 and 2: saddle point, tau and the curvatures used by the correction.
SaddleContext make_context(int n, int m, double theta,
                           const EstimatorOptions& options = {});

struct Correction {
    double value = 0.0;          // R'
    double log_magnitude = 0.0;  // ln |R'|
    int sign = 0;
    double g = 0.0;              // g(t0)
};

/// First-order correction R'. Returns nullopt when tau and t0 coalesce
/// (branch == Coalesced); use coalesced_correction there.
std::optional<Correction> correction_term(const SaddleContext& ctx, double theta);

/// R' inside the coalescence zone: g is interpolated linearly in theta between
/// two probes placed symmetrically about z0 just outside the zone.
Correction coalesced_correction(const SaddleContext& ctx, double theta,
                                const EstimatorOptions& options = {});

/// S' from one branch formula regardless of where theta lies: SBranch gives
/// I_{tau/(1+tau)}(m, n-m+1) + R', TBranch gives 1 - [I_{1/(1+tau)}(n-m+1, m) - R'].
/// The correction comes from the coalescence path when ctx is coalesced.
double s_prime_by_formula(const SaddleContext& ctx, double theta, Branch formula,
                          const EstimatorOptions& options = {});

struct FsResult {
    double s_prime = 0.0;
    double t_prime = 0.0;
    double log_s_prime = 0.0;  // kept separately: S' or T' may underflow
    double log_t_prime = 0.0;
    double fs = 0.0;
    Method method = Method::Asymptotic;
    Branch branch = Branch::SBranch;
    double correction = 0.0;      // R' as added (S branch) or subtracted (T branch)
    double main_term = 0.0;       // incomplete beta of the estimated quantity
    double log_main_term = 0.0;
    bool saturated = false;       // fs is +-infinity
    bool main_term_only = false;  // correction dropped (quality flag)
    std::optional<SaddleContext> saddle;
};

/// Steps 1 to 4. Throws DegenerateError for M == 1.
FsResult estimate(const ParameterTriple& params, const EstimatorOptions& options = {});

}  // namespace fufs
