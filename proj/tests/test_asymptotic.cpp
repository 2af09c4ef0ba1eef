#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "fufs/asymptotic.hpp"
#include "fufs/bench.hpp"
#include "fufs/big_float.hpp"
#include "fufs/errors.hpp"
#include "fufs/special_functions.hpp"
#include "fufs/stirling_exact.hpp"

using namespace fufs;

namespace {

EstimatorOptions no_fallback() {
    EstimatorOptions o;
    o.exact_fallback = false;
    return o;
}

// Fs from the main term alone, on the branch the estimator chose.
double main_term_fs(const FsResult& r) {
    const double log_other = std::log1p(-r.main_term);
    return r.branch == Branch::TBranch ? log_other - r.log_main_term : r.log_main_term - log_other;
}

}  // namespace

// --- phi, chi -----------------------------------------------------------------

TEST(Phi, SaddleExampleResidual) {
    EXPECT_LT(std::fabs(phi_prime(22.81, 100, 38)), 1e-3);
    EXPECT_EQ(phi(7.5, 100, 38) - phi(7.5, 100, 38), 0.0);
}

TEST(Phi, SecondDerivativeMatchesFiniteDifference) {
    for (auto [n, m] : {std::pair{100, 38}, {24, 19}, {999, 151}}) {
        for (double z : {0.5, 3.0, 22.81, 140.0, 2000.0}) {
            const double h = 1e-4 * z;
            const double fd = (phi_prime(z + h, n, m) - phi_prime(z - h, n, m)) / (2 * h);
            EXPECT_NEAR(phi_second(z, n, m), fd, 1e-6 * std::fabs(fd)) << n << " " << m << " " << z;
        }
    }
}

TEST(Phi, RejectsNonPositive) {
    EXPECT_THROW(phi(0.0, 10, 3), DomainError);
    EXPECT_THROW(phi_prime(-1.0, 10, 3), DomainError);
    EXPECT_THROW(phi_second(0.0, 10, 3), DomainError);
}

TEST(Chi, MinimumExample) {
    EXPECT_DOUBLE_EQ(chi_minimum(100, 38), 19.0 / 31.0);
    EXPECT_NEAR(chi_prime(chi_minimum(100, 38), 100, 38), 0.0, 1e-12);
    const double t0 = chi_minimum(100, 38);
    const double h = 1e-5;
    const double fd = (chi_prime(t0 + h, 100, 38) - chi_prime(t0 - h, 100, 38)) / (2 * h);
    EXPECT_NEAR(chi_second(t0, 100, 38), fd, 1e-8 * std::fabs(fd));
    EXPECT_GT(chi_second(t0, 100, 38), 0.0);
}

TEST(Chi, DropMatchesDirectDifferenceAwayFromMinimum) {
    const double t0 = chi_minimum(99, 74);
    for (double t : {0.01, 0.5, 1.0, 2.9, 10.0, 1e3}) {
        const double direct = chi(t, 99, 74) - chi(t0, 99, 74);
        EXPECT_NEAR(chi_drop(t, 99, 74), direct, 1e-12 * std::max(1.0, std::fabs(chi(t, 99, 74)))) << t;
    }
    EXPECT_EQ(chi_drop(t0, 99, 74), 0.0);
    EXPECT_THROW(chi(0.0, 10, 3), DomainError);
    EXPECT_THROW(chi_second(-2.0, 10, 3), DomainError);
}

// --- saddle point ----------------------------------------------------------------

TEST(SolveSaddle, Anchors) {
    EXPECT_NEAR(solve_saddle(100, 38), 22.81, 0.01);
    EXPECT_NEAR(solve_saddle(100, 75), 137.98, 0.05);
    EXPECT_NEAR(solve_saddle(500, 275), 251.58, 0.05);
}

TEST(SolveSaddle, ResidualAndCurvature) {
    for (int n : {2, 3, 10, 99, 500, 2000, 20000}) {
        for (int m : {1, n / 3, n / 2, n - 1}) {
            if (m < 1 || m >= n) continue;
            const double z0 = solve_saddle(n, m);
            ASSERT_GT(z0, 0.0);
            EXPECT_LE(std::fabs(phi_prime(z0, n, m)), 1e-12 * std::max(1.0, m / z0)) << n << " " << m;
            EXPECT_GT(phi_second(z0, n, m), 0.0);
        }
    }
}

TEST(SolveSaddle, RejectsBoundaryAlleleCounts) {
    EXPECT_THROW(solve_saddle(10, 0), DomainError);
    EXPECT_THROW(solve_saddle(10, 10), DomainError);
}

TEST(TransitionAlleles, InvertsSaddle) {
    for (auto [n, m] : {std::pair{100, 38}, {99, 74}, {500, 275}, {24, 2}}) {
        EXPECT_NEAR(transition_alleles(n, solve_saddle(n, m)), m, 1e-8 * m);
    }
}

// --- tau ---------------------------------------------------------------------

TEST(SolveTau, ReturnsMinimumAtSaddle) {
    const double z0 = solve_saddle(100, 38);
    EXPECT_EQ(solve_tau(100, 38, z0, z0), chi_minimum(100, 38));
}

TEST(SolveTau, DefiningEquationAndBranch) {
    const int n = 100;
    const int m = 38;
    const double z0 = solve_saddle(n, m);
    for (double shift : {-3.0, -1.0, -0.1, 0.05, 0.7, 2.5}) {
        const double theta = z0 * std::exp(shift);
        const double tau = solve_tau(n, m, theta, z0);
        const double drop = phi_drop(theta, z0, n, m);
        EXPECT_NEAR(chi_drop(tau, n, m), drop, 1e-12 * drop) << shift;
        EXPECT_EQ(tau > chi_minimum(n, m), theta > z0);
    }
}

TEST(SolveTau, HighPrecisionResidual) {
    const int n = 99;
    const int m = 74;
    const double theta = 50.0;
    const double z0 = solve_saddle(n, m);
    const double tau = solve_tau(n, m, theta, z0);
    const int bits = 256;
    auto big = [&](double v) { return BigFloat(bits, v); };
    auto big_phi = [&](double z) {
        return (big(z) + big(n + 1.0)).log_gamma() - (big(z) + big(1.0)).log_gamma() - big(m) * big(z).log();
    };
    auto big_chi = [&](const BigFloat& t) { return big(n) * (t + big(1.0)).log() - big(m) * t.log(); };
    const BigFloat t0 = big(m) / big(n - m);
    const BigFloat lhs = big_chi(big(tau)) - big_chi(t0);
    const BigFloat rhs = big_phi(theta) - big_phi(z0);
    EXPECT_LE(std::fabs((lhs - rhs).to_double()), 1e-12 * std::fabs(rhs.to_double()));
    EXPECT_LT(tau, chi_minimum(n, m));
}

// --- correction --------------------------------------------------------------

TEST(Correction, ImprovesSmallestLadderRow) {
    const FsResult r = estimate({25, 20, 9.39}, no_fallback());
    const double ref = exact_fs(25, 20, "9.39", 256);
    const double with = mollified_error(ref, r.fs);
    const double without = mollified_error(ref, main_term_fs(r));
    EXPECT_NEAR(with, 0.33e-3, 0.02e-3);
    EXPECT_GT(without, 3 * with);
}

TEST(Correction, BoundedOnApproachToSaddle) {
    EstimatorOptions opts;
    opts.coalescence_threshold = 0.0;
    for (auto [n, m] : {std::pair{99, 74}, {99, 37}, {499, 274}}) {
        const double z0 = solve_saddle(n, m);
        for (int side : {-1, 1}) {
            double g2 = 0.0;
            for (int k = 2; k <= 6; ++k) {
                const double theta = z0 * (1.0 + side * std::pow(10.0, -k));
                const SaddleContext ctx = make_context(n, m, theta, opts);
                const auto c = correction_term(ctx, theta);
                ASSERT_TRUE(c.has_value());
                ASSERT_TRUE(std::isfinite(c->g));
                if (k == 2) g2 = c->g;
                EXPECT_NEAR(c->g, g2, 0.1 * std::fabs(g2)) << n << " " << m << " k=" << k;
            }
        }
    }
}

TEST(Correction, CoalescedInterpolationMatchesLimit) {
    const int n = 99;
    const int m = 74;
    const double z0 = solve_saddle(n, m);
    EstimatorOptions probe;
    probe.coalescence_threshold = 0.0;
    const double theta_out = z0 * 1.01;
    const double g_limit = correction_term(make_context(n, m, theta_out, probe), theta_out)->g;
    const SaddleContext ctx = make_context(n, m, z0);
    EXPECT_EQ(ctx.branch, Branch::Coalesced);
    EXPECT_FALSE(correction_term(ctx, z0).has_value());
    const Correction c = coalesced_correction(ctx, z0);
    EXPECT_NEAR(c.g, g_limit, 0.05 * std::fabs(g_limit));
}

TEST(Correction, SignMatchesExactDifference) {
    const int n_seq = 100;
    const int m_alleles = 75;
    for (double theta : {20.0, 300.0}) {
        const FsResult r = estimate({n_seq, m_alleles, theta}, no_fallback());
        ASSERT_EQ(r.method, Method::Asymptotic);
        const ExactEvaluation ev = exact_s_prime(n_seq, m_alleles, theta, 256);
        const BigFloat& target = r.branch == Branch::SBranch ? ev.s_prime : ev.t_prime;
        const int exact_sign = (target - BigFloat(256, r.main_term)).sign();
        // T' ~ I - R', so R' carries the opposite sign of T' - I.
        const int expected = r.branch == Branch::SBranch ? exact_sign : -exact_sign;
        EXPECT_EQ(r.correction > 0 ? 1 : -1, expected) << theta;
    }
}

// --- estimate ------------------------------------------------------------------

TEST(Estimate, LadderExamples) {
    EXPECT_NEAR(estimate({25, 20, 9.39}).fs, -6.83168, 5e-5);
    EXPECT_NEAR(estimate({1000, 152, 9.07}).fs, -112.42500, 5e-3);
}

TEST(Estimate, CancellationTripleUsesTBranchAndMatchesOracle) {
    const FsResult r = estimate({100, 31, 39.37});
    EXPECT_EQ(r.method, Method::Asymptotic);
    EXPECT_EQ(r.branch, Branch::TBranch);
    const double ref = exact_fs(100, 31, "39.37", 256);
    EXPECT_LT(mollified_error(ref, r.fs), 1e-3);
    EXPECT_GT(r.s_prime, 0.99);
}

TEST(Estimate, DegenerateAndDomainErrors) {
    EXPECT_THROW(estimate({10, 1, 2.0}), DegenerateError);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double inf = std::numeric_limits<double>::infinity();
    for (const ParameterTriple& p : {ParameterTriple{1, 1, 2.0}, ParameterTriple{10, 0, 2.0},
                                     ParameterTriple{10, 11, 2.0}, ParameterTriple{10, 3, 0.0},
                                     ParameterTriple{10, 3, -1.0}, ParameterTriple{10, 3, nan},
                                     ParameterTriple{10, 3, inf}}) {
        EXPECT_THROW(estimate(p), DomainError) << p.n_seq << " " << p.m_alleles << " " << p.theta;
    }
}

TEST(Estimate, ClosedFormWhenAllAllelesDistinct) {
    for (int n_seq : {2, 5, 40, 300}) {
        for (double theta : {0.3, 7.25, 900.0}) {
            const FsResult r = estimate({n_seq, n_seq, theta});
            EXPECT_EQ(r.method, Method::ClosedForm);
            const double ref = exact_fs(n_seq, n_seq, theta, 256);
            EXPECT_NEAR(r.fs, ref, 1e-12 * std::max(1.0, std::fabs(ref))) << n_seq << " " << theta;
        }
    }
}

TEST(Estimate, RandomTriplesSatisfyInvariants) {
    SplitMix64 rng(20240611);
    int asymptotic = 0;
    for (int i = 0; i < 1000; ++i) {
        const int n_seq = static_cast<int>(rng.uniform_int(3, 500));
        const int m_alleles = static_cast<int>(rng.uniform_int(2, n_seq - 1));
        const double theta = std::exp(rng.uniform(std::log(0.1), std::log(1000.0)));
        const FsResult r = estimate({n_seq, m_alleles, theta});
        const std::string where = std::to_string(n_seq) + " " + std::to_string(m_alleles) + " " +
                                  std::to_string(theta);
        EXPECT_GE(r.s_prime, 0.0) << where;
        EXPECT_LE(r.s_prime, 1.0) << where;
        EXPECT_NEAR(r.s_prime + r.t_prime, 1.0, 1e-12) << where;
        if (r.s_prime > 1e-300 && r.t_prime > 1e-300) {
            EXPECT_NEAR(r.fs, std::log(r.s_prime / r.t_prime), 1e-12 * std::max(1.0, std::fabs(r.fs))) << where;
        }
        if (r.method != Method::Asymptotic) continue;
        ++asymptotic;
        ASSERT_TRUE(r.saddle.has_value());
        const SaddleContext& c = *r.saddle;
        EXPECT_LE(std::fabs(phi_prime(c.z0, c.n, c.m)), 1e-10) << where;
        EXPECT_GT(c.phi_pp_z0, 0.0);
        EXPECT_GT(c.chi_pp_t0, 0.0);
        if (c.branch == Branch::Coalesced) continue;
        EXPECT_EQ(theta > c.z0, c.tau > c.t0) << where;
        EXPECT_NEAR(chi_drop(c.tau, c.n, c.m), c.phi_drop, 1e-10 * c.phi_drop) << where;
        const Branch expected = theta < c.z0 ? Branch::SBranch : Branch::TBranch;
        EXPECT_EQ(r.branch, expected) << where;
        const double oracle = expected == Branch::SBranch
                                  ? log_inc_beta_binomial_sum(c.m, c.n, c.tau)
                                  : log_inc_beta_binomial_sum_lower(c.m, c.n, c.tau);
        EXPECT_NEAR(r.log_main_term, oracle, 1e-10 * std::max(1.0, std::fabs(oracle))) << where;
    }
    EXPECT_GT(asymptotic, 950);
}

TEST(Estimate, BranchFormulasAgreeNearSaddle) {
    for (auto [n, m] : {std::pair{24, 19}, {99, 38}, {99, 74}, {499, 274}, {1999, 212}}) {
        const double z0 = solve_saddle(n, m);
        for (double eps : {-1e-6, 1e-6}) {
            const double theta = z0 * (1.0 + eps);
            const SaddleContext ctx = make_context(n, m, theta);
            const double s = s_prime_by_formula(ctx, theta, Branch::SBranch);
            const double t = s_prime_by_formula(ctx, theta, Branch::TBranch);
            EXPECT_NEAR(s, t, 1e-9) << n << " " << m << " " << eps;
        }
    }
    const SaddleContext ctx = make_context(99, 38, 5.0);
    EXPECT_THROW(s_prime_by_formula(ctx, 5.0, Branch::Coalesced), DomainError);
}

TEST(Estimate, LadderErrorDecreasesWithSampleSize) {
    struct Row {
        int n;
        int m;
        const char* theta;
    };
    double previous = std::numeric_limits<double>::infinity();
    for (const Row& row : {Row{25, 20, "9.39"}, Row{50, 31, "9.61"}, Row{100, 40, "9.37"},
                           Row{250, 67, "8.96"}, Row{500, 95, "9.04"}, Row{1000, 152, "9.07"}}) {
        const FsResult r = estimate({row.n, row.m, std::stod(row.theta)});
        EXPECT_EQ(r.method, Method::Asymptotic);
        EXPECT_GE(r.s_prime, 0.0);
        EXPECT_LE(r.s_prime, 1.0);
        const double err = mollified_error(exact_fs(row.n, row.m, row.theta, 256), r.fs);
        EXPECT_LT(err, previous) << row.n;
        previous = err;
    }
}

TEST(Estimate, CoalescedPaths) {
    const int n_seq = 100;
    const int m_alleles = 75;
    const double z0 = solve_saddle(n_seq - 1, m_alleles - 1);
    const double ref = exact_fs(n_seq, m_alleles, z0, 256);

    const FsResult exact = estimate({n_seq, m_alleles, z0});
    EXPECT_EQ(exact.method, Method::Exact);
    EXPECT_NEAR(exact.fs, ref, 1e-12);

    const FsResult approx = estimate({n_seq, m_alleles, z0}, no_fallback());
    EXPECT_EQ(approx.method, Method::Asymptotic);
    EXPECT_EQ(approx.branch, Branch::Coalesced);
    EXPECT_LT(mollified_error(ref, approx.fs), 1e-3);
    EXPECT_NEAR(approx.s_prime, exact_s_prime(n_seq, m_alleles, z0, 256).s_prime.to_double(), 1e-3);

    EstimatorOptions capped;
    capped.fallback_cap = 10;
    const FsResult over_cap = estimate({n_seq, m_alleles, z0}, capped);
    EXPECT_EQ(over_cap.method, Method::Asymptotic);
    EXPECT_EQ(over_cap.branch, Branch::Coalesced);
}

TEST(Estimate, LogSpaceSurvivesUnderflow) {
    const FsResult r = estimate({2000, 1500, 5.0});
    EXPECT_TRUE(std::isfinite(r.fs));
    EXPECT_LT(r.log_s_prime, -745.0);
    EXPECT_EQ(r.s_prime, 0.0);
    EXPECT_EQ(r.t_prime, 1.0);
    EXPECT_FALSE(r.saturated);
    EXPECT_NEAR(r.fs, r.log_s_prime - r.log_t_prime, 1e-9 * std::fabs(r.fs));
}

TEST(Estimate, NamesAreStable) {
    EXPECT_EQ(to_string(Branch::SBranch), "S");
    EXPECT_EQ(to_string(Branch::TBranch), "T");
    EXPECT_EQ(to_string(Branch::Coalesced), "coalesced");
    EXPECT_EQ(to_string(Method::Asymptotic), "asymptotic");
    EXPECT_EQ(to_string(Method::Exact), "exact");
    EXPECT_EQ(to_string(Method::ClosedForm), "closed_form");
}
