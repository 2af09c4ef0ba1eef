#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "fufs/asymptotic.hpp"

namespace fufs {

/// |fs_est - fs_ref| / max(|fs_ref|, 1). Throws DomainError on non-finite input.
double mollified_error(double fs_ref, double fs_est);

/// SplitMix64 (Steele, Lea and Flood): 64-bit state, one add and a mix per draw.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next();
    /// Uniform on [0, 1) with 53 random bits.
    double uniform01();
    /// Uniform on [lo, hi).
    double uniform(double lo, double hi);
    /// Uniform integer on [lo, hi], unbiased (rejection sampling).
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

private:
    std::uint64_t state_;
};

enum class SweepMethod { Asymptotic, Exact, Recurrence };
std::string_view to_string(SweepMethod method);
/// Accepts "asymptotic", "exact" or "recurrence"; throws DomainError otherwise.
SweepMethod parse_sweep_method(std::string_view text);

enum class MRule { Absolute, Fraction };

struct ThetaRange {
    double min = 1.0;
    double max = 50.0;
    int steps = 1;  // grid sweeps: steps points from min to max inclusive
};

/// Random sampling replaces the (n, m, theta) grid: n uniform on
/// [n_min, n_max], m uniform on [2, n], theta uniform on theta range.
struct RandomSampling {
    int samples = 0;
    int n_min = 50;
    int n_max = 500;
};

struct SweepSpec {
    std::vector<int> n_values;
    MRule m_rule = MRule::Absolute;
    std::vector<double> m_values;  // absolute counts or fractions of n
    ThetaRange theta_range;
    std::uint64_t seed = 1;
    std::vector<SweepMethod> methods = {SweepMethod::Asymptotic};
    std::optional<RandomSampling> random;
    EstimatorOptions estimator;
    int oracle_bits = 0;    // 0: default_oracle_bits()
    int oracle_cap = 2100;  // largest n the exact reference is computed for
    int threads = 1;
    bool timing = false;    // wall_time_ns is 0 unless enabled (keeps CSVs reproducible)

    /// Throws DomainError when the spec is inconsistent.
    void validate() const;
    /// Parameter triples in generation order (grid order or draw order).
    [[nodiscard]] std::vector<ParameterTriple> triples() const;
};

struct ErrorRecord {
    ParameterTriple params;
    SweepMethod method = SweepMethod::Asymptotic;
    std::string branch;
    double fs_est = 0.0;
    double fs_ref = 0.0;
    double mollified = 0.0;
    std::int64_t wall_time_ns = 0;
    std::string error;  // non-empty: the record failed and carries no numbers
};

/// Evaluates every triple with every requested method against the exact
/// oracle. Records are sorted by (n, m, theta, method). Failures are kept as
/// records with `error` set and the run continues.
std::vector<ErrorRecord> run_sweep(const SweepSpec& spec);

/// CSV: a "# generator=splitmix64 seed=..." line, the header
/// n,m,theta,method,branch,fs,ref_fs,mollified,wall_time_ns, one row per
/// successful record and a "# error ..." comment line per failed record.
void write_sweep_csv(std::ostream& out, const SweepSpec& spec,
                     const std::vector<ErrorRecord>& records);

struct Table1Row {
    int n = 0;
    int m = 0;
    std::string theta_text;
    double printed_asymptotic = 0.0;
    double printed_exact = 0.0;
    int printed_exact_decimals = 0;
    double printed_rel_error = 0.0;

    double fs_asymptotic = 0.0;
    double fs_exact = 0.0;
    double rel_error = 0.0;
    bool asymptotic_ok = false;  // 5 significant digits
    bool exact_ok = false;       // 1 unit in the last printed digit
    bool rel_error_ok = false;   // within a factor 3
    double seconds = 0.0;
};

/// The reference ladder with its printed values.
std::vector<Table1Row> table1_reference();

/// Evaluates all rows (exact values computed live).
std::vector<Table1Row> run_table1(int oracle_bits = 0);
void write_table1(std::ostream& out, const std::vector<Table1Row>& rows);

struct BenchEntry {
    ParameterTriple params;
    double asymptotic_median_ns = 0.0;
    double recurrence_median_ns = 0.0;
    [[nodiscard]] double speedup() const { return recurrence_median_ns / asymptotic_median_ns; }
};

struct BenchReport {
    int iterations = 0;
    std::vector<BenchEntry> entries;
};

/// Median wall time per call (monotonic clock) of estimate() without exact
/// fallback and of the double-precision recurrence, alternating which runs
/// first on each iteration. Single-threaded.
BenchReport run_bench(const SweepSpec& spec, int iterations);

/// Median per-call time of estimate() alone.
double median_estimate_ns(const ParameterTriple& params, int iterations,
                          const EstimatorOptions& options = {});

/// CSV header n,m,theta,asymptotic_median_ns,recurrence_median_ns,speedup.
void write_bench_csv(std::ostream& out, const BenchReport& report);

}  // namespace fufs
