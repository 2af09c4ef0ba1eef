#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "fufs/big_float.hpp"

namespace fufs {

// Reference computations for S'_{n,m}(theta): exact Stirling numbers of the
// first kind, the scaled double-precision recurrence, and high-precision
// evaluation of S', T' and Fs.
//
// Indices here are the statistic's own (n sequences, m alleles):
//   S'_{n,m}(theta) = (theta)_n^-1 sum_{k=m}^{n} (-1)^{n-k} S_n^(k) theta^k.

struct TableLimits {
    int max_rows = 2100;
};

/// Exact signed Stirling numbers of the first kind S_n^(k), 0 <= k <= n <= n_max.
/// Immutable once built; safe to share across threads.
class StirlingTable {
public:
    /// Builds rows 0..n_max from S_{n+1}^(k) = S_n^(k-1) - n S_n^(k).
    /// Throws ResourceError when n_max exceeds limits.max_rows.
    static StirlingTable build(int n_max, const TableLimits& limits = {});

    [[nodiscard]] int n_max() const { return static_cast<int>(rows_.size()) - 1; }
    [[nodiscard]] const mpz_class& at(int n, int k) const;
    [[nodiscard]] std::span<const mpz_class> row(int n) const;

private:
    std::vector<std::vector<mpz_class>> rows_;
};

inline StirlingTable build_table(int n_max, const TableLimits& limits = {}) {
    return StirlingTable::build(n_max, limits);
}

/// Row n of the exact triangle using O(n) memory.
std::vector<mpz_class> stirling_row(int n);

/// Scaled row S_n^(k) / n!, k = 0..n, from the scaled recurrence
/// S^_{n+1}^(k) = (S^_n^(k-1) - n S^_n^(k)) / (n + 1).
///
/// Magnitudes are held as a double mantissa with a separate binary exponent:
/// 1/n! leaves the double range at n = 171 while the recurrence itself stays
/// in double precision.
struct ScaledStirlingRow {
    int n = 0;
    std::vector<double> mantissa;  // |S^_n^(k)| = mantissa[k] * 2^exponent[k]
    std::vector<int> exponent;

    /// Signed value; underflows to 0 once the magnitude leaves double range.
    [[nodiscard]] double value(int k) const;
    /// ln |S^_n^(k)|, -infinity for zero entries.
    [[nodiscard]] double log_abs(int k) const;
    /// (-1)^(n-k), or 0 for zero entries.
    [[nodiscard]] int sign(int k) const;
};

ScaledStirlingRow scaled_row(int n);

/// Rows 1..n_max, computed in one pass.
std::vector<ScaledStirlingRow> scaled_rows(int n_max);

/// Binary cache: magic "FUFS1", n_max as uint64 LE, then rows 1..n_max as
/// LE doubles (row n holds n + 1 values).
void write_scaled_cache(const std::filesystem::path& path, std::span<const ScaledStirlingRow> rows);
std::vector<ScaledStirlingRow> read_scaled_cache(const std::filesystem::path& path);

/// Oracle precision: FUFS_ORACLE_BITS if set and valid, otherwise 256.
int default_oracle_bits();

struct ExactEvaluation {
    BigFloat s_prime;
    BigFloat t_prime;
    BigFloat fs;
    int precision_bits;
};

/// S' and T' from independent finite sums at `precision_bits`. `theta_text`
/// is parsed as decimal at full precision. Passing a table whose n_max >= n
/// avoids recomputing the row.
ExactEvaluation exact_s_prime(int n, int m, std::string_view theta_text, int precision_bits,
                              const StirlingTable* table = nullptr);
ExactEvaluation exact_s_prime(int n, int m, double theta, int precision_bits,
                              const StirlingTable* table = nullptr);

/// Fs at high precision rounded to double. Requires 2 <= m <= n; m == 1
/// raises DegenerateError and a vanishing S' or T' raises SaturationError.
double exact_fs(int n, int m, std::string_view theta_text, int precision_bits,
                const StirlingTable* table = nullptr);
double exact_fs(int n, int m, double theta, int precision_bits,
                const StirlingTable* table = nullptr);

struct RecurrenceEvaluation {
    double log_s_prime;
    double log_t_prime;
    double fs;
};

/// Double-precision baseline: builds the scaled row by recurrence (O(n^2))
/// and sums f_n(theta) * |S^_n^(k)| theta^k in log space.
RecurrenceEvaluation recurrence_s_prime(int n, int m, double theta);

}  // namespace fufs
