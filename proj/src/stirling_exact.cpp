#include "fufs/stirling_exact.hpp"

#include <array>
#include <bit>
#include <climits>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <limits>
#include <numbers>
#include <string>

#include "fufs/errors.hpp"
#include "fufs/special_functions.hpp"

namespace fufs {

StirlingTable StirlingTable::build(int n_max, const TableLimits& limits) {
    if (n_max < 1) throw DomainError("build_table: n_max must be >= 1");
    if (n_max > limits.max_rows) {
        throw ResourceError("build_table: n_max " + std::to_string(n_max) +
                            " exceeds the configured limit of " + std::to_string(limits.max_rows) +
                            " rows");
    }
    StirlingTable table;
    table.rows_.reserve(static_cast<std::size_t>(n_max) + 1);
    table.rows_.push_back({mpz_class(1)});
    for (int n = 0; n < n_max; ++n) {
        const auto& prev = table.rows_.back();
        std::vector<mpz_class> next(static_cast<std::size_t>(n) + 2);
        for (int k = 1; k <= n + 1; ++k) {
            mpz_class v = prev[static_cast<std::size_t>(k - 1)];
            if (k <= n) v -= n * prev[static_cast<std::size_t>(k)];
            next[static_cast<std::size_t>(k)] = std::move(v);
        }
        table.rows_.push_back(std::move(next));
    }
    return table;
}

const mpz_class& StirlingTable::at(int n, int k) const {
    if (n < 0 || n > n_max() || k < 0 || k > n) throw DomainError("StirlingTable: index out of range");
    return rows_[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)];
}

std::span<const mpz_class> StirlingTable::row(int n) const {
    if (n < 0 || n > n_max()) throw DomainError("StirlingTable: row out of range");
    return rows_[static_cast<std::size_t>(n)];
}

std::vector<mpz_class> stirling_row(int n) {
    if (n < 0) throw DomainError("stirling_row: n must be non-negative");
    std::vector<mpz_class> row(static_cast<std::size_t>(n) + 1);
    row[0] = 1;
    mpz_class tmp;
    for (int i = 0; i < n; ++i) {
        // In place, high k first: row[k] <- row[k-1] - i * row[k].
        for (int k = i + 1; k >= 1; --k) {
            auto& cur = row[static_cast<std::size_t>(k)];
            mpz_mul_ui(tmp.get_mpz_t(), cur.get_mpz_t(), static_cast<unsigned long>(i));
            mpz_sub(cur.get_mpz_t(), row[static_cast<std::size_t>(k - 1)].get_mpz_t(), tmp.get_mpz_t());
        }
        row[0] = 0;
    }
    return row;
}

// --- scaled rows --------------------------------------------------------------

namespace {

constexpr int kZeroExponent = INT_MIN;

// a * 2^ea + b * 2^eb, both non-negative, result renormalized by frexp.
void add_scaled(double a, int ea, double b, int eb, double& out, int& eout) {
    if (a == 0.0 && b == 0.0) {
        out = 0.0;
        eout = kZeroExponent;
        return;
    }
    double sum = 0.0;
    int top = 0;
    if (a == 0.0) {
        sum = b;
        top = eb;
    } else if (b == 0.0) {
        sum = a;
        top = ea;
    } else {
        top = std::max(ea, eb);
        sum = std::ldexp(a, ea - top) + std::ldexp(b, eb - top);
    }
    int shift = 0;
    out = std::frexp(sum, &shift);
    eout = top + shift;
}

void advance(ScaledStirlingRow& row) {
    // |S^_{n+1}^(k)| = (|S^_n^(k-1)| + n |S^_n^(k)|) / (n + 1)
    const int n = row.n;
    row.mantissa.push_back(0.0);
    row.exponent.push_back(kZeroExponent);
    const double up = static_cast<double>(n) / (n + 1);
    const double carry = 1.0 / (n + 1);
    for (int k = n + 1; k >= 1; --k) {
        const auto ku = static_cast<std::size_t>(k);
        add_scaled(row.mantissa[ku - 1] * carry, row.exponent[ku - 1], row.mantissa[ku] * up,
                   row.exponent[ku], row.mantissa[ku], row.exponent[ku]);
    }
    row.mantissa[0] = 0.0;
    row.exponent[0] = kZeroExponent;
    row.n = n + 1;
}

ScaledStirlingRow row_zero() {
    ScaledStirlingRow row;
    row.n = 0;
    row.mantissa = {0.5};
    row.exponent = {1};
    return row;
}

}  // namespace

double ScaledStirlingRow::value(int k) const {
    const auto ku = static_cast<std::size_t>(k);
    if (mantissa[ku] == 0.0) return 0.0;
    return sign(k) * std::ldexp(mantissa[ku], exponent[ku]);
}

double ScaledStirlingRow::log_abs(int k) const {
    const auto ku = static_cast<std::size_t>(k);
    if (mantissa[ku] == 0.0) return -std::numeric_limits<double>::infinity();
    return std::log(mantissa[ku]) + exponent[ku] * std::numbers::ln2;
}

int ScaledStirlingRow::sign(int k) const {
    if (mantissa[static_cast<std::size_t>(k)] == 0.0) return 0;
    return ((n - k) % 2 == 0) ? 1 : -1;
}

ScaledStirlingRow scaled_row(int n) {
    if (n < 1) throw DomainError("scaled_row: n must be >= 1");
    ScaledStirlingRow row = row_zero();
    while (row.n < n) advance(row);
    return row;
}

std::vector<ScaledStirlingRow> scaled_rows(int n_max) {
    if (n_max < 1) throw DomainError("scaled_rows: n_max must be >= 1");
    std::vector<ScaledStirlingRow> rows;
    rows.reserve(static_cast<std::size_t>(n_max));
    ScaledStirlingRow row = row_zero();
    while (row.n < n_max) {
        advance(row);
        rows.push_back(row);
    }
    return rows;
}

// --- cache file ---------------------------------------------------------------

namespace {

constexpr std::array<char, 5> kMagic{'F', 'U', 'F', 'S', '1'};

template <typename T>
void write_le(std::ostream& out, T value) {
    static_assert(sizeof(T) == 8);
    auto bits = std::bit_cast<std::uint64_t>(value);
    std::array<char, 8> bytes{};
    for (auto& b : bytes) {
        b = static_cast<char>(bits & 0xffU);
        bits >>= 8;
    }
    out.write(bytes.data(), bytes.size());
}

template <typename T>
T read_le(std::istream& in) {
    std::array<unsigned char, 8> bytes{};
    in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
    if (!in) throw FormatError("scaled cache: truncated file");
    std::uint64_t bits = 0;
    for (int i = 7; i >= 0; --i) bits = (bits << 8) | bytes[static_cast<std::size_t>(i)];
    return std::bit_cast<T>(bits);
}

}  // namespace

void write_scaled_cache(const std::filesystem::path& path, std::span<const ScaledStirlingRow> rows) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("scaled cache: cannot open " + path.string() + " for writing");
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].n != static_cast<int>(i) + 1) {
            throw DomainError("scaled cache: rows must be 1..n_max in order");
        }
    }
    out.write(kMagic.data(), kMagic.size());
    write_le<std::uint64_t>(out, rows.size());
    for (const auto& row : rows) {
        for (int k = 0; k <= row.n; ++k) write_le<double>(out, row.value(k));
    }
    if (!out) throw FormatError("scaled cache: write failed for " + path.string());
}

std::vector<ScaledStirlingRow> read_scaled_cache(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("scaled cache: cannot open " + path.string());
    std::array<char, 5> magic{};
    in.read(magic.data(), magic.size());
    if (!in || magic != kMagic) throw FormatError("scaled cache: bad magic in " + path.string());
    const auto n_max = read_le<std::uint64_t>(in);
    if (n_max > 100000) throw FormatError("scaled cache: implausible n_max");
    std::vector<ScaledStirlingRow> rows;
    rows.reserve(n_max);
    for (std::uint64_t n = 1; n <= n_max; ++n) {
        ScaledStirlingRow row;
        row.n = static_cast<int>(n);
        for (std::uint64_t k = 0; k <= n; ++k) {
            int e = 0;
            const double v = std::fabs(read_le<double>(in));
            const double mant = std::frexp(v, &e);
            row.mantissa.push_back(mant);
            row.exponent.push_back(mant == 0.0 ? kZeroExponent : e);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

// --- high-precision evaluation ------------------------------------------------

int default_oracle_bits() {
    constexpr int kDefault = 256;
    const char* env = std::getenv("FUFS_ORACLE_BITS");
    if (env == nullptr || *env == '\0') return kDefault;
    char* end = nullptr;
    const long bits = std::strtol(env, &end, 10);
    if (*end != '\0' || bits < 64 || bits > 65536) return kDefault;
    return static_cast<int>(bits);
}

namespace {

void validate_nm(int n, int m) {
    if (n < 1 || m < 1 || m > n) {
        throw DomainError("exact_s_prime: need 1 <= m <= n (n=" + std::to_string(n) +
                          ", m=" + std::to_string(m) + ")");
    }
}

// Guard bits for the working precision: the sums round once per term, so the
// results are rounded to the requested precision only at the end.
int working_bits(int n, int bits) { return bits + 32 + 2 * std::bit_width(static_cast<unsigned>(n)); }

ExactEvaluation evaluate(int n, int m, const BigFloat& theta_in, int out_bits, const StirlingTable* table) {
    validate_nm(n, m);
    const int bits = working_bits(n, out_bits);
    const BigFloat theta = theta_in.rounded(bits);
    if (theta.sign() <= 0) throw DomainError("exact_s_prime: theta must be positive");

    // (theta)_n as an explicit product, independent of the Stirling sums.
    BigFloat poch(bits, 1.0);
    for (int j = 0; j < n; ++j) poch *= theta + BigFloat(bits, static_cast<double>(j));

    std::vector<mpz_class> computed;
    std::span<const mpz_class> row;
    if (table != nullptr && table->n_max() >= n) {
        row = table->row(n);
    } else {
        computed = stirling_row(n);
        row = computed;
    }

    // For m == n the upper sum is the single closed-form term theta^n.
    BigFloat upper(bits);
    BigFloat lower(bits);
    BigFloat power(bits, 1.0);
    mpz_class mag;
    for (int k = 0; k <= n; ++k) {
        // (-1)^(n-k) S_n^(k) = |S_n^(k)|
        mpz_abs(mag.get_mpz_t(), row[static_cast<std::size_t>(k)].get_mpz_t());
        BigFloat term = BigFloat(bits, mag) * power;
        if (k >= m) {
            upper += term;
        } else {
            lower += term;
        }
        power *= theta;
    }
    return {(upper / poch).rounded(out_bits), (lower / poch).rounded(out_bits),
            (upper.log() - lower.log()).rounded(out_bits), out_bits};
}

}  // namespace

ExactEvaluation exact_s_prime(int n, int m, std::string_view theta_text, int precision_bits,
                              const StirlingTable* table) {
    validate_nm(n, m);
    const BigFloat theta = BigFloat::from_decimal(theta_text, working_bits(n, precision_bits));
    return evaluate(n, m, theta, precision_bits, table);
}

ExactEvaluation exact_s_prime(int n, int m, double theta, int precision_bits,
                              const StirlingTable* table) {
    if (!(theta > 0.0) || !std::isfinite(theta)) throw DomainError("exact_s_prime: theta must be positive");
    return evaluate(n, m, BigFloat(precision_bits, theta), precision_bits, table);
}

namespace {

double fs_from(const ExactEvaluation& ev) {
    if (ev.s_prime.is_zero()) throw SaturationError("exact_fs: S' vanished at working precision", -1);
    if (ev.t_prime.is_zero()) throw SaturationError("exact_fs: T' vanished at working precision", +1);
    // S' and T' come from independent sums, so ln S'/T' has no cancellation
    // on either side of 1/2.
    return ev.fs.to_double();
}

void require_non_degenerate(int n, int m) {
    validate_nm(n, m);
    if (m == 1) throw DegenerateError("degenerate: single allele (M = 1 gives S' = 1)");
}

}  // namespace

double exact_fs(int n, int m, std::string_view theta_text, int precision_bits,
                const StirlingTable* table) {
    require_non_degenerate(n, m);
    return fs_from(exact_s_prime(n, m, theta_text, precision_bits, table));
}

double exact_fs(int n, int m, double theta, int precision_bits, const StirlingTable* table) {
    require_non_degenerate(n, m);
    return fs_from(exact_s_prime(n, m, theta, precision_bits, table));
}

// --- double-precision recurrence baseline -----------------------------------

RecurrenceEvaluation recurrence_s_prime(int n, int m, double theta) {
    validate_nm(n, m);
    if (!(theta > 0.0) || !std::isfinite(theta)) throw DomainError("recurrence_s_prime: theta must be positive");
    const ScaledStirlingRow row = scaled_row(n);
    const double log_theta = std::log(theta);
    std::vector<double> upper;
    std::vector<double> lower;
    upper.reserve(static_cast<std::size_t>(n - m + 1));
    lower.reserve(static_cast<std::size_t>(m));
    for (int k = 1; k <= n; ++k) {
        const double term = row.log_abs(k) + k * log_theta;
        (k >= m ? upper : lower).push_back(term);
    }
    const auto nd = static_cast<double>(n);
    const double log_fn = log_gamma(nd + 1.0) + log_gamma(theta) - log_gamma(theta + nd);
    const double su = log_sum_exp(upper);
    const double sl = log_sum_exp(lower);
    return {su + log_fn, sl + log_fn, su - sl};
}

}  // namespace fufs
