#pragma once

#include <mpfr.h>

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace fufs {

/// Owning MPFR value with a fixed binary precision. Arithmetic results take
/// the precision of the left operand; rounding is to nearest.
class BigFloat {
public:
    explicit BigFloat(int precision_bits);
    BigFloat(int precision_bits, double value);
    BigFloat(int precision_bits, const mpz_class& value);

    /// Parses decimal text ("9.39", "1e-3") rounding once to the target precision.
    static BigFloat from_decimal(std::string_view text, int precision_bits);

    BigFloat(const BigFloat& other);
    BigFloat(BigFloat&& other) noexcept;
    BigFloat& operator=(const BigFloat& other);
    BigFloat& operator=(BigFloat&& other) noexcept;
    ~BigFloat();

    BigFloat& operator+=(const BigFloat& rhs);
    BigFloat& operator-=(const BigFloat& rhs);
    BigFloat& operator*=(const BigFloat& rhs);
    BigFloat& operator/=(const BigFloat& rhs);

    friend BigFloat operator+(BigFloat lhs, const BigFloat& rhs) { return lhs += rhs; }
    friend BigFloat operator-(BigFloat lhs, const BigFloat& rhs) { return lhs -= rhs; }
    friend BigFloat operator*(BigFloat lhs, const BigFloat& rhs) { return lhs *= rhs; }
    friend BigFloat operator/(BigFloat lhs, const BigFloat& rhs) { return lhs /= rhs; }

    [[nodiscard]] BigFloat log() const;
    [[nodiscard]] BigFloat abs() const;
    /// Copy rounded once to another precision.
    [[nodiscard]] BigFloat rounded(int precision_bits) const;
    [[nodiscard]] BigFloat log_gamma() const;

    [[nodiscard]] double to_double() const;
    [[nodiscard]] std::string to_string(int digits = 20) const;
    [[nodiscard]] int sign() const;
    [[nodiscard]] bool is_zero() const;
    [[nodiscard]] int precision_bits() const;

    [[nodiscard]] mpfr_srcptr get() const { return value_; }
    [[nodiscard]] mpfr_ptr get() { return value_; }

    friend bool operator<(const BigFloat& a, const BigFloat& b);

private:
    mpfr_t value_;
};

}  // namespace fufs
