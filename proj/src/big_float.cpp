#include "fufs/big_float.hpp"

#include <memory>
#include <string>

#include "fufs/errors.hpp"

namespace fufs {

BigFloat::BigFloat(int precision_bits) {
    if (precision_bits < MPFR_PREC_MIN || precision_bits > (1 << 20)) {
        throw DomainError("BigFloat: precision out of range: " + std::to_string(precision_bits));
    }
    mpfr_init2(value_, precision_bits);
    mpfr_set_zero(value_, 1);
}

BigFloat::BigFloat(int precision_bits, double value) : BigFloat(precision_bits) {
    mpfr_set_d(value_, value, MPFR_RNDN);
}

BigFloat::BigFloat(int precision_bits, const mpz_class& value) : BigFloat(precision_bits) {
    mpfr_set_z(value_, value.get_mpz_t(), MPFR_RNDN);
}

BigFloat BigFloat::from_decimal(std::string_view text, int precision_bits) {
    BigFloat out(precision_bits);
    const std::string owned(text);
    char* end = nullptr;
    mpfr_strtofr(out.value_, owned.c_str(), &end, 10, MPFR_RNDN);
    if (owned.empty() || end == nullptr || *end != '\0') {
        throw DomainError("BigFloat: not a decimal number: '" + owned + "'");
    }
    return out;
}

BigFloat::BigFloat(const BigFloat& other) {
    mpfr_init2(value_, mpfr_get_prec(other.value_));
    mpfr_set(value_, other.value_, MPFR_RNDN);
}

BigFloat::BigFloat(BigFloat&& other) noexcept {
    mpfr_init2(value_, mpfr_get_prec(other.value_));
    mpfr_swap(value_, other.value_);
}

BigFloat& BigFloat::operator=(const BigFloat& other) {
    if (this != &other) {
        mpfr_set_prec(value_, mpfr_get_prec(other.value_));
        mpfr_set(value_, other.value_, MPFR_RNDN);
    }
    return *this;
}

BigFloat& BigFloat::operator=(BigFloat&& other) noexcept {
    if (this != &other) {
        mpfr_swap(value_, other.value_);
    }
    return *this;
}

BigFloat::~BigFloat() { mpfr_clear(value_); }

BigFloat& BigFloat::operator+=(const BigFloat& rhs) {
    mpfr_add(value_, value_, rhs.value_, MPFR_RNDN);
    return *this;
}

BigFloat& BigFloat::operator-=(const BigFloat& rhs) {
    mpfr_sub(value_, value_, rhs.value_, MPFR_RNDN);
    return *this;
}

BigFloat& BigFloat::operator*=(const BigFloat& rhs) {
    mpfr_mul(value_, value_, rhs.value_, MPFR_RNDN);
    return *this;
}

BigFloat& BigFloat::operator/=(const BigFloat& rhs) {
    mpfr_div(value_, value_, rhs.value_, MPFR_RNDN);
    return *this;
}

BigFloat BigFloat::log() const {
    BigFloat out(precision_bits());
    mpfr_log(out.value_, value_, MPFR_RNDN);
    return out;
}

BigFloat BigFloat::abs() const {
    BigFloat out(precision_bits());
    mpfr_abs(out.value_, value_, MPFR_RNDN);
    return out;
}

BigFloat BigFloat::rounded(int precision_bits) const {
    BigFloat out(precision_bits);
    mpfr_set(out.value_, value_, MPFR_RNDN);
    return out;
}

BigFloat BigFloat::log_gamma() const {
    BigFloat out(precision_bits());
    mpfr_lngamma(out.value_, value_, MPFR_RNDN);
    return out;
}

double BigFloat::to_double() const { return mpfr_get_d(value_, MPFR_RNDN); }

std::string BigFloat::to_string(int digits) const {
    char* raw = nullptr;
    const std::string fmt = "%." + std::to_string(digits) + "Rg";
    if (mpfr_asprintf(&raw, fmt.c_str(), value_) < 0) return "nan";
    std::unique_ptr<char, decltype(&mpfr_free_str)> guard(raw, &mpfr_free_str);
    return std::string(raw);
}

int BigFloat::sign() const { return mpfr_sgn(value_); }

bool BigFloat::is_zero() const { return mpfr_zero_p(value_) != 0; }

int BigFloat::precision_bits() const { return static_cast<int>(mpfr_get_prec(value_)); }

bool operator<(const BigFloat& a, const BigFloat& b) { return mpfr_less_p(a.value_, b.value_) != 0; }

}  // namespace fufs
