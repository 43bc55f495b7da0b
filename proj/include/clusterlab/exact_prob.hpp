#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>

#include <gmpxx.h>

namespace clusterlab {

using Rational = mpq_class;
using BigInt = mpz_class;

// Exact rationals whose numerator plus denominator exceed this many bits are
// demoted to the log-space backend.
inline constexpr std::size_t kMaxExactBits = std::size_t{1} << 16;

/// Nonnegative quantity carried either as an exact rational or as a natural
/// logarithm (float mode). Mixed arithmetic degrades to float mode.
class ExactProb {
 public:
  ExactProb() : value_(Rational(0)) {}
  ExactProb(Rational q);  // NOLINT(google-explicit-constructor)
  ExactProb(long v) : ExactProb(Rational(v)) {}  // NOLINT

  static ExactProb from_log(double log_value);
  static ExactProb from_double(double x);

  bool is_exact() const { return std::holds_alternative<Rational>(value_); }
  /// Throws std::logic_error in float mode.
  const Rational& rational() const;
  double log() const;
  double to_double() const;
  bool is_zero() const;

  ExactProb pow(long exponent) const;
  /// Square root; stays exact when numerator and denominator are perfect
  /// squares.
  ExactProb sqrt() const;
  /// 1 - x; requires x <= 1.
  ExactProb complement() const;

  friend ExactProb operator+(const ExactProb& a, const ExactProb& b);
  /// Requires a >= b (float-mode rounding below zero clamps to zero).
  friend ExactProb operator-(const ExactProb& a, const ExactProb& b);
  friend ExactProb operator*(const ExactProb& a, const ExactProb& b);
  friend ExactProb operator/(const ExactProb& a, const ExactProb& b);
  ExactProb& operator+=(const ExactProb& o) { return *this = *this + o; }
  ExactProb& operator*=(const ExactProb& o) { return *this = *this * o; }

  friend int compare(const ExactProb& a, const ExactProb& b);
  friend bool operator==(const ExactProb& a, const ExactProb& b) {
    return compare(a, b) == 0;
  }
  friend bool operator<(const ExactProb& a, const ExactProb& b) {
    return compare(a, b) < 0;
  }
  friend bool operator<=(const ExactProb& a, const ExactProb& b) {
    return compare(a, b) <= 0;
  }
  friend bool operator>(const ExactProb& a, const ExactProb& b) { return b < a; }
  friend bool operator>=(const ExactProb& a, const ExactProb& b) { return b <= a; }

  /// "num/den" (or an integer) when exact and `decimal` is false, otherwise
  /// the shortest round-trip decimal string.
  std::string to_string(bool decimal = false) const;

 private:
  static ExactProb normalized(Rational q);
  std::variant<Rational, double> value_;
};

/// Probability read from the command line or a config: "a/b" or a decimal.
/// Decimals are converted exactly (0.1 -> 1/10) and flagged.
struct ProbabilityInput {
  Rational value;
  bool from_decimal = false;
};

/// Throws std::invalid_argument on malformed input or a value outside [0,1].
ProbabilityInput parse_probability(std::string_view text);
/// Parses "a/b", an integer, or a decimal (with optional exponent) exactly.
Rational parse_rational(std::string_view text);

/// Correctly rounded conversion (mpq_get_d truncates).
double to_double_rounded(const Rational& q);
/// Natural log of a positive big integer or rational.
double log_of(const BigInt& z);
double log_of(const Rational& q);

/// Shortest round-trip decimal (at most 17 significant digits), locale
/// independent.
std::string format_real(double x);
/// Decimal rendering of exp(log_value), including magnitudes beyond double.
std::string format_log_real(double log_value);

BigInt binomial(unsigned long n, unsigned long k);
/// Falling factorial (x)_k = x (x-1) ... (x-k+1).
BigInt falling_factorial(const BigInt& x, unsigned long k);
BigInt factorial(unsigned long n);
Rational rational_pow(const Rational& base, long exponent);

/// C(n,k) for n <= 64 (exact in 64 bits for the sizes used here).
std::uint64_t choose_u64(unsigned n, unsigned k);

}  // namespace clusterlab
