#include "clusterlab/exact_prob.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace clusterlab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::size_t bit_size(const Rational& q) {
  return mpz_sizeinbase(q.get_num_mpz_t(), 2) + mpz_sizeinbase(q.get_den_mpz_t(), 2);
}

// log(exp(a) + exp(b))
double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

double as_log(const std::variant<Rational, double>& v) {
  if (const auto* q = std::get_if<Rational>(&v)) return log_of(*q);
  return std::get<double>(v);
}

}  // namespace

ExactProb::ExactProb(Rational q) : value_(Rational(0)) {
  q.canonicalize();
  if (sgn(q) < 0) throw std::domain_error("ExactProb must be nonnegative");
  *this = normalized(std::move(q));
}

ExactProb ExactProb::normalized(Rational q) {
  ExactProb out;
  if (bit_size(q) > kMaxExactBits) {
    out.value_ = log_of(q);
  } else {
    out.value_ = std::move(q);
  }
  return out;
}

ExactProb ExactProb::from_log(double log_value) {
  ExactProb out;
  out.value_ = log_value;
  return out;
}

ExactProb ExactProb::from_double(double x) {
  if (x < 0) throw std::domain_error("ExactProb must be nonnegative");
  return from_log(x == 0 ? kNegInf : std::log(x));
}

const Rational& ExactProb::rational() const {
  if (const auto* q = std::get_if<Rational>(&value_)) return *q;
  throw std::logic_error("ExactProb is in float mode");
}

double ExactProb::log() const { return as_log(value_); }

double ExactProb::to_double() const {
  if (const auto* q = std::get_if<Rational>(&value_)) return to_double_rounded(*q);
  return std::exp(std::get<double>(value_));
}

bool ExactProb::is_zero() const {
  if (const auto* q = std::get_if<Rational>(&value_)) return sgn(*q) == 0;
  return std::get<double>(value_) == kNegInf;
}

ExactProb ExactProb::pow(long exponent) const {
  if (const auto* q = std::get_if<Rational>(&value_)) {
    if (sgn(*q) == 0 && exponent < 0) throw std::domain_error("0 to a negative power");
    return normalized(rational_pow(*q, exponent));
  }
  return from_log(std::get<double>(value_) * static_cast<double>(exponent));
}

ExactProb ExactProb::sqrt() const {
  if (const auto* q = std::get_if<Rational>(&value_)) {
    if (mpz_perfect_square_p(q->get_num_mpz_t()) &&
        mpz_perfect_square_p(q->get_den_mpz_t())) {
      BigInt num = ::sqrt(q->get_num());
      BigInt den = ::sqrt(q->get_den());
      return ExactProb(Rational(num, den));
    }
  }
  return from_log(0.5 * log());
}

ExactProb ExactProb::complement() const { return ExactProb(Rational(1)) - *this; }

ExactProb operator+(const ExactProb& a, const ExactProb& b) {
  if (a.is_exact() && b.is_exact()) return ExactProb::normalized(a.rational() + b.rational());
  return ExactProb::from_log(log_add(a.log(), b.log()));
}

ExactProb operator-(const ExactProb& a, const ExactProb& b) {
  if (a.is_exact() && b.is_exact()) {
    Rational d = a.rational() - b.rational();
    if (sgn(d) < 0) throw std::domain_error("ExactProb subtraction below zero");
    return ExactProb::normalized(std::move(d));
  }
  const double la = a.log();
  const double lb = b.log();
  if (lb == kNegInf) return ExactProb::from_log(la);
  if (lb >= la) return ExactProb::from_log(kNegInf);
  return ExactProb::from_log(la + std::log(-std::expm1(lb - la)));
}

ExactProb operator*(const ExactProb& a, const ExactProb& b) {
  if (a.is_exact() && b.is_exact()) return ExactProb::normalized(a.rational() * b.rational());
  if (a.is_zero() || b.is_zero()) return ExactProb::from_log(kNegInf);
  return ExactProb::from_log(a.log() + b.log());
}

ExactProb operator/(const ExactProb& a, const ExactProb& b) {
  if (b.is_zero()) throw std::domain_error("ExactProb division by zero");
  if (a.is_exact() && b.is_exact()) return ExactProb::normalized(a.rational() / b.rational());
  return ExactProb::from_log(a.log() - b.log());
}

int compare(const ExactProb& a, const ExactProb& b) {
  if (a.is_exact() && b.is_exact()) return cmp(a.rational(), b.rational());
  const double la = a.log();
  const double lb = b.log();
  return la < lb ? -1 : (la > lb ? 1 : 0);
}

std::string ExactProb::to_string(bool decimal) const {
  if (const auto* q = std::get_if<Rational>(&value_)) {
    if (!decimal) return q->get_str();
    if (sgn(*q) == 0) return "0";
    const double d = to_double_rounded(*q);
    if (std::isfinite(d) && d != 0.0) return format_real(d);
  }
  return format_log_real(log());
}

Rational parse_rational(std::string_view text) {
  if (text.empty()) throw std::invalid_argument("empty number");
  const auto slash = text.find('/');
  if (slash != std::string_view::npos) {
    Rational q;
    const std::string s(text);
    if (q.set_str(s, 10) != 0 || q.get_den() == 0) {
      throw std::invalid_argument("malformed rational '" + s + "'");
    }
    q.canonicalize();
    return q;
  }
  // Decimal: [sign] digits [. digits] [e|E [sign] digits]
  std::size_t i = 0;
  bool negative = false;
  if (text[i] == '+' || text[i] == '-') negative = text[i++] == '-';
  std::string digits;
  long scale = 0;
  bool seen_point = false;
  for (; i < text.size(); ++i) {
    const char c = text[i];
    if (c >= '0' && c <= '9') {
      digits.push_back(c);
      if (seen_point) ++scale;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (digits.empty()) throw std::invalid_argument("malformed number '" + std::string(text) + "'");
  long exponent = 0;
  if (i < text.size()) {
    if (text[i] != 'e' && text[i] != 'E') {
      throw std::invalid_argument("malformed number '" + std::string(text) + "'");
    }
    ++i;
    const auto* first = text.data() + i;
    const auto* last = text.data() + text.size();
    if (first != last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, exponent);
    if (ec != std::errc() || ptr != last) {
      throw std::invalid_argument("malformed exponent in '" + std::string(text) + "'");
    }
  }
  Rational q{BigInt(digits, 10)};
  const long shift = exponent - scale;
  BigInt ten_pow;
  mpz_ui_pow_ui(ten_pow.get_mpz_t(), 10, static_cast<unsigned long>(shift < 0 ? -shift : shift));
  if (shift < 0) {
    q /= Rational(ten_pow);
  } else {
    q *= Rational(ten_pow);
  }
  q.canonicalize();
  return negative ? Rational(-q) : q;
}

ProbabilityInput parse_probability(std::string_view text) {
  ProbabilityInput out;
  out.value = parse_rational(text);
  out.from_decimal = text.find('/') == std::string_view::npos &&
                     (text.find('.') != std::string_view::npos ||
                      text.find('e') != std::string_view::npos ||
                      text.find('E') != std::string_view::npos);
  if (sgn(out.value) < 0 || out.value > 1) {
    throw std::invalid_argument("probability outside [0,1]: " + std::string(text));
  }
  return out;
}

double to_double_rounded(const Rational& q) {
  const double d = q.get_d();  // truncated toward zero
  if (!std::isfinite(d)) return d;
  const double away = std::nextafter(d, sgn(q) >= 0 ? std::numeric_limits<double>::infinity()
                                                     : -std::numeric_limits<double>::infinity());
  if (!std::isfinite(away)) return d;
  const Rational err_d = abs(q - Rational(d));
  const Rational err_away = abs(q - Rational(away));
  return err_away < err_d ? away : d;
}

double log_of(const BigInt& z) {
  if (sgn(z) <= 0) return kNegInf;
  long exp2 = 0;
  const double mant = mpz_get_d_2exp(&exp2, z.get_mpz_t());
  return std::log(mant) + static_cast<double>(exp2) * std::log(2.0);
}

double log_of(const Rational& q) {
  if (sgn(q) <= 0) return kNegInf;
  return log_of(q.get_num()) - log_of(q.get_den());
}

std::string format_real(double x) {
  std::array<char, 64> buf{};
  // Shortest string that reads back to the same double (at most 17 digits).
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  if (ec != std::errc()) throw std::runtime_error("format_real failed");
  return std::string(buf.data(), ptr);
}

std::string format_log_real(double log_value) {
  if (log_value == kNegInf) return "0";
  if (std::isnan(log_value)) return "nan";
  if (log_value < 700 && log_value > -700) return format_real(std::exp(log_value));
  const double e10 = log_value / std::log(10.0);
  double exp10 = std::floor(e10);
  double mant = std::pow(10.0, e10 - exp10);
  if (mant >= 10.0) {
    mant /= 10.0;
    exp10 += 1;
  }
  return format_real(mant) + "e" + (exp10 >= 0 ? "+" : "") +
         std::to_string(static_cast<long long>(exp10));
}

BigInt binomial(unsigned long n, unsigned long k) {
  BigInt out;
  if (k > n) return BigInt(0);
  mpz_bin_uiui(out.get_mpz_t(), n, k);
  return out;
}

BigInt falling_factorial(const BigInt& x, unsigned long k) {
  BigInt out = 1;
  for (unsigned long i = 0; i < k; ++i) out *= x - i;
  return out;
}

BigInt factorial(unsigned long n) {
  BigInt out;
  mpz_fac_ui(out.get_mpz_t(), n);
  return out;
}

Rational rational_pow(const Rational& base, long exponent) {
  const unsigned long e = static_cast<unsigned long>(exponent < 0 ? -exponent : exponent);
  BigInt num;
  BigInt den;
  mpz_pow_ui(num.get_mpz_t(), base.get_num_mpz_t(), e);
  mpz_pow_ui(den.get_mpz_t(), base.get_den_mpz_t(), e);
  Rational out = exponent < 0 ? Rational(den, num) : Rational(num, den);
  out.canonicalize();
  return out;
}

std::uint64_t choose_u64(unsigned n, unsigned k) {
  static const auto table = [] {
    std::array<std::array<std::uint64_t, 65>, 65> t{};
    for (unsigned i = 0; i <= 64; ++i) {
      t[i][0] = 1;
      for (unsigned j = 1; j <= i; ++j) t[i][j] = t[i - 1][j - 1] + (j <= i - 1 ? t[i - 1][j] : 0);
    }
    return t;
  }();
  if (n > 64) throw std::out_of_range("choose_u64 supports n <= 64");
  return k > n ? 0 : table[n][k];
}

}  // namespace clusterlab
