#include "relbc/rational.hpp"

#include <cctype>
#include <cstdlib>
#include <numeric>
#include <ostream>

#include "relbc/errors.hpp"

namespace relbc {

namespace {

using Int128 = __int128;
using UInt128 = unsigned __int128;

UInt128 uabs128(Int128 v) { return v < 0 ? static_cast<UInt128>(-v) : static_cast<UInt128>(v); }

UInt128 gcd128(UInt128 a, UInt128 b) {
  while (b != 0) {
    UInt128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

std::int64_t checked_narrow(Int128 v, const char* what) {
  if (v > static_cast<Int128>(INT64_MAX) || v < static_cast<Int128>(INT64_MIN)) {
    throw OverflowError(std::string("rational overflow in ") + what);
  }
  return static_cast<std::int64_t>(v);
}

Rational make_reduced(Int128 num, Int128 den, const char* what) {
  if (den == 0) throw Error("rational: zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  if (num == 0) return Rational(0);
  UInt128 g = gcd128(uabs128(num), static_cast<UInt128>(den));
  num /= static_cast<Int128>(g);
  den /= static_cast<Int128>(g);
  return Rational(checked_narrow(num, what), checked_narrow(den, what));
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw Error("rational: zero denominator");
  if (num == INT64_MIN || den == INT64_MIN) throw OverflowError("rational: INT64_MIN not representable");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  if (num == 0) {
    num_ = 0;
    den_ = 1;
    return;
  }
  std::int64_t g = std::gcd(num < 0 ? -num : num, den);
  num_ = num / g;
  den_ = den / g;
}

Rational Rational::operator-() const {
  Rational r;
  r.num_ = checked_narrow(-static_cast<Int128>(num_), "negation");
  r.den_ = den_;
  return r;
}

Rational Rational::operator+(const Rational& o) const {
  Int128 num = static_cast<Int128>(num_) * o.den_ + static_cast<Int128>(o.num_) * den_;
  Int128 den = static_cast<Int128>(den_) * o.den_;
  return make_reduced(num, den, "addition");
}

Rational Rational::operator-(const Rational& o) const { return *this + (-o); }

Rational Rational::operator*(const Rational& o) const {
  Int128 num = static_cast<Int128>(num_) * o.num_;
  Int128 den = static_cast<Int128>(den_) * o.den_;
  return make_reduced(num, den, "multiplication");
}

Rational Rational::operator/(const Rational& o) const {
  if (o.num_ == 0) throw Error("rational: division by zero");
  Int128 num = static_cast<Int128>(num_) * o.den_;
  Int128 den = static_cast<Int128>(den_) * o.num_;
  return make_reduced(num, den, "division");
}

bool Rational::operator<(const Rational& o) const {
  return static_cast<Int128>(num_) * o.den_ < static_cast<Int128>(o.num_) * den_;
}

Rational Rational::parse(std::string_view text) {
  if (text.empty()) throw ParseError("rational: empty string");

  std::string s(text);
  auto slash = s.find('/');
  if (slash != std::string::npos) {
    std::string np = s.substr(0, slash);
    std::string dp = s.substr(slash + 1);
    if (np.empty() || dp.empty()) throw ParseError("rational: malformed fraction '" + s + "'");
    errno = 0;
    char* end = nullptr;
    long long n = std::strtoll(np.c_str(), &end, 10);
    if (errno != 0 || end != np.c_str() + np.size()) throw ParseError("rational: bad numerator '" + np + "'");
    errno = 0;
    long long d = std::strtoll(dp.c_str(), &end, 10);
    if (errno != 0 || end != dp.c_str() + dp.size()) throw ParseError("rational: bad denominator '" + dp + "'");
    return Rational(n, d);
  }

  // decimal / scientific: [sign] digits [. digits] [e [sign] digits]
  std::size_t i = 0;
  bool negative = false;
  if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
    negative = s[i] == '-';
    ++i;
  }
  UInt128 mantissa = 0;
  int mantissa_digits = 0;
  int frac_digits = 0;
  bool seen_digit = false;
  bool seen_dot = false;
  for (; i < s.size(); ++i) {
    char ch = s[i];
    if (std::isdigit(static_cast<unsigned char>(ch))) {
      if (mantissa_digits >= 38) throw OverflowError("rational: too many digits in '" + s + "'");
      mantissa = mantissa * 10 + static_cast<unsigned>(ch - '0');
      ++mantissa_digits;
      if (seen_dot) ++frac_digits;
      seen_digit = true;
    } else if (ch == '.' && !seen_dot) {
      seen_dot = true;
    } else {
      break;
    }
  }
  if (!seen_digit) throw ParseError("rational: no digits in '" + s + "'");

  long exp10 = 0;
  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
    ++i;
    bool exp_neg = false;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
      exp_neg = s[i] == '-';
      ++i;
    }
    if (i == s.size()) throw ParseError("rational: empty exponent in '" + s + "'");
    long e = 0;
    for (; i < s.size(); ++i) {
      if (!std::isdigit(static_cast<unsigned char>(s[i]))) break;
      e = e * 10 + (s[i] - '0');
      if (e > 1000) throw OverflowError("rational: exponent out of range in '" + s + "'");
    }
    exp10 = exp_neg ? -e : e;
  }
  if (i != s.size()) throw ParseError("rational: trailing characters in '" + s + "'");

  long k = exp10 - frac_digits;
  Int128 num = static_cast<Int128>(mantissa);
  Int128 den = 1;
  if (k > 0) {
    if (k > 38) throw OverflowError("rational: exponent out of range in '" + s + "'");
    for (long j = 0; j < k; ++j) num *= 10;
  } else if (k < 0) {
    if (k < -38) throw OverflowError("rational: exponent out of range in '" + s + "'");
    for (long j = 0; j < -k; ++j) den *= 10;
  }
  if (negative) num = -num;
  return make_reduced(num, den, "parse");
}

std::string Rational::to_fraction_string() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

std::string Rational::to_decimal_string() const {
  const bool negative = num_ < 0;
  std::uint64_t n = negative ? static_cast<std::uint64_t>(-(num_ + 1)) + 1 : static_cast<std::uint64_t>(num_);
  const std::uint64_t d = static_cast<std::uint64_t>(den_);

  std::string int_part = std::to_string(n / d);
  std::uint64_t rem = n % d;
  if (rem == 0) {
    return (negative ? "-" : "") + int_part + ".0";
  }

  // Finite expansions of an int64 denominator terminate within 63 digits;
  // anything still running past that is non-terminating and gets rounded
  // to 12 significant digits instead.
  constexpr int kSignificant = 12;
  constexpr int kMaxDigits = 63 + kSignificant + 1;

  const int int_digits = int_part == "0" ? 0 : static_cast<int>(int_part.size());
  std::string frac;
  std::uint64_t r = rem;
  bool exact = false;
  int significant = int_digits;
  for (int produced = 0; produced < kMaxDigits; ++produced) {
    UInt128 scaled = static_cast<UInt128>(r) * 10;
    char digit = static_cast<char>('0' + static_cast<int>(scaled / d));
    r = static_cast<std::uint64_t>(scaled % d);
    frac.push_back(digit);
    if (significant > 0 || digit != '0') ++significant;
    if (r == 0) {
      exact = true;
      break;
    }
    if (significant > kSignificant) break;  // one extra digit kept for rounding
  }

  if (!exact) {
    // round half-up on the extra digit
    char extra = frac.back();
    frac.pop_back();
    if (extra >= '5') {
      int pos = static_cast<int>(frac.size()) - 1;
      while (pos >= 0 && frac[pos] == '9') {
        frac[pos] = '0';
        --pos;
      }
      if (pos >= 0) {
        ++frac[pos];
      } else {
        int_part = std::to_string(std::strtoull(int_part.c_str(), nullptr, 10) + 1);
      }
    }
  }
  while (frac.size() > 1 && frac.back() == '0') frac.pop_back();
  return (negative ? "-" : "") + int_part + "." + frac;
}

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.to_fraction_string(); }

}  // namespace relbc
