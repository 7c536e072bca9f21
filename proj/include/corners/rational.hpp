#pragma once

#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace corners {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ShapeError : Error {
  using Error::Error;
};
struct ValidationError : Error {
  using Error::Error;
};
struct DomainError : Error {
  using Error::Error;
};
struct SamplerError : Error {
  using Error::Error;
};
struct IntegrationError : Error {
  using Error::Error;
};

using int128 = __int128;

inline std::string int128_to_string(int128 v) {
  if (v == 0) return "0";
  bool neg = v < 0;
  unsigned __int128 u = neg ? -(unsigned __int128)v : (unsigned __int128)v;
  std::string digits;
  while (u > 0) {
    digits.push_back(char('0' + int(u % 10)));
    u /= 10;
  }
  if (neg) digits.push_back('-');
  return std::string(digits.rbegin(), digits.rend());
}

/** Exact rational number over a 128-bit integer core.
 *
 * Always kept normalized: positive denominator, gcd(num, den) == 1.
 * Arithmetic throws on 128-bit overflow instead of wrapping; the library
 * works at desk scale where this never fires on valid inputs.
 */
class Rational {
 public:
  Rational() : num_(0), den_(1) {}
  Rational(long long n) : num_(n), den_(1) {}  // NOLINT: implicit by design
  Rational(long long n, long long d) : num_(n), den_(d) { normalize(); }

  static Rational from_int128(int128 n, int128 d) {
    Rational r;
    r.num_ = n;
    r.den_ = d;
    r.normalize();
    return r;
  }

  /** Parses "p/q" or "p". */
  static Rational parse(const std::string& s) {
    auto slash = s.find('/');
    int128 n = parse_int(slash == std::string::npos ? s : s.substr(0, slash));
    int128 d = slash == std::string::npos ? 1 : parse_int(s.substr(slash + 1));
    return from_int128(n, d);
  }

  /** Nearest dyadic rational with denominator 2^bits. Doubles are dyadic, so
   * this is exact whenever the double's scale fits. */
  static Rational from_double_dyadic(double x, int bits = 48) {
    long double scaled = (long double)x;
    for (int i = 0; i < bits; ++i) scaled *= 2.0L;
    if (scaled > 1.6e38L || scaled < -1.6e38L) throw DomainError("from_double_dyadic: out of range");
    int128 n = (int128)(scaled >= 0 ? scaled + 0.5L : scaled - 0.5L);
    int128 d = 1;
    for (int i = 0; i < bits; ++i) d *= 2;
    return from_int128(n, d);
  }

  int128 num() const { return num_; }
  int128 den() const { return den_; }
  bool is_zero() const { return num_ == 0; }
  int sign() const { return num_ > 0 ? 1 : (num_ < 0 ? -1 : 0); }

  Rational operator-() const { return from_raw(-num_, den_); }

  Rational operator+(const Rational& o) const {
    return from_int128(add(mul(num_, o.den_), mul(o.num_, den_)), mul(den_, o.den_));
  }
  Rational operator-(const Rational& o) const { return *this + (-o); }
  Rational operator*(const Rational& o) const {
    return from_int128(mul(num_, o.num_), mul(den_, o.den_));
  }
  Rational operator/(const Rational& o) const {
    if (o.num_ == 0) throw DomainError("rational division by zero");
    return from_int128(mul(num_, o.den_), mul(den_, o.num_));
  }

  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  bool operator==(const Rational& o) const { return num_ == o.num_ && den_ == o.den_; }
  bool operator!=(const Rational& o) const { return !(*this == o); }
  bool operator<(const Rational& o) const { return mul(num_, o.den_) < mul(o.num_, den_); }
  bool operator<=(const Rational& o) const { return !(o < *this); }
  bool operator>(const Rational& o) const { return o < *this; }
  bool operator>=(const Rational& o) const { return !(*this < o); }

  Rational abs() const { return num_ < 0 ? -*this : *this; }

  Rational pow(int e) const {
    if (e < 0) return (Rational(1) / *this).pow(-e);
    Rational acc(1), base = *this;
    while (e > 0) {
      if (e & 1) acc *= base;
      base = (e > 1) ? base * base : base;
      e >>= 1;
    }
    return acc;
  }

  double to_double() const { return double((long double)num_ / (long double)den_); }

  std::string str() const {
    if (den_ == 1) return int128_to_string(num_);
    return int128_to_string(num_) + "/" + int128_to_string(den_);
  }

 private:
  int128 num_, den_;

  static Rational from_raw(int128 n, int128 d) {
    Rational r;
    r.num_ = n;
    r.den_ = d;
    return r;
  }

  static int128 parse_int(const std::string& s) {
    if (s.empty()) throw DomainError("rational parse: empty component");
    size_t i = 0;
    bool neg = false;
    if (s[0] == '-' || s[0] == '+') {
      neg = s[0] == '-';
      i = 1;
    }
    if (i == s.size()) throw DomainError("rational parse: no digits");
    int128 v = 0;
    for (; i < s.size(); ++i) {
      if (s[i] < '0' || s[i] > '9') throw DomainError("rational parse: bad digit in '" + s + "'");
      v = mul(v, 10);
      v = add(v, s[i] - '0');
    }
    return neg ? -v : v;
  }

  static int128 mul(int128 a, int128 b) {
    int128 r;
    if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("rational overflow (mul)");
    return r;
  }
  static int128 add(int128 a, int128 b) {
    int128 r;
    if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("rational overflow (add)");
    return r;
  }

  static int128 gcd(int128 a, int128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
      int128 t = a % b;
      a = b;
      b = t;
    }
    return a;
  }

  void normalize() {
    if (den_ == 0) throw DomainError("rational with zero denominator");
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    int128 g = gcd(num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
    if (num_ == 0) den_ = 1;
  }
};

inline Rational operator*(long long a, const Rational& r) { return Rational(a) * r; }

}  // namespace corners
