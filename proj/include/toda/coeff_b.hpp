#pragma once

#include <cstdint>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <boost/rational.hpp>

namespace toda {

using Rational = boost::rational<std::int64_t>;

inline double to_double(const Rational& r) {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

inline bool is_integer(const Rational& r) { return r.denominator() == 1; }

// Mixed int/rational == recurses under C++20 rewritten comparisons in some
// Boost releases; compare numerators instead.
inline bool is_zero(const Rational& r) { return r.numerator() == 0; }

/// Fractional part in [0, 1).
inline Rational frac(const Rational& r) {
  std::int64_t q = r.numerator() / r.denominator();
  Rational f = r - Rational(q);
  if (f < 0) f += 1;
  return f;
}

inline std::string to_string(const Rational& r) {
  std::ostringstream os;
  os << r.numerator();
  if (r.denominator() != 1) os << '/' << r.denominator();
  return os.str();
}

/// Parses "p", "p/q" or a terminating decimal such as "-0.375".
inline Rational parse_rational(const std::string& text) {
  auto fail = [&] { throw std::invalid_argument("not a rational number: '" + text + "'"); };
  if (text.empty()) fail();
  try {
    if (auto slash = text.find('/'); slash != std::string::npos) {
      std::size_t used = 0;
      std::int64_t p = std::stoll(text.substr(0, slash), &used);
      if (used != slash) fail();
      std::string den = text.substr(slash + 1);
      std::int64_t q = std::stoll(den, &used);
      if (used != den.size() || q == 0) fail();
      return Rational(p, q);
    }
    auto dot = text.find('.');
    if (dot == std::string::npos) {
      std::size_t used = 0;
      std::int64_t p = std::stoll(text, &used);
      if (used != text.size()) fail();
      return Rational(p);
    }
    std::string digits = text.substr(0, dot) + text.substr(dot + 1);
    std::size_t decimals = text.size() - dot - 1;
    if (decimals > 15) fail();
    std::size_t used = 0;
    std::int64_t p = std::stoll(digits, &used);
    if (used != digits.size()) fail();
    std::int64_t q = 1;
    for (std::size_t i = 0; i < decimals; ++i) q *= 10;
    return Rational(p, q);
  } catch (const std::logic_error&) {
    fail();
  }
  return {};
}

/// The real number u + v*b + w/b with rational components.
///
/// Equality is componentwise, which is sound as long as b^2 is irrational.
struct CoeffB {
  Rational u{0}, v{0}, w{0};

  CoeffB() = default;
  CoeffB(Rational u_, Rational v_, Rational w_) : u(u_), v(v_), w(w_) {}
  // NOLINTNEXTLINE(google-explicit-constructor)
  CoeffB(Rational u_) : u(u_) {}
  // NOLINTNEXTLINE(google-explicit-constructor)
  CoeffB(std::int64_t u_) : u(u_) {}

  static CoeffB b(Rational s = 1) { return {0, s, 0}; }
  static CoeffB inv_b(Rational s = 1) { return {0, 0, s}; }

  [[nodiscard]] double evaluate(double bval) const {
    return to_double(u) + to_double(v) * bval + to_double(w) / bval;
  }
  [[nodiscard]] bool is_zero() const { return toda::is_zero(u) && toda::is_zero(v) && toda::is_zero(w); }

  CoeffB& operator+=(const CoeffB& o) { u += o.u; v += o.v; w += o.w; return *this; }
  CoeffB& operator-=(const CoeffB& o) { u -= o.u; v -= o.v; w -= o.w; return *this; }
  CoeffB& operator*=(const Rational& r) { u *= r; v *= r; w *= r; return *this; }
  CoeffB& operator/=(const Rational& r) { u /= r; v /= r; w /= r; return *this; }

  friend CoeffB operator+(CoeffB a, const CoeffB& c) { return a += c; }
  friend CoeffB operator-(CoeffB a, const CoeffB& c) { return a -= c; }
  friend CoeffB operator-(CoeffB a) { a.u = -a.u; a.v = -a.v; a.w = -a.w; return a; }
  friend CoeffB operator*(CoeffB a, const Rational& r) { return a *= r; }
  friend CoeffB operator*(const Rational& r, CoeffB a) { return a *= r; }
  friend CoeffB operator/(CoeffB a, const Rational& r) { return a /= r; }
  friend CoeffB operator*(CoeffB a, std::int64_t r) { return a *= Rational(r); }
  friend CoeffB operator/(CoeffB a, std::int64_t r) { return a /= Rational(r); }
  friend bool operator==(const CoeffB&, const CoeffB&) = default;
};

/// x in Z/b: only an integer 1/b component.
inline bool in_z_over_b(const CoeffB& x) { return is_zero(x.u) && is_zero(x.v) && is_integer(x.w); }
/// x in bZ: only an integer b component.
inline bool in_b_z(const CoeffB& x) { return is_zero(x.u) && is_zero(x.w) && is_integer(x.v); }

inline std::string to_string(const CoeffB& x) {
  if (x.is_zero()) return "0";
  std::string out;
  auto term = [&](const Rational& c, const char* unit) {
    if (is_zero(c)) return;
    std::string s = to_string(c);
    if (!out.empty() && c > 0) out += '+';
    out += s;
    out += unit;
  };
  term(x.u, "");
  term(x.v, "*b");
  term(x.w, "/b");
  return out;
}

inline std::ostream& operator<<(std::ostream& os, const CoeffB& x) { return os << to_string(x); }

}  // namespace toda
