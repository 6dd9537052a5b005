#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "toda/coeff_b.hpp"

namespace toda {

namespace detail {

inline double scale(double x, const Rational& r) { return x * to_double(r); }
inline Rational scale(const Rational& x, const Rational& r) { return x * r; }
inline CoeffB scale(const CoeffB& x, const Rational& r) { return x * r; }

}  // namespace detail

/// A vector of the sl_n weight space, stored by its coefficients in the
/// fundamental-weight basis: v = sum_i coords[i] * omega_{i+1}.
///
/// S is double for numeric work, Rational or CoeffB for exact work.
template <class S>
class Weight {
 public:
  Weight() = default;
  explicit Weight(int n) : coords_(static_cast<std::size_t>(n - 1), S{}) {
    if (n < 2) throw std::invalid_argument("sl_n rank must be at least 2");
  }
  Weight(int n, std::vector<S> coords) : coords_(std::move(coords)) {
    if (n < 2) throw std::invalid_argument("sl_n rank must be at least 2");
    if (coords_.size() != static_cast<std::size_t>(n - 1))
      throw std::invalid_argument("weight needs n-1 omega coordinates");
  }

  /// Builds from coefficients on h_1..h_n (modulo the all-ones vector).
  static Weight from_h(const std::vector<S>& c) {
    const int n = static_cast<int>(c.size());
    Weight out(n);
    for (int i = 0; i + 1 < n; ++i) out.coords_[i] = c[i] - c[i + 1];
    return out;
  }

  [[nodiscard]] int rank() const { return static_cast<int>(coords_.size()) + 1; }
  [[nodiscard]] const std::vector<S>& coords() const { return coords_; }
  S& operator[](std::size_t i) { return coords_[i]; }
  const S& operator[](std::size_t i) const { return coords_[i]; }

  /// Coefficients c_k on h_k with c_n = 0, using omega_i = h_1 + ... + h_i.
  [[nodiscard]] std::vector<S> h_coeffs() const {
    const int n = rank();
    std::vector<S> c(static_cast<std::size_t>(n), S{});
    S acc{};
    for (int k = n - 2; k >= 0; --k) {
      acc = acc + coords_[k];
      c[k] = acc;
    }
    return c;
  }

  [[nodiscard]] bool is_zero() const {
    for (const auto& x : coords_)
      if (!(x == S{})) return false;
    return true;
  }

  Weight& operator+=(const Weight& o) {
    check_rank(o);
    for (std::size_t i = 0; i < coords_.size(); ++i) coords_[i] = coords_[i] + o.coords_[i];
    return *this;
  }
  Weight& operator-=(const Weight& o) {
    check_rank(o);
    for (std::size_t i = 0; i < coords_.size(); ++i) coords_[i] = coords_[i] - o.coords_[i];
    return *this;
  }
  friend Weight operator+(Weight a, const Weight& c) { return a += c; }
  friend Weight operator-(Weight a, const Weight& c) { return a -= c; }
  friend Weight operator-(Weight a) {
    for (auto& x : a.coords_) x = S{} - x;
    return a;
  }
  template <class T>
  friend Weight operator*(const T& s, Weight a) {
    for (auto& x : a.coords_) x = x * s;
    return a;
  }
  template <class T>
  friend Weight operator*(Weight a, const T& s) {
    for (auto& x : a.coords_) x = x * s;
    return a;
  }
  friend bool operator==(const Weight&, const Weight&) = default;

  void check_rank(const Weight& o) const {
    if (o.coords_.size() != coords_.size()) throw std::invalid_argument("rank mismatch");
  }

 private:
  std::vector<S> coords_;
};

using NumericWeight = Weight<double>;
using RationalWeight = Weight<Rational>;
using ExactWeight = Weight<CoeffB>;

/// Gram matrix entry omega_i . omega_j = min(i,j) - i*j/n (1-based indices).
inline Rational gram(int n, int i, int j) {
  return Rational(std::min(i, j)) - Rational(i * j, n);
}

/// Pairing induced by the Gram matrix. The product S*T must be defined.
template <class S, class T>
auto pair(const Weight<S>& x, const Weight<T>& y) {
  if (x.rank() != y.rank()) throw std::invalid_argument("rank mismatch in weight pairing");
  const int n = x.rank();
  using R = decltype(x[0] * y[0]);
  R acc{};
  for (int i = 1; i < n; ++i)
    for (int j = 1; j < n; ++j)
      acc = acc + detail::scale(x[i - 1] * y[j - 1], gram(n, i, j));
  return acc;
}

/// Converts an exact weight to a numeric one at coupling b.
inline NumericWeight evaluate(const ExactWeight& x, double b) {
  std::vector<double> c;
  c.reserve(x.coords().size());
  for (const auto& v : x.coords()) c.push_back(v.evaluate(b));
  return {x.rank(), std::move(c)};
}

inline NumericWeight evaluate(const RationalWeight& x) {
  std::vector<double> c;
  for (const auto& v : x.coords()) c.push_back(to_double(v));
  return {x.rank(), std::move(c)};
}

inline ExactWeight to_exact(const RationalWeight& x) {
  std::vector<CoeffB> c(x.coords().begin(), x.coords().end());
  return {x.rank(), std::move(c)};
}

/// Exact vector times a CoeffB scalar, e.g. b * omega_1.
inline ExactWeight scaled(const RationalWeight& x, const CoeffB& s) {
  std::vector<CoeffB> c;
  for (const auto& v : x.coords()) c.push_back(s * v);
  return {x.rank(), std::move(c)};
}

}  // namespace toda
