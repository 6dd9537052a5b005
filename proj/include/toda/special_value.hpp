#pragma once

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace toda {

/// A number sign * i^quarter * exp(log_abs), with an integer zero order.
///
/// order > 0 marks a zero of that order, order < 0 a pole. In both cases
/// the number is the leading Laurent coefficient with respect to the offset
/// of the argument. quarter is 0 for real values and 1 for imaginary ones,
/// which arise from principal square roots of negative values.
struct SpecialValue {
  double log_abs = 0.0;
  int sign = 1;
  int order = 0;
  /// Set when a square root was taken of an odd-order zero or pole.
  bool flagged = false;
  int quarter = 0;

  static SpecialValue from_double(double x) {
    if (x == 0.0) throw std::domain_error("SpecialValue: exact zero needs an order marker");
    return from_log(std::log(std::abs(x)), x < 0 ? -1 : 1);
  }
  static SpecialValue from_log(double log_abs, int sign = 1, int order = 0) {
    SpecialValue v;
    v.log_abs = log_abs;
    v.sign = sign;
    v.order = order;
    return v;
  }

  [[nodiscard]] bool finite() const { return order == 0; }
  [[nodiscard]] bool is_zero() const { return order > 0; }
  [[nodiscard]] bool is_pole() const { return order < 0; }
  [[nodiscard]] bool is_real() const { return quarter == 0; }

  /// Plain double: 0 for zeros, signed infinity for poles. Throws on imaginary values.
  [[nodiscard]] double value() const {
    if (quarter) throw std::domain_error("SpecialValue: value is imaginary");
    if (order > 0) return 0.0;
    if (order < 0) return sign * std::numeric_limits<double>::infinity();
    return sign * std::exp(log_abs);
  }
  /// Leading Laurent coefficient (the imaginary unit dropped when quarter = 1).
  [[nodiscard]] double coefficient() const { return sign * std::exp(log_abs); }

  SpecialValue& operator*=(const SpecialValue& o) {
    log_abs += o.log_abs;
    sign *= o.sign;
    order += o.order;
    quarter += o.quarter;
    if (quarter == 2) {
      quarter = 0;
      sign = -sign;
    }
    flagged = flagged || o.flagged;
    return *this;
  }
  SpecialValue& operator/=(const SpecialValue& o) {
    log_abs -= o.log_abs;
    sign *= o.sign;
    order -= o.order;
    // 1/i = -i
    if (o.quarter) {
      if (quarter) quarter = 0;
      else {
        quarter = 1;
        sign = -sign;
      }
    }
    flagged = flagged || o.flagged;
    return *this;
  }
  friend SpecialValue operator*(SpecialValue a, const SpecialValue& b) { return a *= b; }
  friend SpecialValue operator/(SpecialValue a, const SpecialValue& b) { return a /= b; }

  [[nodiscard]] SpecialValue inverse() const { return SpecialValue{} / *this; }

  /// Principal square root of a real value: i sqrt|x| for negative x. Imaginary inputs
  /// and odd orders are flagged; the magnitude is always exact.
  [[nodiscard]] SpecialValue sqrt() const {
    SpecialValue r = from_log(0.5 * log_abs, 1, order / 2);
    r.flagged = flagged || quarter != 0 || order % 2 != 0;
    if (quarter == 0 && sign < 0) r.quarter = 1;
    return r;
  }

  /// x^p for real p on a positive finite value.
  [[nodiscard]] SpecialValue pow(double p) const {
    if (order != 0 || sign < 0 || quarter) throw std::domain_error("SpecialValue::pow needs a positive finite value");
    SpecialValue r = from_log(p * log_abs);
    r.flagged = flagged;
    return r;
  }
};

inline std::ostream& operator<<(std::ostream& os, const SpecialValue& v) {
  os << (v.sign < 0 ? "-" : "+") << (v.quarter ? "i*" : "") << "exp(" << v.log_abs << ")";
  if (v.order) os << " order " << v.order;
  if (v.flagged) os << " [flagged]";
  return os;
}

/// Relative difference of two finite values, computed from log magnitudes.
inline double relative_difference(const SpecialValue& a, const SpecialValue& b) {
  if (!a.finite() || !b.finite()) {
    if (a.order != b.order) return std::numeric_limits<double>::infinity();
  }
  if (a.sign != b.sign || a.quarter != b.quarter) return 2.0;
  return std::abs(std::expm1(a.log_abs - b.log_abs));
}

}  // namespace toda
