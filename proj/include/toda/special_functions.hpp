#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "toda/numerics.hpp"
#include "toda/special_value.hpp"

namespace toda {

namespace detail {

inline bool near_integer(double x, long& k) {
  const double r = std::round(x);
  if (std::abs(x - r) <= 1e-10 * std::max(1.0, std::abs(x))) {
    k = static_cast<long>(r);
    return true;
  }
  return false;
}

inline double log_factorial(long m) { return std::lgamma(static_cast<double>(m) + 1.0); }

inline SpecialValue signed_lgamma(double x) {
  int s = 1;
  const double l = lgamma_r(x, &s);
  return SpecialValue::from_log(l, s);
}

}  // namespace detail

/// Gamma(x) with a pole marker at non-positive integers.
inline SpecialValue gamma_fn(double x) {
  long k = 0;
  if (detail::near_integer(x, k) && k <= 0) {
    const long m = -k;
    return SpecialValue::from_log(-detail::log_factorial(m), m % 2 ? -1 : 1, -1);
  }
  return detail::signed_lgamma(x);
}

/// gamma(x) = Gamma(x) / Gamma(1 - x), with zeros at x = 1, 2, ... and poles at x = 0, -1, ...
inline SpecialValue gamma_ratio(double x) {
  long k = 0;
  if (detail::near_integer(x, k)) {
    if (k >= 1) {
      return SpecialValue::from_log(2.0 * detail::log_factorial(k - 1), k % 2 ? -1 : 1, 1);
    }
    const long m = -k;
    return SpecialValue::from_log(-2.0 * detail::log_factorial(m), m % 2 ? -1 : 1, -1);
  }
  return detail::signed_lgamma(x) / detail::signed_lgamma(1.0 - x);
}

/// Quadrature settings for the strip integrals.
struct QuadratureConfig {
  /// Gauss-Legendre nodes per panel.
  int nodes = 24;
  /// Split point between the near-zero and the tail regions.
  double split = 1.0;
  /// Panel width on the tail, in units of min(1, b, 1/b).
  double panel = 2.0;
  /// Tail cutoff T = split + tail / decay_rate.
  double tail = 40.0;
  /// Below this t the integrands are replaced by their Taylor series.
  double series_cutoff = 1e-2;
};

/// Upsilon_b and Gamma_b for fixed b.
///
/// Values inside a central window around (b + 1/b)/2 come from the integral
/// representation; everything else is reached through the shift relations,
/// b-shifts first, then 1/b-shifts.
class UpsilonEvaluator {
 public:
  explicit UpsilonEvaluator(double b, QuadratureConfig cfg = {}) : b_(b), cfg_(cfg), gl_(cfg.nodes) {
    if (!(b > 0) || !std::isfinite(b)) throw std::invalid_argument("UpsilonEvaluator: b must be positive");
    if (cfg.nodes < 4 || cfg.split <= 0 || cfg.panel <= 0 || cfg.tail <= 0)
      throw std::invalid_argument("UpsilonEvaluator: bad quadrature config");
    q_ = b + 1.0 / b;
    p_ = b * b + 1.0 / (b * b);
    const double scale = std::min({1.0, b, 1.0 / b});
    const int near_panels = std::max(1, static_cast<int>(std::ceil(cfg.split / scale)));
    for (int i = 0; i < near_panels; ++i)
      near_edges_.push_back(cfg.split * i / near_panels);
    near_edges_.push_back(cfg.split);
    tail_width_ = cfg.panel * scale;
  }

  [[nodiscard]] double b() const { return b_; }
  [[nodiscard]] const QuadratureConfig& config() const { return cfg_; }
  /// Centre (b + 1/b)/2 of the fundamental strip.
  [[nodiscard]] double centre() const { return 0.5 * q_; }
  /// Half-width of the window evaluated by quadrature.
  [[nodiscard]] double window() const { return 0.5 * std::min(b_, 1.0 / b_) + 1e-9; }

  /// ln Upsilon_b(x) by quadrature, for x in the strip away from its edges by 1e-6.
  [[nodiscard]] double log_upsilon_strip(double x) const {
    check_strip(x);
    const double a = centre() - x;
    const double rate = centre() - std::abs(a);
    auto near = [&](double t) {
      if (t < cfg_.series_cutoff) return upsilon_series(a, t);
      return (a * a * std::exp(-t) - sinh_ratio(a, t)) / t;
    };
    auto far = [&](double t) { return -sinh_ratio(a, t) / t; };
    // The a^2 e^{-t}/t tail over [split, inf) is a^2 E1(split).
    return integrate(near, far, rate) + a * a * e1(cfg_.split);
  }

  /// ln Gamma_b(x) by quadrature, same domain as log_upsilon_strip.
  [[nodiscard]] double log_gamma_b_strip(double x) const {
    check_strip(x);
    const double a = centre() - x;
    const double rate = std::min(x, centre());
    auto t1 = [&](double t) {
      return std::exp(-centre() * t) * std::expm1(a * t) / (std::expm1(-b_ * t) * std::expm1(-t / b_));
    };
    auto near = [&](double t) {
      if (t < cfg_.series_cutoff) return gamma_b_series(a, t);
      return (t1(t) - 0.5 * a * a * std::exp(-t) - a / t) / t;
    };
    auto far = [&](double t) { return t1(t) / t; };
    // Tails over [split, inf): -a^2 E1(split)/2 and -a/split.
    return integrate(near, far, rate) - 0.5 * a * a * e1(cfg_.split) - a / cfg_.split;
  }

  /// Upsilon_b(x) for any real x.
  [[nodiscard]] SpecialValue upsilon(double x) const {
    SpecialValue acc;
    const double lb = std::log(b_);
    // Upsilon(y + s) = gamma(s y) s^{1 - 2 s y} Upsilon(y) for s = b, and with s -> 1/b for the
    // second relation since b^{-1 + 2y/b} = (1/b)^{1 - 2y/b}.
    auto shift = [&](double& y, double s, double ls, double half) {
      while (y - centre() > half + 1e-9) {
        y -= s;
        SpecialValue g = gamma_ratio(s * y);
        g.log_abs += g.order * ls;
        acc *= g;
        acc.log_abs += (1.0 - 2.0 * s * y) * ls;
      }
      while (centre() - y > half + 1e-9) {
        SpecialValue g = gamma_ratio(s * y);
        g.log_abs += g.order * ls;
        acc /= g;
        acc.log_abs -= (1.0 - 2.0 * s * y) * ls;
        y += s;
      }
    };
    double y = x;
    shift(y, b_, lb, 0.5 * b_);
    shift(y, 1.0 / b_, -lb, 0.5 / b_);
    acc.log_abs += log_upsilon_strip(y);
    return acc;
  }

  /// Gamma_b(x) for any real x; poles carry negative order.
  [[nodiscard]] SpecialValue gamma_b(double x) const {
    SpecialValue acc;
    const double half_log_2pi = 0.5 * std::log(2.0 * std::numbers::pi);
    // Gamma_b(y + s) = sqrt(2 pi) s^{s y - 1/2} / Gamma(s y) Gamma_b(y), s in {b, 1/b}.
    auto shift = [&](double& y, double s, double ls, double half) {
      while (y - centre() > half + 1e-9) {
        y -= s;
        SpecialValue g = gamma_fn(s * y);
        g.log_abs += g.order * ls;
        acc /= g;
        acc.log_abs += half_log_2pi + (s * y - 0.5) * ls;
      }
      while (centre() - y > half + 1e-9) {
        SpecialValue g = gamma_fn(s * y);
        g.log_abs += g.order * ls;
        acc *= g;
        acc.log_abs -= half_log_2pi + (s * y - 0.5) * ls;
        y += s;
      }
    };
    double y = x;
    shift(y, b_, std::log(b_), 0.5 * b_);
    shift(y, 1.0 / b_, -std::log(b_), 0.5 / b_);
    acc.log_abs += log_gamma_b_strip(y);
    return acc;
  }

 private:
  void check_strip(double x) const {
    if (!(x > 1e-6 && x < q_ - 1e-6)) throw std::domain_error("strip quadrature needs 0 < x < b + 1/b");
  }

  static double e1(double x) { return -std::expint(-x); }

  /// sinh^2(a t/2) / (sinh(b t/2) sinh(t/(2b))), overflow-free.
  [[nodiscard]] double sinh_ratio(double a, double t) const {
    const double aa = std::abs(a);
    const double num = std::expm1(-aa * t);
    return std::exp((aa - centre()) * t) * num * num / (std::expm1(-b_ * t) * std::expm1(-t / b_));
  }

  [[nodiscard]] double upsilon_series(double a, double t) const {
    const double a2 = a * a, a4 = a2 * a2, p = p_;
    const double c0 = -a2;
    const double c1 = -a4 / 12 + a2 * p / 24 + a2 / 2;
    const double c2 = -a2 / 6;
    const double c3 = -a4 * a2 / 360 + a4 * p / 288 - 7 * a2 * p * p / 5760 + 61 * a2 / 1440;
    const double c4 = -a2 / 120;
    const double c5 = -a4 * a4 / 20160 + a4 * a2 * p / 8640 - 7 * a4 * p * p / 69120 + a4 / 17280 +
                      31 * a2 * p * p * p / 967680 - 11 * a2 * p / 241920 + a2 / 720;
    return c0 + t * (c1 + t * (c2 + t * (c3 + t * (c4 + t * c5))));
  }

  [[nodiscard]] double gamma_b_series(double a, double t) const {
    const double a2 = a * a, a3 = a2 * a, a4 = a2 * a2, p = p_;
    const double c0 = a3 / 6 + a2 / 2 - a * p / 24;
    const double c1 = a4 / 24 - a2 * p / 48 - a2 / 4;
    const double c2 = a4 * a / 120 - a3 * p / 144 + a2 / 12 + 7 * a * p * p / 5760 - a / 1440;
    const double c3 = a4 * a2 / 720 - a4 * p / 576 + 7 * a2 * p * p / 11520 - 61 * a2 / 2880;
    const double c4 = a4 * a3 / 5040 - a4 * a * p / 2880 + 7 * a3 * p * p / 34560 - a3 / 8640 + a2 / 240 -
                      31 * a * p * p * p / 967680 + 11 * a * p / 241920;
    const double c5 = a4 * a4 / 40320 - a4 * a2 * p / 17280 + 7 * a4 * p * p / 138240 - a4 / 34560 -
                      31 * a2 * p * p * p / 1935360 + 11 * a2 * p / 483840 - a2 / 1440;
    return c0 + t * (c1 + t * (c2 + t * (c3 + t * (c4 + t * c5))));
  }

  template <class Near, class Far>
  [[nodiscard]] double integrate(Near&& near, Far&& far, double rate) const {
    ExactSum s;
    for (std::size_t i = 0; i + 1 < near_edges_.size(); ++i)
      s.add(gl_.integrate(near, near_edges_[i], near_edges_[i + 1]));
    const double end = cfg_.split + cfg_.tail / rate;
    const int panels = std::max(1, static_cast<int>(std::ceil((end - cfg_.split) / tail_width_)));
    const double w = (end - cfg_.split) / panels;
    for (int i = 0; i < panels; ++i) s.add(gl_.integrate(far, cfg_.split + i * w, cfg_.split + (i + 1) * w));
    return s.value();
  }

  double b_;
  double q_ = 0.0, p_ = 0.0;
  QuadratureConfig cfg_;
  GaussLegendre gl_;
  std::vector<double> near_edges_;
  double tail_width_ = 1.0;
};

inline SpecialValue upsilon(double x, const UpsilonEvaluator& ev) { return ev.upsilon(x); }
inline SpecialValue gamma_b(double x, const UpsilonEvaluator& ev) { return ev.gamma_b(x); }

}  // namespace toda
