#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "toda/hyper_blocks.hpp"
#include "toda/nonscalar_fields.hpp"
#include "toda/special_functions.hpp"

namespace toda {

/// One Upsilon factor of a three-point constant, kept for auditing.
struct UpsilonFactor {
  std::string role;
  double argument = 0.0;
  /// Exponent in the product: 1, -1, 1/2, -1/2 or -n.
  double power = 1.0;
  SpecialValue value;
};

struct ThreePointResult {
  SpecialValue value;
  std::vector<UpsilonFactor> components;
  /// Twice the total zero order; odd values come from square roots of simple zeros.
  int order_twice = 0;

  [[nodiscard]] bool finite() const { return order_twice == 0; }
  /// Odd leftover root order or a non-real overall phase.
  [[nodiscard]] bool flagged() const { return value.flagged || !value.is_real(); }
};

/// Semi-degenerate third field kappa omega_1 or kappa omega_{n-1}.
struct SemiDegenerate {
  Channel channel = Channel::omega_last;
  double kappa = 0.0;
};

namespace detail {

inline std::vector<double> shifted_pairings(const NumericWeight& a, const TodaParams& p) {
  const NumericWeight x = a - p.Q();
  std::vector<double> out;
  for (int k = 1; k <= p.n; ++k) out.push_back(weight_dot(evaluate(h_vec(p.n, k)), x));
  return out;
}

class UpsilonProduct {
 public:
  explicit UpsilonProduct(const UpsilonEvaluator& ev) : ev_(ev) {}

  void add(const std::string& role, double x, int power) {
    const SpecialValue v = ev_.upsilon(x);
    out_.components.push_back({role, x, static_cast<double>(power), v});
    out_.order_twice += 2 * power * v.order;
    for (int k = 0; k < std::abs(power); ++k) {
      if (power > 0) out_.value *= v;
      else out_.value /= v;
    }
  }

  /// Multiplies by prod_k sqrt(Upsilon(x_k))^{p_k}, or its inverse, with principal roots
  /// taken factor by factor.
  void add_root(const std::string& role, const std::vector<double>& xs, const std::vector<int>& powers, bool inverse) {
    for (std::size_t k = 0; k < xs.size(); ++k) {
      const SpecialValue v = ev_.upsilon(xs[k]);
      const int power = inverse ? -powers[k] : powers[k];
      out_.components.push_back({role, xs[k], 0.5 * power, v});
      out_.order_twice += power * v.order;
      if (power > 0) out_.value *= v.sqrt();
      else out_.value /= v.sqrt();
    }
  }

  ThreePointResult take() { return std::move(out_); }

 private:
  const UpsilonEvaluator& ev_;
  ThreePointResult out_;
};

}  // namespace detail

/// Normalisation M(kappa) = Upsilon(b)^{-n} sqrt(Upsilon(b) Upsilon(b + nQ) / (Upsilon(b + kappa) Upsilon(b - kappa + nQ))),
/// with Q = 1/b - b.
inline ThreePointResult normalisation_M(double kappa, const TodaParams& p, const UpsilonEvaluator& ev) {
  detail::UpsilonProduct prod(ev);
  const double b = p.b, nq = p.n * p.Q_scalar();
  prod.add("M: Upsilon(b)^-n", b, -p.n);
  prod.add_root("M: root", {b, b + nq, b + kappa, b - kappa + nq}, {1, 1, -1, -1}, false);
  return prod.take();
}

/// C(alpha1, alpha2, kappa omega_j) for numeric charges, without genericity checks.
inline ThreePointResult scalar_C(const NumericWeight& a1, const NumericWeight& a2, const SemiDegenerate& s,
                                 const TodaParams& p, const UpsilonEvaluator& ev) {
  check_rank(a1, p);
  check_rank(a2, p);
  if (std::abs(ev.b() - p.b) > 1e-15 * p.b) throw std::invalid_argument("scalar_C: evaluator and params disagree on b");
  const int n = p.n;
  const double b = p.b;
  const double tm = two_mu(n, s.channel, s.kappa, b);
  detail::UpsilonProduct prod(ev);
  ThreePointResult m = normalisation_M(s.kappa, p, ev);
  const auto x1 = detail::shifted_pairings(a1, p), x2 = detail::shifted_pairings(a2, p);
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) prod.add("vertex", b + x1[k] + x2[l] + tm, 1);
  std::vector<double> xs;
  std::vector<int> pw;
  for (const auto* x : {&x1, &x2}) {
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const double e = (*x)[i] - (*x)[j];
        xs.push_back(b + e);
        xs.push_back(b - e);
        pw.push_back(1);
        pw.push_back(1);
      }
    }
  }
  prod.add_root("roots", xs, pw, true);
  ThreePointResult out = prod.take();
  out.value *= m.value;
  out.order_twice += m.order_twice;
  out.components.insert(out.components.begin(), m.components.begin(), m.components.end());
  return out;
}

/// Charge version: alpha1 and alpha2 must be non-degenerate unless one of them is zero.
inline ThreePointResult scalar_C(const Charge& a1, const Charge& a2, const SemiDegenerate& s, const TodaParams& p,
                                 const UpsilonEvaluator& ev, const Bindings& bind = {}) {
  const bool zero1 = !a1.has_continuous() && a1.fixed().is_zero();
  const bool zero2 = !a2.has_continuous() && a2.fixed().is_zero();
  if (!zero1 && !zero2) {
    for (const Charge* a : {&a1, &a2}) {
      const auto g = is_generic(*a, p);
      if (!g.generic) throw std::domain_error("scalar_C: non-generic charge: " + g.exceptions.front());
      if (p.n <= 7) {
        const auto tag = classify_charge(*a);
        if (tag.kind != DegeneracyTag::Kind::generic)
          throw std::domain_error(std::string("scalar_C: ") + to_string(tag.kind) + " charge");
      }
    }
  }
  return scalar_C(a1.evaluate(p.b, bind), a2.evaluate(p.b, bind), s, p, ev);
}

/// Degenerate family used in shift equations.
enum class ShiftFamily { b, minus_inv_b };

inline double shift_value(ShiftFamily f, double b) { return f == ShiftFamily::b ? b : -1.0 / b; }

/// R_ij(alpha1; alpha2) = [C(alpha1 + s h_i, alpha2)/C(alpha1 + s h_j, alpha2)] / prod_k gamma(A_i+B_k)/gamma(A_j+B_k).
inline SpecialValue shift_ratio_scalar(const NumericWeight& a1, const NumericWeight& a2, const SemiDegenerate& sd,
                                       ShiftFamily fam, int i, int j, const TodaParams& p,
                                       const UpsilonEvaluator& ev) {
  const int n = p.n;
  if (i < 0 || j < 0 || i >= n || j >= n) throw std::out_of_range("shift_ratio_scalar: index out of range");
  const double s = shift_value(fam, p.b);
  const ExponentData e = exponents_from_weights(a1, a2, sd.kappa, sd.channel, p, s);
  const NumericWeight hi = evaluate(h_vec(n, i + 1)) * s, hj = evaluate(h_vec(n, j + 1)) * s;
  SpecialValue r = scalar_C(a1 + hi, a2, sd, p, ev).value / scalar_C(a1 + hj, a2, sd, p, ev).value;
  for (int k = 0; k < n; ++k) {
    r /= gamma_ratio(e.A[i] + e.B[k]);
    r *= gamma_ratio(e.A[j] + e.B[k]);
  }
  return r;
}

/// Relative difference of R_ij(alpha1; alpha2) between two alpha2 values; zero when the
/// shift equation holds with alpha2-independent normalising factors.
inline double shift_residual_scalar(const NumericWeight& a1, const NumericWeight& a2, const NumericWeight& a2_other,
                                    const SemiDegenerate& sd, ShiftFamily fam, int i, int j, const TodaParams& p,
                                    const UpsilonEvaluator& ev) {
  const SpecialValue r1 = shift_ratio_scalar(a1, a2, sd, fam, i, j, p, ev);
  const SpecialValue r2 = shift_ratio_scalar(a1, a2_other, sd, fam, i, j, p, ev);
  if (r1.order != r2.order) throw std::domain_error("shift_residual_scalar: singular-marker mismatch");
  return relative_difference(r1, r2);
}

// ---------------------------------------------------------------------------
// Non-scalar constants.
// ---------------------------------------------------------------------------

/// Principal square root of C * Cbar, with the Upsilon factors of both kept at half power.
inline ThreePointResult geometric_mean(const ThreePointResult& c, const ThreePointResult& cbar) {
  ThreePointResult out;
  out.value = (c.value * cbar.value).sqrt();
  for (const auto* r : {&c, &cbar}) {
    const std::string side = r == &c ? "hol " : "antihol ";
    for (auto f : r->components) {
      f.role = side + f.role;
      f.power *= 0.5;
      out.components.push_back(std::move(f));
    }
  }
  const int t = c.order_twice + cbar.order_twice;
  // An odd total is a quarter-order singularity; keep it nonzero and flag it.
  if (t % 2 == 0) {
    out.order_twice = t / 2;
  } else {
    out.order_twice = t;
    out.value.flagged = true;
  }
  return out;
}

/// (alphabar, alpha, sigma^-1): the same field with the two chiralities exchanged.
inline FieldLabel swap_chiralities(const FieldLabel& f) {
  FieldLabel g = f;
  std::swap(g.alpha, g.alphabar);
  g.sigma = f.sigma.inverse();
  return g;
}

namespace detail {

inline double semideg_coefficient(const Charge& a, int j, double b, const Bindings& bind) {
  return a.evaluate(b, bind)[j - 1];
}

inline void check_nonscalar_inputs(const FieldLabel& f1, const FieldLabel& f2, const FieldLabel& f3, Channel channel,
                                   const TodaParams& p) {
  for (const FieldLabel* f : {&f1, &f2, &f3})
    if (f->rank() != p.n) throw std::invalid_argument("nonscalar_C: rank mismatch");
  if (!f3.is_semi_degenerate()) throw std::domain_error("nonscalar_C: third field must be a semi-degenerate label");
  if (direction(channel, p.n) != f3.degeneracy.direction)
    throw std::invalid_argument("nonscalar_C: channel does not match the semi-degenerate direction");
  if (!f1.is_scalar() && !f2.is_scalar())
    throw std::domain_error("nonscalar_C: closed form needs one scalar field");
  for (const FieldLabel* f : {&f1, &f2}) {
    if (!verify_constraints(*f)) throw std::domain_error("nonscalar_C: lattice constraints violated");
    const bool zero = f->is_scalar() && !f->alpha.has_continuous() && f->alpha.fixed().is_zero();
    if (!zero && f->degeneracy.kind != DegeneracyTag::Kind::generic)
      throw std::domain_error(std::string("nonscalar_C: ") + to_string(f->degeneracy.kind) + " field");
  }
  if (!verify_constraints(f3)) throw std::domain_error("nonscalar_C: kappa - kappabar not in Z/b");
  // etahat of a semi-degenerate label with kappa != kappabar is undefined; only eta is gated then.
  const auto [eta_ok, etahat_ok] = neutrality(f1, f2, f3);
  const bool hat_defined = monodromy_charges(f3).etahat.has_value();
  if (!eta_ok) throw std::domain_error("nonscalar_C: eta neutrality violated");
  if (hat_defined && !etahat_ok) throw std::domain_error("nonscalar_C: etahat neutrality violated");
}

}  // namespace detail

/// sqrt(C(alpha1, alpha2, kappa) C(alphabar1, alphabar2, kappabar)) with one scalar field.
inline ThreePointResult nonscalar_C(const FieldLabel& f1, const FieldLabel& f2, const FieldLabel& f3, Channel channel,
                                    const TodaParams& p, const UpsilonEvaluator& ev, const Bindings& bind = {}) {
  detail::check_nonscalar_inputs(f1, f2, f3, channel, p);
  const int j = f3.degeneracy.direction;
  const double kappa = detail::semideg_coefficient(f3.alpha, j, p.b, bind);
  const double kappabar = detail::semideg_coefficient(f3.alphabar, j, p.b, bind);
  const ThreePointResult c =
      scalar_C(f1.alpha.evaluate(p.b, bind), f2.alpha.evaluate(p.b, bind), {channel, kappa}, p, ev);
  const ThreePointResult cbar =
      scalar_C(f1.alphabar.evaluate(p.b, bind), f2.alphabar.evaluate(p.b, bind), {channel, kappabar}, p, ev);
  return geometric_mean(c, cbar);
}

/// f1 shifted by the degenerate family: (alpha + s h_sigma(i), alphabar + s h_i) for s = -1/b,
/// (alpha + b h_i, alphabar + b h_i) for s = b.
inline FieldLabel shifted_field(const FieldLabel& f, ShiftFamily fam, int i) {
  const int n = f.rank();
  const bool twisted = fam == ShiftFamily::minus_inv_b;
  const CoeffB s = twisted ? CoeffB::inv_b(-1) : CoeffB::b();
  FieldLabel g = f;
  g.alpha = f.alpha + Charge(scaled(h_vec(n, (twisted ? f.sigma(i) : i) + 1), s));
  g.alphabar = f.alphabar + Charge(scaled(h_vec(n, i + 1), s));
  g.degeneracy = detail::field_tag(g.alpha, g.alphabar);
  return g;
}

/// [C(f1 shifted by i)/C(f1 shifted by j)] / sqrt(prod_k gamma(A_i'+B_k) gamma(Abar_i+Bbar_k) / (i -> j)),
/// with A_i' = A_sigma1(i) for the -1/b family.
inline SpecialValue shift_ratio_nonscalar(const FieldLabel& f1, const FieldLabel& f2, const FieldLabel& f3,
                                          Channel channel, ShiftFamily fam, int i, int j, const TodaParams& p,
                                          const UpsilonEvaluator& ev, const Bindings& bind = {}) {
  const int n = p.n;
  if (i < 0 || j < 0 || i >= n || j >= n) throw std::out_of_range("shift_ratio_nonscalar: index out of range");
  const int d = f3.degeneracy.direction;
  const double kappa = detail::semideg_coefficient(f3.alpha, d, p.b, bind);
  const double kappabar = detail::semideg_coefficient(f3.alphabar, d, p.b, bind);
  const double s = shift_value(fam, p.b);
  const ExponentData e = exponents_from_weights(f1.alpha.evaluate(p.b, bind), f2.alpha.evaluate(p.b, bind), kappa,
                                                channel, p, s);
  const ExponentData ebar = exponents_from_weights(f1.alphabar.evaluate(p.b, bind), f2.alphabar.evaluate(p.b, bind),
                                                   kappabar, channel, p, s);
  const bool twisted = fam == ShiftFamily::minus_inv_b;
  const int ih = twisted ? f1.sigma(i) : i, jh = twisted ? f1.sigma(j) : j;
  SpecialValue gam;
  for (int k = 0; k < n; ++k) {
    gam *= gamma_ratio(e.A[ih] + e.B[k]) * gamma_ratio(ebar.A[i] + ebar.B[k]);
    gam /= gamma_ratio(e.A[jh] + e.B[k]) * gamma_ratio(ebar.A[j] + ebar.B[k]);
  }
  const ThreePointResult ci = nonscalar_C(shifted_field(f1, fam, i), f2, f3, channel, p, ev, bind);
  const ThreePointResult cj = nonscalar_C(shifted_field(f1, fam, j), f2, f3, channel, p, ev, bind);
  return ci.value / cj.value / gam.sqrt();
}

/// alpha2-independence of the non-scalar shift ratio. f2_other is evaluated with bind_other
/// layered over bind. residual compares magnitudes; the geometric mean fixes the sign only up
/// to a choice, so sign agreement is reported separately.
struct NonScalarShiftResidual {
  double residual = 0.0;
  bool sign_agrees = true;
  SpecialValue ratio, ratio_other;
};

inline NonScalarShiftResidual shift_residual_nonscalar(const FieldLabel& f1, const FieldLabel& f2,
                                                       const FieldLabel& f2_other, const FieldLabel& f3,
                                                       Channel channel, ShiftFamily fam, int i, int j,
                                                       const TodaParams& p, const UpsilonEvaluator& ev,
                                                       const Bindings& bind = {}, const Bindings& bind_other = {}) {
  NonScalarShiftResidual r;
  r.ratio = shift_ratio_nonscalar(f1, f2, f3, channel, fam, i, j, p, ev, bind);
  Bindings merged = bind_other;
  merged.insert(bind.begin(), bind.end());
  r.ratio_other = shift_ratio_nonscalar(f1, f2_other, f3, channel, fam, i, j, p, ev, merged);
  if (r.ratio.order != r.ratio_other.order) throw std::domain_error("shift_residual_nonscalar: singular-marker mismatch");
  r.residual = std::abs(std::expm1(r.ratio.log_abs - r.ratio_other.log_abs));
  r.sign_agrees = r.ratio.sign == r.ratio_other.sign && r.ratio.quarter == r.ratio_other.quarter;
  return r;
}

}  // namespace toda
