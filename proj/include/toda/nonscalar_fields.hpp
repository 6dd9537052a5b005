#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "toda/kinematics.hpp"

namespace toda {

/// A primary Phi^{(sigma)}_{alpha, alphabar}, with tau normalised to the identity.
struct FieldLabel {
  Charge alpha, alphabar;
  WeylElement sigma;
  DegeneracyTag degeneracy;

  [[nodiscard]] int rank() const { return alpha.rank(); }
  [[nodiscard]] bool is_scalar() const { return sigma.is_identity() && alpha == alphabar; }
  /// A (kappa omega_j, kappabar omega_j) label with sigma = identity.
  [[nodiscard]] bool is_semi_degenerate() const {
    if (degeneracy.kind != DegeneracyTag::Kind::semi_degenerate || !sigma.is_identity()) return false;
    const int j = degeneracy.direction;
    if (j < 1 || j > rank() - 1) return false;
    for (const Charge* c : {&alpha, &alphabar}) {
      for (int i = 0; i < rank() - 1; ++i) {
        if (i == j - 1) continue;
        if (!c->fixed()[i].is_zero()) return false;
        for (const auto& [name, dir] : c->cont())
          if (!dir[i].is_zero()) return false;
      }
    }
    return true;
  }
};

/// Exact Z_n charges. etahat is absent for a semi-degenerate label with
/// kappa != kappabar, where alpha - alphabar lies in R*/b but not in bR*.
struct MonodromyCharge {
  Rational eta{0};
  std::optional<Rational> etahat = Rational(0);
};

namespace detail {

inline DegeneracyTag field_tag(const Charge& a, const Charge& abar) {
  if (a.rank() > 7) {
    DegeneracyTag t;
    if (!is_generic(a).generic || !is_generic(abar).generic) t.kind = DegeneracyTag::Kind::non_generic;
    return t;
  }
  const DegeneracyTag t1 = classify_charge(a), t2 = classify_charge(abar);
  auto rank_of = [](DegeneracyTag::Kind k) {
    switch (k) {
      case DegeneracyTag::Kind::fully_degenerate: return 3;
      case DegeneracyTag::Kind::semi_degenerate: return 2;
      case DegeneracyTag::Kind::non_generic: return 1;
      case DegeneracyTag::Kind::generic: return 0;
    }
    return 0;
  };
  return rank_of(t2.kind) > rank_of(t1.kind) ? t2 : t1;
}

/// h-coefficients of a rational weight, normalised to sum zero.
inline std::vector<Rational> centred_h(const RationalWeight& w) {
  std::vector<Rational> c = w.h_coeffs();
  Rational mean(0);
  for (const auto& x : c) mean += x;
  mean /= static_cast<std::int64_t>(c.size());
  for (auto& x : c) x -= mean;
  return c;
}

}  // namespace detail

/// alpha = Q + b M - sigma(N)/b + F and alphabar = Q + b M - N/b + F.
///
/// (1 - sigma) M and (1 - sigma) N must lie in R*, and F must be sigma-invariant.
inline FieldLabel make_field(const WeylElement& sigma, const RationalWeight& M, const RationalWeight& N,
                             const Charge& F) {
  const int n = sigma.rank();
  if (M.rank() != n || N.rank() != n || F.rank() != n) throw std::invalid_argument("make_field: rank mismatch");
  if (!in_lattice(M - weyl_act(sigma, M), LatticeKind::weight))
    throw std::invalid_argument("make_field: (1 - sigma) M is not in the weight lattice");
  if (!in_lattice(N - weyl_act(sigma, N), LatticeKind::weight))
    throw std::invalid_argument("make_field: (1 - sigma) N is not in the weight lattice");
  if (!(weyl_act(sigma, F) == F)) throw std::invalid_argument("make_field: F is not sigma-invariant");
  const Charge q = background_charge(n);
  const Charge bm(scaled(M, CoeffB::b()));
  FieldLabel f;
  f.alpha = q + bm - Charge(scaled(weyl_act(sigma, N), CoeffB::inv_b())) + F;
  f.alphabar = q + bm - Charge(scaled(N, CoeffB::inv_b())) + F;
  f.sigma = sigma;
  f.degeneracy = detail::field_tag(f.alpha, f.alphabar);
  return f;
}

inline FieldLabel make_scalar_field(const Charge& alpha) {
  FieldLabel f;
  f.alpha = f.alphabar = alpha;
  f.sigma = WeylElement::identity(alpha.rank());
  f.degeneracy = detail::field_tag(alpha, alpha);
  return f;
}

/// Preimage X with (1 - sigma) X = S, fixed by X = 0 on the first element of each cycle.
/// S must lie in R* and be orthogonal to every sigma-invariant vector.
inline RationalWeight cycle_preimage(const WeylElement& sigma, const RationalWeight& S) {
  const int n = sigma.rank();
  if (S.rank() != n) throw std::invalid_argument("cycle_preimage: rank mismatch");
  if (!in_lattice(S, LatticeKind::weight)) throw std::invalid_argument("cycle_preimage: S is not in the weight lattice");
  const std::vector<Rational> s = detail::centred_h(S);
  std::vector<Rational> x(static_cast<std::size_t>(n), Rational(0));
  for (const auto& cyc : sigma.cycles()) {
    Rational total(0);
    for (int k : cyc) total += s[k];
    if (!is_zero(total)) throw std::invalid_argument("cycle_preimage: S is not in the image of 1 - sigma");
    // ((1 - sigma) X)_{c_i} = X_{c_i} - X_{c_{i-1}}.
    for (std::size_t i = 1; i < cyc.size(); ++i) x[cyc[i]] = x[cyc[i - 1]] + s[cyc[i]];
  }
  return RationalWeight::from_h(x);
}

/// Fields built from two weight-lattice vectors S = (1 - sigma) M and R = (1 - sigma) N,
/// one per sl_m block of the cycle decomposition, plus a sigma-invariant continuous part F.
inline FieldLabel make_field_sln(const WeylElement& sigma, const RationalWeight& S, const RationalWeight& R,
                                 const Charge& F) {
  return make_field(sigma, cycle_preimage(sigma, S), cycle_preimage(sigma, R), F);
}

inline FieldLabel make_field_sln(const WeylElement& sigma, const RationalWeight& S, const RationalWeight& R) {
  return make_field_sln(sigma, S, R, Charge(sigma.rank()));
}

inline bool is_half_integer(const Rational& r) { return is_integer(r * 2); }

/// sl_2 field with Kac indices (r, s) in (Z/2)^2: Delta = Delta_{r,s}, Deltabar = Delta_{-r,s}.
inline FieldLabel make_field_sl2(const Rational& r, const Rational& s) {
  if (!is_half_integer(r) || !is_half_integer(s)) throw std::invalid_argument("make_field_sl2: r and s must be in Z/2");
  const RationalWeight w = omega(2, 1);
  return make_field(WeylElement::transposition(2, 1, 2), w * s, w * (-r), Charge(2));
}

/// Kac-table charge [(1-n1)/b - (1-m1)b] omega_1 + [(1-n2)/b - (1-m2)b] omega_2.
inline Charge kac_charge_sl3(const Rational& n1, const Rational& m1, const Rational& n2, const Rational& m2) {
  ExactWeight w(3);
  w[0] = CoeffB(0, m1 - 1, 1 - n1);
  w[1] = CoeffB(0, m2 - 1, 1 - n2);
  return Charge(w);
}

enum class Sl3Class { identity, cyclic, transposition };

struct Sl3FieldSpec {
  Sl3Class cls = Sl3Class::identity;
  /// identity class: the scalar charge.
  Charge scalar = Charge(3);
  /// cyclic class, sigma = (123): indices in Z/3 with n1 - n2 and m1 - m2 integral.
  Rational n1{0}, n2{0}, m1{0}, m2{0};
  /// transposition class, sigma = (12): integers r, s and the h_3 component beta.
  Rational r{0}, s{0};
  CoeffB beta;
  /// When set, beta is a continuous parameter of this name added to the exact beta.
  std::string beta_param;
};

inline FieldLabel make_field_sl3(const Sl3FieldSpec& spec) {
  switch (spec.cls) {
    case Sl3Class::identity:
      if (spec.scalar.rank() != 3) throw std::invalid_argument("make_field_sl3: scalar charge must have n = 3");
      return make_scalar_field(spec.scalar);
    case Sl3Class::cyclic: {
      for (const Rational* x : {&spec.n1, &spec.n2, &spec.m1, &spec.m2})
        if (!is_integer(*x * 3)) throw std::invalid_argument("make_field_sl3: cyclic indices must be in Z/3");
      if (!is_integer(spec.n1 - spec.n2) || !is_integer(spec.m1 - spec.m2))
        throw std::invalid_argument("make_field_sl3: n1 - n2 and m1 - m2 must be integers");
      RationalWeight M(3), N(3);
      M[0] = spec.m1;
      M[1] = spec.m2;
      N[0] = spec.n1;
      N[1] = spec.n2;
      return make_field(WeylElement::from_cycles(3, "(123)"), M, N, Charge(3));
    }
    case Sl3Class::transposition: {
      if (!is_integer(spec.r) || !is_integer(spec.s))
        throw std::invalid_argument("make_field_sl3: transposition indices r, s must be integers");
      const RationalWeight e1 = simple_root(3, 1), h3 = h_vec(3, 3);
      Charge F(scaled(h3, spec.beta));
      if (!spec.beta_param.empty()) F += Charge::continuous(spec.beta_param, h3);
      return make_field(WeylElement::transposition(3, 1, 2), e1 * (spec.s / 2), e1 * (-spec.r / 2), F);
    }
  }
  throw std::logic_error("make_field_sl3: bad class");
}

/// Semi-degenerate (kappa omega_j, kappabar omega_j), optionally with a shared continuous parameter.
inline bool semideg_nonscalar_check(const CoeffB& kappa, const CoeffB& kappabar) {
  return in_z_over_b(kappa - kappabar);
}

inline FieldLabel make_semidegenerate_field(int n, int j, const CoeffB& kappa, const CoeffB& kappabar,
                                            const std::string& param = "") {
  if (!semideg_nonscalar_check(kappa, kappabar))
    throw std::invalid_argument("make_semidegenerate_field: kappa - kappabar must lie in Z/b");
  FieldLabel f;
  f.alpha = semi_degenerate_charge(n, j, kappa);
  f.alphabar = semi_degenerate_charge(n, j, kappabar);
  if (!param.empty()) {
    const Charge c = Charge::continuous(param, omega(n, j));
    f.alpha += c;
    f.alphabar += c;
  }
  f.sigma = WeylElement::identity(n);
  f.degeneracy.kind = DegeneracyTag::Kind::semi_degenerate;
  f.degeneracy.direction = j;
  f.degeneracy.kappa = kappa;
  return f;
}

/// alpha - alphabar in R*/b and alpha - sigma * alphabar in bR*. A semi-degenerate label
/// only needs the first condition.
inline bool verify_constraints(const FieldLabel& f) {
  const int n = f.rank();
  if (f.alphabar.rank() != n || f.sigma.rank() != n) return false;
  const Charge d1 = f.alpha - f.alphabar;
  if (d1.has_continuous() || !lattice_member(d1, {LatticeKind::weight, LatticeScale::inv_b})) return false;
  if (f.is_semi_degenerate()) return true;
  const Charge d2 = f.alpha - star_act(f.sigma, f.alphabar);
  return !d2.has_continuous() && lattice_member(d2, {LatticeKind::weight, LatticeScale::b});
}

/// eta = b h_1.(alpha - alphabar), etahat = -(1/b) h_1.(alpha - sigma * alphabar), both mod 1.
inline MonodromyCharge monodromy_charges(const FieldLabel& f) {
  if (!verify_constraints(f)) throw std::domain_error("monodromy_charges: lattice constraints violated");
  const int n = f.rank();
  const RationalWeight h1 = h_vec(n, 1);
  MonodromyCharge m;
  m.eta = frac(exact_pair(f.alpha - f.alphabar, h1).w);
  if (f.is_semi_degenerate()) {
    if (!(f.alpha == f.alphabar)) m.etahat.reset();
    return m;
  }
  m.etahat = frac(-exact_pair(f.alpha - star_act(f.sigma, f.alphabar), h1).v);
  return m;
}

/// (sum eta in Z, sum etahat in Z). The second is false when some etahat is undefined.
inline std::pair<bool, bool> neutrality(const FieldLabel& f1, const FieldLabel& f2, const FieldLabel& f3) {
  Rational eta(0), etahat(0);
  bool hat_defined = true;
  for (const FieldLabel* f : {&f1, &f2, &f3}) {
    const MonodromyCharge m = monodromy_charges(*f);
    eta += m.eta;
    if (m.etahat) etahat += *m.etahat;
    else hat_defined = false;
  }
  return {is_integer(eta), hat_defined && is_integer(etahat)};
}

inline bool is_generic_field(const FieldLabel& f) { return is_generic(f.alpha).generic && is_generic(f.alphabar).generic; }

/// Phi^{(sigma)}_{2Q - alpha, 2Q - alphabar}.
inline FieldLabel dual_field(const FieldLabel& f) {
  const Charge q2 = Rational(2) * background_charge(f.rank());
  FieldLabel d = f;
  d.alpha = q2 - f.alpha;
  d.alphabar = q2 - f.alphabar;
  d.degeneracy = f.is_semi_degenerate() ? f.degeneracy : detail::field_tag(d.alpha, d.alphabar);
  return d;
}

/// (mu * alpha, mu * alphabar, mu sigma mu^-1): the same primary.
inline FieldLabel relabel(const FieldLabel& f, const WeylElement& mu) {
  FieldLabel g = f;
  g.alpha = star_act(mu, f.alpha);
  g.alphabar = star_act(mu, f.alphabar);
  g.sigma = mu * f.sigma * mu.inverse();
  return g;
}

/// Fusion with a fully degenerate field. b-type shifts act diagonally; 1/b-type shifts
/// act on alpha through sigma: (alpha + s h_sigma(j), alphabar + s h_j).
inline std::vector<FieldLabel> fuse_nonscalar_degenerate(const FieldLabel& f, FullyDegenerate d) {
  if (f.is_semi_degenerate()) throw std::domain_error("fuse_nonscalar_degenerate: semi-degenerate input");
  if (!is_generic_field(f)) throw std::domain_error("fuse_nonscalar_degenerate: field is not generic");
  const int n = f.rank();
  const CoeffB s = degenerate_shift(d);
  const bool twisted = d == FullyDegenerate::minus_omega1_over_b || d == FullyDegenerate::minus_omega_last_over_b;
  std::vector<FieldLabel> out;
  for (int j = 0; j < n; ++j) {
    FieldLabel g = f;
    const int k = twisted ? f.sigma(j) : j;
    g.alpha = f.alpha + Charge(scaled(h_vec(n, k + 1), s));
    g.alphabar = f.alphabar + Charge(scaled(h_vec(n, j + 1), s));
    g.degeneracy = detail::field_tag(g.alpha, g.alphabar);
    out.push_back(std::move(g));
  }
  return out;
}

/// Delta(alpha) - Delta(alphabar).
inline double spin(const FieldLabel& f, const TodaParams& p, const Bindings& bind = {}) {
  return delta(f.alpha, p, bind) - delta(f.alphabar, p, bind);
}

}  // namespace toda
