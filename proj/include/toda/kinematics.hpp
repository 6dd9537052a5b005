#pragma once

#include <cmath>
#include <complex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "toda/lie_lattice.hpp"

namespace toda {

/// Rank n and coupling b of the sl_n Toda theory.
struct TodaParams {
  int n = 3;
  double b = 0.731;
  /// Set when b^2 is within 1e-6 of p/q with q <= 12.
  bool genericity_warning = false;

  TodaParams() { genericity_warning = near_rational(b * b); }
  TodaParams(int n_, double b_) : n(n_), b(b_) {
    if (n < 2) throw std::invalid_argument("TodaParams: n must be at least 2");
    if (!(b > 0) || !std::isfinite(b)) throw std::invalid_argument("TodaParams: b must be a positive real");
    genericity_warning = near_rational(b * b);
  }

  [[nodiscard]] double Q_scalar() const { return 1.0 / b - b; }
  [[nodiscard]] NumericWeight Q() const { return evaluate(rho(n)) * Q_scalar(); }
  [[nodiscard]] double c() const {
    const double q = Q_scalar();
    return (n - 1) * (1.0 - n * (n + 1) * q * q);
  }

  static bool near_rational(double x) {
    for (int q = 1; q <= 12; ++q) {
      const double p = std::round(x * q);
      if (std::abs(x - p / q) < 1e-6) return true;
    }
    return false;
  }
};

inline double central_charge(const TodaParams& p) { return p.c(); }

inline void check_rank(const NumericWeight& a, const TodaParams& p) {
  if (a.rank() != p.n) throw std::invalid_argument("charge rank does not match TodaParams.n");
}

/// Delta = alpha.(alpha - 2Q)/2.
inline double delta(const NumericWeight& a, const TodaParams& p) {
  check_rank(a, p);
  const NumericWeight q = p.Q();
  return 0.5 * weight_dot(a, a - q - q);
}

inline double delta(const Charge& a, const TodaParams& p, const Bindings& bind = {}) {
  return delta(a.evaluate(p.b, bind), p);
}

/// Spin-3 zero mode for n = 3. Complex because 22 + 5c is negative when c < -22/5.
inline std::complex<double> w3_charge(const NumericWeight& a, const TodaParams& p) {
  if (p.n != 3) throw std::invalid_argument("w3_charge is only defined for n = 3");
  check_rank(a, p);
  const double denom = 22.0 + 5.0 * p.c();
  if (std::abs(denom) < 1e-12) throw std::domain_error("w3_charge: central charge at the pole c = -22/5");
  const NumericWeight x = a - p.Q();
  double prod = 1.0;
  for (int k = 1; k <= 3; ++k) prod *= weight_dot(x, evaluate(h_vec(3, k)));
  return std::sqrt(std::complex<double>(48.0 / denom, 0.0)) * prod;
}

inline std::complex<double> w3_charge(const Charge& a, const TodaParams& p, const Bindings& bind = {}) {
  return w3_charge(a.evaluate(p.b, bind), p);
}

/// w^2, which is real for any real charge and coupling.
inline double w3_squared(const NumericWeight& a, const TodaParams& p) {
  if (p.n != 3) throw std::invalid_argument("w3_squared is only defined for n = 3");
  const NumericWeight x = a - p.Q();
  double prod = 1.0;
  for (int k = 1; k <= 3; ++k) prod *= weight_dot(x, evaluate(h_vec(3, k)));
  return 48.0 / (22.0 + 5.0 * p.c()) * prod * prod;
}

/// |9 w^2 - 2 Delta^2 (32 Delta + 2 - c) / (22 + 5c)|.
inline double check_semidegenerate_identity(const NumericWeight& a, const TodaParams& p) {
  const double d = delta(a, p);
  const double c = p.c();
  return std::abs(9.0 * w3_squared(a, p) - 2.0 * d * d * (32.0 * d + 2.0 - c) / (22.0 + 5.0 * c));
}

// ---------------------------------------------------------------------------
// Genericity.
// ---------------------------------------------------------------------------

struct GenericityReport {
  bool generic = true;
  /// True when continuous parameters make the answer hold only off an exceptional set.
  bool conditional = false;
  /// Human-readable exceptional conditions, one per root with continuous dependence.
  std::vector<std::string> exceptions;

  explicit operator bool() const { return generic; }
};

/// Exact pairing (alpha - Q).(h_i - h_j) split into fixed part and per-parameter slopes.
struct ExactPairing {
  CoeffB fixed;
  std::map<std::string, CoeffB> slopes;
};

inline ExactPairing shifted_root_pairing(const Charge& a, int i, int j) {
  const int n = a.rank();
  const RationalWeight root = h_vec(n, i) - h_vec(n, j);
  const Charge x = a - background_charge(n);
  ExactPairing out{pair(x.fixed(), root), {}};
  for (const auto& [name, dir] : x.cont()) {
    CoeffB s = pair(dir, root);
    if (!s.is_zero()) out.slopes[name] = s;
  }
  return out;
}

/// Generic iff (alpha - Q).(h_i - h_j) lies in neither Z/b nor bZ for all i != j.
inline GenericityReport is_generic(const Charge& a) {
  GenericityReport r;
  const int n = a.rank();
  for (int i = 1; i <= n; ++i) {
    for (int j = i + 1; j <= n; ++j) {
      const ExactPairing p = shifted_root_pairing(a, i, j);
      if (p.slopes.empty()) {
        if (in_z_over_b(p.fixed) || in_b_z(p.fixed)) {
          r.generic = false;
          r.exceptions.push_back("(alpha-Q).(h_" + std::to_string(i) + "-h_" + std::to_string(j) +
                                 ") = " + to_string(p.fixed));
        }
        continue;
      }
      r.conditional = true;
      std::string expr = to_string(p.fixed);
      for (const auto& [name, s] : p.slopes) expr += " + (" + to_string(s) + ")*" + name;
      r.exceptions.push_back("(alpha-Q).(h_" + std::to_string(i) + "-h_" + std::to_string(j) + ") = " + expr +
                             " in Z/b or bZ");
    }
  }
  if (!r.generic) r.conditional = false;
  return r;
}

inline GenericityReport is_generic(const Charge& a, const TodaParams& p) {
  if (a.rank() != p.n) throw std::invalid_argument("charge rank does not match TodaParams.n");
  return is_generic(a);
}

// ---------------------------------------------------------------------------
// Degenerate fields and classification.
// ---------------------------------------------------------------------------

enum class FullyDegenerate { b_omega1, b_omega_last, minus_omega1_over_b, minus_omega_last_over_b };

inline const char* to_string(FullyDegenerate d) {
  switch (d) {
    case FullyDegenerate::b_omega1: return "b*omega_1";
    case FullyDegenerate::b_omega_last: return "b*omega_{n-1}";
    case FullyDegenerate::minus_omega1_over_b: return "-omega_1/b";
    case FullyDegenerate::minus_omega_last_over_b: return "-omega_{n-1}/b";
  }
  return "?";
}

inline FullyDegenerate parse_fully_degenerate(const std::string& s) {
  if (s == "b_omega1" || s == "b*omega_1") return FullyDegenerate::b_omega1;
  if (s == "b_omega_last" || s == "b*omega_{n-1}") return FullyDegenerate::b_omega_last;
  if (s == "minus_omega1_over_b" || s == "-omega_1/b") return FullyDegenerate::minus_omega1_over_b;
  if (s == "minus_omega_last_over_b" || s == "-omega_{n-1}/b") return FullyDegenerate::minus_omega_last_over_b;
  throw std::invalid_argument("unknown degenerate label '" + s + "'");
}

inline Charge degenerate_charge(FullyDegenerate d, int n) {
  switch (d) {
    case FullyDegenerate::b_omega1: return Charge(scaled(omega(n, 1), CoeffB::b()));
    case FullyDegenerate::b_omega_last: return Charge(scaled(omega(n, n - 1), CoeffB::b()));
    case FullyDegenerate::minus_omega1_over_b: return Charge(scaled(omega(n, 1), CoeffB::inv_b(-1)));
    case FullyDegenerate::minus_omega_last_over_b: return Charge(scaled(omega(n, n - 1), CoeffB::inv_b(-1)));
  }
  throw std::logic_error("bad FullyDegenerate");
}

/// The shift s with fusion outputs alpha + s * h_j.
inline CoeffB degenerate_shift(FullyDegenerate d) {
  switch (d) {
    case FullyDegenerate::b_omega1: return CoeffB::b();
    case FullyDegenerate::b_omega_last: return CoeffB::b(-1);
    case FullyDegenerate::minus_omega1_over_b: return CoeffB::inv_b(-1);
    case FullyDegenerate::minus_omega_last_over_b: return CoeffB::inv_b();
  }
  throw std::logic_error("bad FullyDegenerate");
}

struct DegeneracyTag {
  enum class Kind { generic, non_generic, semi_degenerate, fully_degenerate };
  Kind kind = Kind::generic;
  /// Semi-degenerate direction j in {1, n-1}.
  int direction = 0;
  /// Semi-degenerate coefficient: the representative is kappa * omega_j.
  CoeffB kappa;
  std::map<std::string, CoeffB> kappa_cont;
  FullyDegenerate degenerate = FullyDegenerate::b_omega1;
  /// sigma with sigma * alpha equal to the canonical representative.
  std::optional<WeylElement> sigma;
};

inline const char* to_string(DegeneracyTag::Kind k) {
  switch (k) {
    case DegeneracyTag::Kind::generic: return "generic";
    case DegeneracyTag::Kind::non_generic: return "non-generic";
    case DegeneracyTag::Kind::semi_degenerate: return "semi-degenerate";
    case DegeneracyTag::Kind::fully_degenerate: return "fully-degenerate";
  }
  return "?";
}

namespace detail {

/// kappa with v = kappa * omega_j, if v is proportional to omega_j.
inline std::optional<CoeffB> omega_coefficient(const ExactWeight& v, int j) {
  for (int i = 0; i < v.rank() - 1; ++i)
    if (i != j - 1 && !v[i].is_zero()) return std::nullopt;
  return v[j - 1];
}

}  // namespace detail

/// Classifies a charge up to the Weyl star-action. Semi-degenerate fields are
/// only distinguished for n >= 3; at n = 2 every charge is proportional to omega_1.
inline DegeneracyTag classify_charge(const Charge& a) {
  const int n = a.rank();
  if (n > 7) throw std::invalid_argument("classify_charge enumerates the Weyl group; n <= 7 supported");
  DegeneracyTag tag;
  const auto group = weyl_group(n);
  if (!a.has_continuous()) {
    for (const auto& s : group) {
      const Charge img = star_act(s, a);
      for (auto d : {FullyDegenerate::b_omega1, FullyDegenerate::b_omega_last, FullyDegenerate::minus_omega1_over_b,
                     FullyDegenerate::minus_omega_last_over_b}) {
        if (img == degenerate_charge(d, n)) {
          tag.kind = DegeneracyTag::Kind::fully_degenerate;
          tag.degenerate = d;
          tag.sigma = s;
          return tag;
        }
      }
    }
  }
  if (n >= 3) {
    for (const auto& s : group) {
      const Charge img = star_act(s, a);
      for (int j : {1, n - 1}) {
        auto k = detail::omega_coefficient(img.fixed(), j);
        if (!k) continue;
        std::map<std::string, CoeffB> kc;
        bool ok = true;
        for (const auto& [name, dir] : img.cont()) {
          auto kk = detail::omega_coefficient(dir, j);
          if (!kk) { ok = false; break; }
          kc[name] = *kk;
        }
        if (!ok) continue;
        tag.kind = DegeneracyTag::Kind::semi_degenerate;
        tag.direction = j;
        tag.kappa = *k;
        tag.kappa_cont = std::move(kc);
        tag.sigma = s;
        return tag;
      }
    }
  }
  tag.kind = is_generic(a).generic ? DegeneracyTag::Kind::generic : DegeneracyTag::Kind::non_generic;
  return tag;
}

/// Wyllard semi-degenerate charge kappa * omega_j, j in {1, n-1}.
inline Charge semi_degenerate_charge(int n, int j, const CoeffB& kappa) {
  if (j != 1 && j != n - 1) throw std::invalid_argument("semi-degenerate direction must be 1 or n-1");
  return Charge(scaled(omega(n, j), kappa));
}

// ---------------------------------------------------------------------------
// Fusion rules.
// ---------------------------------------------------------------------------

/// Phi_deg x Phi_alpha -> sum_j Phi_{alpha + s h_j}. Refuses non-generic alpha.
inline std::vector<Charge> fuse_fully_degenerate(FullyDegenerate d, const Charge& a, const TodaParams& p) {
  const auto g = is_generic(a, p);
  if (!g.generic) {
    std::ostringstream os;
    os << "fuse_fully_degenerate: charge is not generic";
    for (const auto& e : g.exceptions) os << "; " << e;
    throw std::domain_error(os.str());
  }
  std::vector<Charge> out;
  const CoeffB s = degenerate_shift(d);
  for (int j = 1; j <= p.n; ++j) out.push_back(a + Charge(scaled(h_vec(p.n, j), s)));
  return out;
}

/// w_alpha allowed in <Phi_2| Phi_alpha(1) |Phi_1> for semi-degenerate Phi_1, Phi_2.
template <class T>
T semideg_w_constraint(double d1, const T& w1, double d2, const T& w2, double da) {
  if (d1 == 0.0 || d2 == 0.0) throw std::domain_error("semideg_w_constraint: Delta_1 and Delta_2 must be nonzero");
  return (3.0 * w2 / (2.0 * d2)) * (d2 + da - d1) - (3.0 * w1 / (2.0 * d1)) * (d1 + da - d2) + 2.0 * (w1 - w2);
}

/// Phi_{b omega_1} x Phi_{kappa omega_j}: two outputs, for j = 1 and j = n-1.
inline std::vector<Charge> fuse_deg_semideg(int j, const CoeffB& kappa, const TodaParams& p) {
  const int n = p.n;
  const Charge base = semi_degenerate_charge(n, j, kappa);
  const int second = j == 1 ? 2 : n;
  return {base + Charge(scaled(h_vec(n, 1), CoeffB::b())), base + Charge(scaled(h_vec(n, second), CoeffB::b()))};
}

}  // namespace toda
