#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/numeric/odeint.hpp>

#include "toda/kinematics.hpp"
#include "toda/numerics.hpp"
#include "toda/special_functions.hpp"

namespace toda {

// ---------------------------------------------------------------------------
// Exponents.
// ---------------------------------------------------------------------------

/// Semi-degenerate insertion kappa omega_1 or kappa omega_{n-1}; distinct even at n = 2.
enum class Channel { omega_1, omega_last };

inline Channel channel_from_direction(int n, int j) {
  if (j == 1) return Channel::omega_1;
  if (j == n - 1) return Channel::omega_last;
  throw std::invalid_argument("semi-degenerate direction must be 1 or n-1");
}

inline int direction(Channel c, int n) { return c == Channel::omega_1 ? 1 : n - 1; }

/// 2 mu: (1/b - b) - kappa/n for kappa omega_1, kappa/n for kappa omega_{n-1}.
inline double two_mu(int n, Channel c, double kappa, double b) {
  return c == Channel::omega_last ? kappa / n : (1.0 / b - b) - kappa / n;
}

/// Exponents of the order-n hypergeometric equation
///   z (D + B_1)...(D + B_n) f = (D - A_1)...(D - A_n) f,  D = z d/dz,
/// for <alpha2*| Phi_{s omega_1}(z) Phi_{kappa omega_j}(1) |alpha1>, s in {b, -1/b}.
struct ExponentData {
  int n = 0;
  double b = 0.0;
  /// Degenerate shift s: b, or -1/b for Phi_{-omega_1/b}.
  double shift = 0.0;
  std::vector<double> A, B;
  std::optional<std::vector<double>> Abar, Bbar;
  double mu = 0.0, mubar = 0.0;
  Channel channel = Channel::omega_1;
  double kappa = 0.0, kappabar = 0.0;
  /// Delta of the degenerate field.
  double delta_deg = 0.0;

  [[nodiscard]] bool has_bars() const { return Abar.has_value() && Bbar.has_value(); }
  /// Exponent 2 s mu of (1 - z) in the blocks.
  [[nodiscard]] double two_s_mu() const { return 2.0 * shift * mu; }
  [[nodiscard]] double eta(int i) const { return A.at(i) - shift * mu - delta_deg; }
  [[nodiscard]] double zeta(int i) const { return B.at(i) - shift * mu + delta_deg; }
};

namespace detail {

/// Delta(a + s h_i) - Delta(a) = s h_i.(a - Q) + s^2 (n-1)/(2n).
inline std::vector<double> delta_steps(const NumericWeight& a, double s, const TodaParams& p) {
  const int n = p.n;
  const NumericWeight x = a - p.Q();
  std::vector<double> out;
  for (int i = 1; i <= n; ++i)
    out.push_back(s * weight_dot(evaluate(h_vec(n, i)), x) + s * s * (n - 1) / (2.0 * n));
  return out;
}

inline std::vector<double> shifted(std::vector<double> v, double c) {
  for (double& x : v) x += c;
  return v;
}

}  // namespace detail

/// Exponents from numeric charges at 0 (a1) and infinity (a2); shift 0 means s = b.
inline ExponentData exponents_from_weights(const NumericWeight& a1, const NumericWeight& a2, double kappa, Channel c,
                                           const TodaParams& p, double shift = 0.0) {
  check_rank(a1, p);
  check_rank(a2, p);
  ExponentData e;
  e.n = p.n;
  e.b = p.b;
  e.shift = shift == 0.0 ? p.b : shift;
  e.channel = c;
  e.kappa = e.kappabar = kappa;
  e.mu = e.mubar = 0.5 * two_mu(p.n, c, kappa, p.b);
  e.delta_deg = delta(evaluate(omega(p.n, 1)) * e.shift, p);
  e.A = detail::shifted(detail::delta_steps(a1, e.shift, p), e.shift * e.mu);
  e.B = detail::shifted(detail::delta_steps(a2, e.shift, p), e.shift * e.mu);
  return e;
}

/// Exponents from charges at 0 (alpha1) and infinity (alpha2). Refuses non-generic charges.
inline ExponentData exponents_from_charges(const Charge& a1, const Charge& a2, double kappa, Channel c,
                                           const TodaParams& p, double shift = 0.0, const Bindings& bind = {}) {
  for (const Charge* a : {&a1, &a2}) {
    const auto g = is_generic(*a, p);
    if (!g.generic) throw std::domain_error("exponents_from_charges: non-generic charge: " + g.exceptions.front());
    if (p.n <= 7) {
      const auto tag = classify_charge(*a);
      if (tag.kind != DegeneracyTag::Kind::generic)
        throw std::domain_error(std::string("exponents_from_charges: ") + to_string(tag.kind) + " charge");
    }
  }
  return exponents_from_weights(a1.evaluate(p.b, bind), a2.evaluate(p.b, bind), kappa, c, p, shift);
}

/// Adds the anti-holomorphic exponents for charges (abar1, abar2) and kappabar.
inline ExponentData with_antiholomorphic(ExponentData e, const NumericWeight& abar1, const NumericWeight& abar2,
                                         double kappabar, const TodaParams& p) {
  const ExponentData bar = exponents_from_weights(abar1, abar2, kappabar, e.channel, p, e.shift);
  e.kappabar = kappabar;
  e.mubar = bar.mu;
  e.Abar = bar.A;
  e.Bbar = bar.B;
  return e;
}

/// The antiholomorphic side as a holomorphic ExponentData.
inline ExponentData antiholomorphic(const ExponentData& e) {
  if (!e.has_bars()) return e;
  ExponentData out = e;
  out.A = *e.Abar;
  out.B = *e.Bbar;
  out.mu = e.mubar;
  out.kappa = e.kappabar;
  out.Abar.reset();
  out.Bbar.reset();
  return out;
}

/// A <-> B, which maps the z -> 1/z problem onto itself.
inline ExponentData exchanged(const ExponentData& e) {
  ExponentData out = e;
  std::swap(out.A, out.B);
  std::swap(out.Abar, out.Bbar);
  return out;
}

// ---------------------------------------------------------------------------
// Riemann scheme and indicial data.
// ---------------------------------------------------------------------------

struct RiemannScheme {
  std::vector<double> at0, at1, at_inf;
  /// Summands of the last exponent at z = 1: n - 1, -A_i, -B_i.
  std::vector<double> last_at1_terms;
};

inline RiemannScheme riemann_scheme(const ExponentData& e) {
  RiemannScheme r;
  r.at0 = e.A;
  r.at_inf = e.B;
  for (int k = 0; k + 1 < e.n; ++k) r.at1.push_back(k);
  r.last_at1_terms.push_back(e.n - 1);
  for (double a : e.A) r.last_at1_terms.push_back(-a);
  for (double b : e.B) r.last_at1_terms.push_back(-b);
  r.at1.push_back(fsum(r.last_at1_terms));
  return r;
}

/// Sum of all exponents, exactly summed from the scheme's summands.
inline double fuchs_sum(const ExponentData& e) {
  const RiemannScheme r = riemann_scheme(e);
  ExactSum s;
  for (double x : r.at0) s.add(x);
  for (double x : r.at_inf) s.add(x);
  for (std::size_t k = 0; k + 1 < r.at1.size(); ++k) s.add(r.at1[k]);
  for (double x : r.last_at1_terms) s.add(x);
  return s.value();
}

namespace detail {

/// Coefficients of prod_i (x + c_i), lowest degree first.
inline std::vector<double> poly_from_roots(const std::vector<double>& c) {
  std::vector<double> p{1.0};
  for (double ci : c) {
    std::vector<double> q(p.size() + 1, 0.0);
    for (std::size_t k = 0; k < p.size(); ++k) {
      q[k] += ci * p[k];
      q[k + 1] += p[k];
    }
    p = std::move(q);
  }
  return p;
}

inline double stirling2(int k, int m) {
  std::vector<std::vector<double>> s(k + 1, std::vector<double>(k + 1, 0.0));
  s[0][0] = 1.0;
  for (int a = 1; a <= k; ++a)
    for (int c = 1; c <= a; ++c) s[a][c] = c * s[a - 1][c] + s[a - 1][c - 1];
  return m <= k ? s[k][m] : 0.0;
}

inline double poly_eval(const std::vector<double>& p, double x) {
  double r = 0.0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) r = r * x + *it;
  return r;
}

}  // namespace detail

/// Operator polynomials P(D) = prod (D - A_i) and R(D) = prod (D + B_i), lowest degree first.
struct OperatorPolynomials {
  std::vector<double> P, R;
};

inline OperatorPolynomials operator_polynomials(const ExponentData& e) {
  std::vector<double> minus_a;
  for (double a : e.A) minus_a.push_back(-a);
  return {detail::poly_from_roots(minus_a), detail::poly_from_roots(e.B)};
}

/// The equation as sum_m c_m(z) (d/dz)^m f = 0; c[m] holds the z-polynomial of c_m.
inline std::vector<std::vector<double>> ode_coefficients(const ExponentData& e) {
  const auto [P, R] = operator_polynomials(e);
  const int n = e.n;
  std::vector<std::vector<double>> c(n + 1, std::vector<double>(n + 2, 0.0));
  // D^k = sum_m S(k, m) z^m d^m.
  for (int m = 0; m <= n; ++m) {
    double p = 0.0, r = 0.0;
    for (int k = m; k <= n; ++k) {
      p += P[k] * detail::stirling2(k, m);
      r += R[k] * detail::stirling2(k, m);
    }
    c[m][m] += p;
    c[m][m + 1] -= r;
  }
  return c;
}

/// Indicial polynomial at z = 1 in rho, lowest degree first, from the ODE coefficients.
inline std::vector<double> indicial_polynomial_at_one(const ExponentData& e) {
  const auto c = ode_coefficients(e);
  const int n = e.n;
  // c_n has a simple zero at z = 1; only c_n'(1) and c_{n-1}(1) enter.
  double dn = 0.0;
  for (std::size_t k = 1; k < c[n].size(); ++k) dn += k * c[n][k];
  const double cn1 = detail::poly_eval(c[n - 1], 1.0);
  // falling factorials rho^(m) as polynomials
  std::vector<double> ff{1.0};
  std::vector<double> ff_nm1;
  for (int k = 0; k < n; ++k) {
    if (k == n - 1) ff_nm1 = ff;
    std::vector<double> q(ff.size() + 1, 0.0);
    for (std::size_t i = 0; i < ff.size(); ++i) {
      q[i] -= k * ff[i];
      q[i + 1] += ff[i];
    }
    ff = std::move(q);
  }
  std::vector<double> out(n + 1, 0.0);
  for (std::size_t i = 0; i < ff.size(); ++i) out[i] += dn * ff[i];
  for (std::size_t i = 0; i < ff_nm1.size(); ++i) out[i] += cn1 * ff_nm1[i];
  return out;
}

/// |I(rho)| / sum_k |I_k rho^k|.
inline double indicial_residual(const std::vector<double>& poly, double rho) {
  double v = 0.0, s = 0.0, x = 1.0;
  for (double c : poly) {
    v += c * x;
    s += std::abs(c * x);
    x *= rho;
  }
  return s > 0 ? std::abs(v) / s : std::abs(v);
}

// ---------------------------------------------------------------------------
// Series.
// ---------------------------------------------------------------------------

struct SeriesOptions {
  /// Largest |z| accepted.
  double radius = 0.9;
  double rel_tol = 1e-14;
  int max_terms = 100000;
};

namespace detail {

inline void check_lower(const std::vector<double>& lower) {
  for (double c : lower) {
    const double r = std::round(c);
    if (r <= 0 && std::abs(c - r) < 1e-12) throw std::domain_error("pfq_series: lower parameter is a non-positive integer");
  }
}

/// sum_m (lead + m)^k T_m for k = 0..kmax, T_m the pFq terms at z.
inline std::vector<double> moment_sums(double lead, const std::vector<double>& upper,
                                       const std::vector<double>& lower, double z, int kmax,
                                       const SeriesOptions& opt, int* terms_used = nullptr) {
  if (!(std::abs(z) <= opt.radius)) throw std::domain_error("pfq_series: |z| exceeds the radius guard");
  check_lower(lower);
  std::vector<ExactSum> sums(kmax + 1);
  double t = 1.0;
  int small = 0;
  for (int m = 0;; ++m) {
    if (m >= opt.max_terms) throw std::runtime_error("pfq_series: no convergence within the term limit");
    double w = 1.0;
    for (int k = 0; k <= kmax; ++k) {
      sums[k].add(t * w);
      w *= lead + m;
    }
    const double s = std::abs(sums[0].value());
    small = std::abs(t) < opt.rel_tol * s ? small + 1 : 0;
    if (small >= 3 || t == 0.0) {
      if (terms_used) *terms_used = m + 1;
      break;
    }
    double ratio = z / (m + 1.0);
    for (double a : upper) ratio *= a + m;
    for (double c : lower) ratio /= c + m;
    t *= ratio;
  }
  std::vector<double> out;
  for (auto& s : sums) out.push_back(s.value());
  return out;
}

}  // namespace detail

/// Generalised hypergeometric series pFq(upper; lower; z) with adaptive truncation.
inline double pfq_series(const std::vector<double>& upper, const std::vector<double>& lower, double z,
                         const SeriesOptions& opt = {}) {
  return detail::moment_sums(0.0, upper, lower, z, 0, opt)[0];
}

/// First `count` terms T_0..T_{count-1} of the pFq series.
inline std::vector<double> pfq_terms(const std::vector<double>& upper, const std::vector<double>& lower, double z,
                                     int count) {
  detail::check_lower(lower);
  std::vector<double> t;
  double x = 1.0;
  for (int m = 0; m < count; ++m) {
    t.push_back(x);
    x *= z / (m + 1.0);
    for (double a : upper) x *= a + m;
    for (double c : lower) x /= c + m;
  }
  return t;
}

/// Upper and lower parameters of the series attached to exponent i of (A, B).
struct SeriesParams {
  double lead = 0.0;
  std::vector<double> upper, lower;
};

inline SeriesParams series_params(const std::vector<double>& A, const std::vector<double>& B, int i) {
  SeriesParams s;
  s.lead = A.at(i);
  for (double b : B) s.upper.push_back(b + A[i]);
  for (std::size_t k = 0; k < A.size(); ++k)
    if (static_cast<int>(k) != i) s.lower.push_back(1.0 - A[k] + A[i]);
  return s;
}

// ---------------------------------------------------------------------------
// Block system.
// ---------------------------------------------------------------------------

struct BlockOptions {
  /// Radius guard for both expansions; admits 1/z down to |z| = 1.1.
  double radius = 1.0 / 1.1 + 1e-9;
  double rel_tol = 1e-14;
  int max_terms = 100000;
};

namespace detail {

/// Gamma products of the Mellin-Barnes connection matrix.
inline Eigen::MatrixXd mb_matrix(const std::vector<double>& A, const std::vector<double>& B) {
  const int n = static_cast<int>(A.size());
  Eigen::MatrixXd M(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      SpecialValue v;
      for (int k = 0; k < n; ++k) {
        if (k == i) continue;
        v *= gamma_fn(1.0 + A[i] - A[k]);
        v /= gamma_fn(1.0 - B[j] - A[k]);
      }
      for (int l = 0; l < n; ++l) {
        if (l == j) continue;
        v *= gamma_fn(B[l] - B[j]);
        v /= gamma_fn(B[l] + A[i]);
      }
      if (v.is_pole()) throw std::domain_error("connection_matrix: Gamma pole from non-generic exponents");
      M(i, j) = v.value();
    }
  }
  return M;
}

}  // namespace detail

/// M with F_i = sum_j M_ij G_j.
inline Eigen::MatrixXd connection_matrix(const ExponentData& e) { return detail::mb_matrix(e.A, e.B); }
/// M^{-1}, from the A <-> B exchange.
inline Eigen::MatrixXd connection_matrix_inverse(const ExponentData& e) { return detail::mb_matrix(e.B, e.A); }

/// Both block bases for one ExponentData, with their connection matrix.
class BlockSystem {
 public:
  explicit BlockSystem(ExponentData e, BlockOptions opt = {}) : e_(std::move(e)), opt_(opt) {
    if (static_cast<int>(e_.A.size()) != e_.n || static_cast<int>(e_.B.size()) != e_.n)
      throw std::invalid_argument("BlockSystem: exponent lists must have n entries");
    for (int i = 0; i < e_.n; ++i) {
      for (int k = i + 1; k < e_.n; ++k) {
        for (const auto* v : {&e_.A, &e_.B}) {
          const double d = (*v)[i] - (*v)[k];
          if (std::abs(d - std::round(d)) < 1e-10) throw std::domain_error("BlockSystem: exponents differ by an integer");
        }
      }
    }
    M_ = connection_matrix(e_);
    Minv_ = connection_matrix_inverse(e_);
  }

  [[nodiscard]] int n() const { return e_.n; }
  [[nodiscard]] const ExponentData& exponents() const { return e_; }
  [[nodiscard]] const BlockOptions& options() const { return opt_; }
  [[nodiscard]] const Eigen::MatrixXd& M() const { return M_; }
  [[nodiscard]] const Eigen::MatrixXd& M_inverse() const { return Minv_; }
  /// Number of series terms used for f_i at z.
  [[nodiscard]] int truncation_order(int i, double z) const {
    int used = 0;
    const SeriesParams s = series_params(e_.A, e_.B, i);
    detail::moment_sums(s.lead, s.upper, s.lower, z, 0, series_opt(), &used);
    return used;
  }

  /// D^k f_i(z), k = 0..n-1, for f_i = (-z)^{A_i} nF_{n-1}(...; z), z in (-radius, 0).
  [[nodiscard]] std::vector<double> f_derivatives(int i, double z) const {
    if (!(z < 0)) throw std::domain_error("block_F: z must lie on the negative real axis");
    const SeriesParams s = series_params(e_.A, e_.B, i);
    auto m = detail::moment_sums(s.lead, s.upper, s.lower, z, e_.n - 1, series_opt());
    const double pre = std::pow(-z, e_.A[i]);
    for (double& x : m) x *= pre;
    return m;
  }

  /// D^k g_j(z), k = 0..n-1, for g_j = (-z)^{-B_j} nF_{n-1}(...; 1/z), z < -1/radius.
  [[nodiscard]] std::vector<double> g_derivatives(int j, double z) const {
    if (!(z < 0)) throw std::domain_error("block_G: z must lie on the negative real axis");
    const SeriesParams s = series_params(e_.B, e_.A, j);
    auto m = detail::moment_sums(s.lead, s.upper, s.lower, 1.0 / z, e_.n - 1, series_opt());
    const double pre = std::pow(-1.0 / z, e_.B[j]);
    for (std::size_t k = 0; k < m.size(); ++k) m[k] *= (k % 2 ? -pre : pre);
    return m;
  }

  [[nodiscard]] double f(int i, double z) const { return f_derivatives(i, z)[0]; }
  [[nodiscard]] double g(int j, double z) const { return g_derivatives(j, z)[0]; }

  /// F_i(z) = (1-z)^{2 s mu} (-z)^{eta_i} nF_{n-1}(B + A_i; 1 - A + A_i; z).
  [[nodiscard]] double F(int i, double z) const {
    if (!(z < 0 && z > -1)) throw std::domain_error("block_F: needs -1 < z < 0");
    return std::pow(1.0 - z, e_.two_s_mu()) * std::pow(-z, -e_.shift * e_.mu - e_.delta_deg) * f(i, z);
  }

  /// G_i(z) = (1-1/z)^{2 s mu} (-1/z)^{zeta_i} nF_{n-1}(A + B_i; 1 - B + B_i; 1/z).
  [[nodiscard]] double G(int i, double z) const {
    if (!(z < -1)) throw std::domain_error("block_G: needs z < -1");
    return std::pow(1.0 - 1.0 / z, e_.two_s_mu()) * std::pow(-1.0 / z, e_.zeta(i)) *
           pfq(series_params(e_.B, e_.A, i), 1.0 / z);
  }

 private:
  [[nodiscard]] SeriesOptions series_opt() const { return {opt_.radius, opt_.rel_tol, opt_.max_terms}; }
  [[nodiscard]] double pfq(const SeriesParams& s, double x) const { return pfq_series(s.upper, s.lower, x, series_opt()); }

  ExponentData e_;
  BlockOptions opt_;
  Eigen::MatrixXd M_, Minv_;
};

inline double block_F(int i, double z, const BlockSystem& sys) { return sys.F(i, z); }
inline double block_G(int i, double z, const BlockSystem& sys) { return sys.G(i, z); }

// ---------------------------------------------------------------------------
// ODE checks.
// ---------------------------------------------------------------------------

/// Mismatch of prod (D - A_k) f and z prod (D + B_k) f on the truncated series
/// (-z)^{lead} sum_m T_m, relative to the summed term magnitudes.
inline double ode_residual(const ExponentData& ode, const SeriesParams& s, double z, const SeriesOptions& opt = {}) {
  if (!(std::abs(z) <= opt.radius)) throw std::domain_error("ode_residual: |z| exceeds the radius guard");
  detail::check_lower(s.lower);
  ExactSum diff;
  double mag = 0.0;
  double t = 1.0;
  int small = 0;
  for (int m = 0; m < opt.max_terms; ++m) {
    double l = t, r = t * z;
    for (double a : ode.A) l *= s.lead + m - a;
    for (double b : ode.B) r *= s.lead + m + b;
    diff.add(l);
    diff.add(-r);
    mag += std::abs(l) + std::abs(r);
    // The D-weighted terms decay slower than T_m; stop on them.
    small = std::abs(l) + std::abs(r) < opt.rel_tol * mag ? small + 1 : 0;
    if (small >= 3 || t == 0.0) break;
    double ratio = z / (m + 1.0);
    for (double a : s.upper) ratio *= a + m;
    for (double c : s.lower) ratio /= c + m;
    t *= ratio;
  }
  return mag > 0 ? std::abs(diff.value()) / mag : 0.0;
}

/// Max over the n F-solutions of the series ODE mismatch at z.
inline double ode_residual(const BlockSystem& sys, double z) {
  if (!(z < 0 && std::abs(z) < 0.9)) throw std::domain_error("ode_residual: needs -0.9 < z < 0");
  const auto& e = sys.exponents();
  double worst = 0.0;
  for (int i = 0; i < e.n; ++i) worst = std::max(worst, ode_residual(e, series_params(e.A, e.B, i), z));
  return worst;
}

/// Same for the G-solutions, in the variable 1/z where the equation has A <-> B.
inline double ode_residual_G(const BlockSystem& sys, double z) {
  if (!(z < -1.0 / 0.9)) throw std::domain_error("ode_residual_G: needs z < -1/0.9");
  const ExponentData x = exchanged(sys.exponents());
  double worst = 0.0;
  for (int i = 0; i < x.n; ++i) worst = std::max(worst, ode_residual(x, series_params(x.A, x.B, i), 1.0 / z));
  return worst;
}

struct TransportOptions {
  double rel_tol = 1e-12;
  /// Largest step in s = ln(-z).
  double max_step = 1e-2;
};

/// Carries (f, Df, ..., D^{n-1} f) from z_from to z_to along the negative axis.
inline std::vector<double> transport(const ExponentData& e, std::vector<double> y, double z_from, double z_to,
                                     const TransportOptions& opt = {}) {
  namespace odeint = boost::numeric::odeint;
  if (!(z_from < 0 && z_to < 0)) throw std::domain_error("transport: path must stay on the negative real axis");
  const int n = e.n;
  const auto [P, R] = operator_polynomials(e);
  const double s0 = std::log(-z_from), s1 = std::log(-z_to);
  // Integrate in t = dir * s so that t always increases.
  const double dir = s1 >= s0 ? 1.0 : -1.0;
  auto rhs = [&](const std::vector<double>& x, std::vector<double>& dx, double t) {
    const double z = -std::exp(dir * t);
    for (int k = 0; k + 1 < n; ++k) dx[k] = dir * x[k + 1];
    double top = 0.0;
    for (int k = 0; k < n; ++k) top -= (P[k] - z * R[k]) * x[k];
    dx[n - 1] = dir * top / (1.0 - z);
  };
  double scale = 0.0;
  for (double v : y) scale = std::max(scale, std::abs(v));
  using Stepper = odeint::runge_kutta_fehlberg78<std::vector<double>>;
  auto stepper = odeint::make_controlled(opt.rel_tol * scale, opt.rel_tol, opt.max_step, Stepper());
  const double dt = std::min(opt.max_step, 1e-3);
  try {
    odeint::integrate_adaptive(stepper, rhs, y, dir * s0, dir * s1, dt);
  } catch (const odeint::step_adjustment_error& ex) {
    throw std::runtime_error(std::string("transport: step size underflow: ") + ex.what());
  }
  return y;
}

/// max_i |transported f_i(z_to) - sum_j M_ij g_j(z_to)| / scale, over all D^k components.
inline double verify_connection(const BlockSystem& sys, const Eigen::MatrixXd& M, double z_from, double z_to,
                                const TransportOptions& opt = {}) {
  if (!(z_from > -0.9 && z_from < -0.1)) throw std::domain_error("verify_connection: z_from must lie in (-0.9, -0.1)");
  if (!(z_to > -10.0 && z_to < -1.1)) throw std::domain_error("verify_connection: z_to must lie in (-10, -1.1)");
  const int n = sys.n();
  std::vector<std::vector<double>> g(n);
  for (int j = 0; j < n; ++j) g[j] = sys.g_derivatives(j, z_to);
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto y = transport(sys.exponents(), sys.f_derivatives(i, z_from), z_from, z_to, opt);
    double scale = 0.0;
    std::vector<double> target(n, 0.0);
    for (int k = 0; k < n; ++k) {
      for (int j = 0; j < n; ++j) {
        target[k] += M(i, j) * g[j][k];
        scale = std::max(scale, std::abs(M(i, j) * g[j][k]));
      }
      scale = std::max(scale, std::abs(y[k]));
    }
    for (int k = 0; k < n; ++k) worst = std::max(worst, std::abs(y[k] - target[k]) / scale);
  }
  return worst;
}

inline double verify_connection(const BlockSystem& sys, double z_from, double z_to, const TransportOptions& opt = {}) {
  return verify_connection(sys, sys.M(), z_from, z_to, opt);
}

}  // namespace toda
