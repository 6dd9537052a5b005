#pragma once

#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "toda/hyper_blocks.hpp"
#include "toda/nonscalar_fields.hpp"
#include "toda/structure_constants.hpp"

namespace toda {

struct CrossingReport {
  /// s-channel gluing coefficients, X_1 = 1.
  Eigen::VectorXd X;
  /// Diagonal of M^T X Mbar.
  Eigen::VectorXd Y;
  /// max |(M^T X Mbar)_jk|, j != k, over max |(M^T X Mbar)_jj|.
  double offdiag_residual = 0.0;
  /// Largest sine-identity deviation over all (i, j, l, m).
  double consistency_residual = 0.0;
  /// Spread of the per-l solutions of X.
  double ell_residual = 0.0;
  /// Largest relative mismatch between the two gluings over the sample points.
  double crossing_mismatch = 0.0;
  std::vector<double> sample_points;
  std::vector<double> mismatches;
};

namespace detail {

inline Eigen::MatrixXd mbar(const ExponentData& e) { return connection_matrix(antiholomorphic(e)); }

inline double sin_pi(double x) {
  const double r = x - 2.0 * std::round(0.5 * x);
  return std::sin(std::numbers::pi * r);
}

inline double rel_gap(double a, double b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

}  // namespace detail

/// Column l: X_j = (M^-1)_{lj} / Mbar_{jl}, normalised to X_1 = 1.
inline Eigen::MatrixXd x_candidates(const ExponentData& e) {
  const Eigen::MatrixXd Minv = connection_matrix_inverse(e);
  const Eigen::MatrixXd Mb = detail::mbar(e);
  const int n = e.n;
  Eigen::MatrixXd c(n, n);
  for (int l = 0; l < n; ++l) {
    for (int j = 0; j < n; ++j) c(j, l) = Minv(l, j) / Mb(j, l);
    if (c(0, l) == 0.0 || !std::isfinite(c(0, l))) throw std::domain_error("solve_X: X_1 vanishes");
    c.col(l) /= c(0, l);
  }
  return c;
}

/// Largest relative spread of X between the per-l solutions.
inline double ell_dependence(const ExponentData& e) {
  const Eigen::MatrixXd c = x_candidates(e);
  double worst = 0.0;
  for (int l = 1; l < c.cols(); ++l)
    for (int j = 0; j < c.rows(); ++j) worst = std::max(worst, detail::rel_gap(c(j, l), c(j, 0)));
  return worst;
}

/// Common solution of M^T X Mbar = diagonal, with X_1 = 1.
inline Eigen::VectorXd solve_X(const ExponentData& e, double tol = 1e-8) {
  const double spread = ell_dependence(e);
  if (!(spread <= tol))
    throw std::domain_error("solve_X: solution depends on l (spread " + std::to_string(spread) +
                            "); neutrality violated");
  return x_candidates(e).col(0);
}

/// M^T X Mbar.
inline Eigen::MatrixXd y_matrix(const ExponentData& e, const Eigen::VectorXd& X) {
  return connection_matrix(e).transpose() * X.asDiagonal() * detail::mbar(e);
}

inline double offdiag_residual(const Eigen::MatrixXd& Y) {
  double off = 0.0, diag = 0.0;
  for (int j = 0; j < Y.rows(); ++j)
    for (int k = 0; k < Y.cols(); ++k) {
      double& slot = j == k ? diag : off;
      slot = std::max(slot, std::abs(Y(j, k)));
    }
  return off / diag;
}

/// |LHS - RHS| of
///   sin pi(Abar_i + Bbar_l) sin pi(A_j + B_l) / (sin pi(A_i + B_l) sin pi(Abar_j + Bbar_l)) = (l -> m).
inline double consistency_check(const ExponentData& e, int i, int j, int l, int m) {
  const ExponentData bar = antiholomorphic(e);
  auto side = [&](int k) {
    return detail::sin_pi(bar.A.at(i) + bar.B.at(k)) * detail::sin_pi(e.A.at(j) + e.B.at(k)) /
           (detail::sin_pi(e.A.at(i) + e.B.at(k)) * detail::sin_pi(bar.A.at(j) + bar.B.at(k)));
  };
  return std::abs(side(l) - side(m));
}

inline double consistency_residual(const ExponentData& e) {
  double worst = 0.0;
  for (int i = 0; i < e.n; ++i)
    for (int j = 0; j < e.n; ++j)
      for (int l = 0; l < e.n; ++l)
        for (int m = l + 1; m < e.n; ++m) worst = std::max(worst, consistency_check(e, i, j, l, m));
  return worst;
}

/// Ten points on (-0.85, -0.15); their mirrors 1/z lie in the G-block domain.
inline std::vector<double> default_sample_points(int count = 10) {
  std::vector<double> z;
  for (int k = 0; k < count; ++k) z.push_back(-0.15 - 0.7 * k / std::max(1, count - 1));
  return z;
}

/// Relative mismatch at z between sum_i X_i f_i fbar_i and sum_j Y_j g_j gbar_j, the g-blocks
/// carried from 1/z to z by the ODE. The common prefactors of F and G cancel.
inline double gluing_mismatch(const BlockSystem& hol, const BlockSystem& anti, const Eigen::VectorXd& X,
                              const Eigen::VectorXd& Y, double z, const TransportOptions& opt = {}) {
  if (!(z > -0.9 && z < -0.1)) throw std::domain_error("crossing: sample points must lie in (-0.9, -0.1)");
  const double w = 1.0 / z;
  const int n = hol.n();
  double sf = 0.0, sg = 0.0, scale = 0.0;
  for (int i = 0; i < n; ++i) {
    const double t = X(i) * hol.f(i, z) * anti.f(i, z);
    sf += t;
    scale = std::max(scale, std::abs(t));
  }
  for (int j = 0; j < n; ++j) {
    const double g = transport(hol.exponents(), hol.g_derivatives(j, w), w, z, opt)[0];
    const double gb = transport(anti.exponents(), anti.g_derivatives(j, w), w, z, opt)[0];
    const double t = Y(j) * g * gb;
    sg += t;
    scale = std::max(scale, std::abs(t));
  }
  return std::abs(sf - sg) / scale;
}

/// Crossing report for given exponents: X from solve_X, Y the diagonal of M^T X Mbar.
/// X is rescaled to X_1 = 1 first, so the result does not depend on its normalisation.
inline CrossingReport crossing_report(const ExponentData& e, const Eigen::VectorXd& X_in,
                                      const std::vector<double>& z_list, int threads = 1) {
  CrossingReport r;
  r.X = X_in / X_in(0);
  const Eigen::MatrixXd Y = y_matrix(e, r.X);
  r.Y = Y.diagonal();
  r.offdiag_residual = offdiag_residual(Y);
  r.consistency_residual = consistency_residual(e);
  r.ell_residual = ell_dependence(e);
  r.sample_points = z_list;
  const BlockSystem hol(e), anti(antiholomorphic(e));
  r.mismatches.assign(z_list.size(), 0.0);
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(threads, z_list.size()));
  std::vector<std::future<void>> jobs;
  for (std::size_t t = 0; t < workers; ++t) {
    jobs.push_back(std::async(std::launch::async, [&, t] {
      for (std::size_t k = t; k < z_list.size(); k += workers)
        r.mismatches[k] = gluing_mismatch(hol, anti, r.X, r.Y, z_list[k]);
    }));
  }
  for (auto& j : jobs) j.get();
  for (double m : r.mismatches) r.crossing_mismatch = std::max(r.crossing_mismatch, m);
  return r;
}

inline CrossingReport crossing_report(const ExponentData& e, const std::vector<double>& z_list, int threads = 1) {
  return crossing_report(e, solve_X(e), z_list, threads);
}

/// Exponents of <f2*| Phi_{b omega_1}(z) f3(1) |f1>, both chiralities.
inline ExponentData exponents_from_fields(const FieldLabel& f1, const FieldLabel& f2, const FieldLabel& f3,
                                          Channel channel, const TodaParams& p, const Bindings& bind = {}) {
  const int j = direction(channel, p.n);
  const double kappa = detail::semideg_coefficient(f3.alpha, j, p.b, bind);
  const double kappabar = detail::semideg_coefficient(f3.alphabar, j, p.b, bind);
  ExponentData e = exponents_from_weights(f1.alpha.evaluate(p.b, bind), f2.alpha.evaluate(p.b, bind), kappa, channel, p);
  return with_antiholomorphic(std::move(e), f1.alphabar.evaluate(p.b, bind), f2.alphabar.evaluate(p.b, bind),
                              kappabar, p);
}

/// Four-point crossing test with Phi_{b omega_1} at z and the semi-degenerate f3 at 1.
inline CrossingReport crossing_residual(const FieldLabel& f1, const FieldLabel& f2, const FieldLabel& f3,
                                        Channel channel, const TodaParams& p, const std::vector<double>& z_list,
                                        const Bindings& bind = {}, int threads = 1) {
  for (const FieldLabel* f : {&f1, &f2, &f3})
    if (f->rank() != p.n) throw std::invalid_argument("crossing_residual: rank mismatch");
  if (!f3.is_semi_degenerate()) throw std::domain_error("crossing_residual: third field must be semi-degenerate");
  if (direction(channel, p.n) != f3.degeneracy.direction)
    throw std::invalid_argument("crossing_residual: channel does not match the semi-degenerate direction");
  for (const FieldLabel* f : {&f1, &f2}) {
    if (!verify_constraints(*f)) throw std::domain_error("crossing_residual: lattice constraints violated");
    if (f->degeneracy.kind != DegeneracyTag::Kind::generic)
      throw std::domain_error(std::string("crossing_residual: ") + to_string(f->degeneracy.kind) + " field");
  }
  if (!verify_constraints(f3)) throw std::domain_error("crossing_residual: kappa - kappabar not in Z/b");
  if (!neutrality(f1, f2, f3).first) throw std::domain_error("crossing_residual: eta neutrality violated");
  return crossing_report(exponents_from_fields(f1, f2, f3, channel, p, bind), z_list, threads);
}

}  // namespace toda
