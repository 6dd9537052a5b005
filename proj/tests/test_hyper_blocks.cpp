#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "toda/hyper_blocks.hpp"

using namespace toda;

namespace {

NumericWeight random_weight(std::mt19937& rng, int n, double lo = -0.6, double hi = 1.4) {
  std::uniform_real_distribution<double> u(lo, hi);
  NumericWeight w(n);
  for (int i = 0; i < n - 1; ++i) w[i] = u(rng);
  return w;
}

ExponentData random_exponents(std::mt19937& rng, int n, double b = 0.731) {
  std::uniform_real_distribution<double> uk(0.2, 0.8);
  const TodaParams p(n, b);
  const Channel c = rng() % 2 ? Channel::omega_1 : Channel::omega_last;
  return exponents_from_weights(random_weight(rng, n), random_weight(rng, n), uk(rng), c, p);
}

/// Random exponents with no constraints from charges.
ExponentData free_exponents(std::mt19937& rng, int n) {
  std::uniform_real_distribution<double> u(-0.9, 0.9);
  ExponentData e;
  e.n = n;
  e.b = e.shift = 0.731;
  for (int i = 0; i < n; ++i) {
    e.A.push_back(u(rng));
    e.B.push_back(u(rng));
  }
  return e;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

double gamma_ratio_value(double x) { return std::tgamma(x) / std::tgamma(1.0 - x); }

}  // namespace

TEST(PfqSeries, ZeroArgument) {
  EXPECT_EQ(pfq_series({0.3, 0.7, 1.2}, {1.4, 2.2}, 0.0), 1.0);
}

TEST(PfqSeries, GaussOracle) {
  // 200-term summation at 40 digits.
  EXPECT_LE(rel(pfq_series({0.3, 0.7}, {1.4}, 0.25), 1.042613932038655314266205635837006427377), 1e-15);
  EXPECT_LE(rel(pfq_series({0.2, -0.35, 1.1}, {0.6, 1.7}, -0.8), 1.053286264408049441707190647771533797326), 1e-14);
}

TEST(PfqSeries, TermRatio) {
  const std::vector<double> up{0.3, -0.45, 1.7}, lo{0.9, 2.35};
  const double z = -0.6;
  const auto t = pfq_terms(up, lo, z, 10);
  for (int k = 0; k + 1 < 10; ++k) {
    double r = z / (k + 1);
    for (double a : up) r *= a + k;
    for (double c : lo) r /= c + k;
    EXPECT_LE(rel(t[k + 1] / t[k], r), 1e-14);
  }
  // T_3 from Pochhammer symbols directly.
  auto poch = [](double a, int k) {
    double p = 1.0;
    for (int i = 0; i < k; ++i) p *= a + i;
    return p;
  };
  const double t3 = poch(0.3, 3) * poch(-0.45, 3) * poch(1.7, 3) / (poch(0.9, 3) * poch(2.35, 3)) * z * z * z / 6.0;
  EXPECT_LE(rel(t[3], t3), 1e-14);
}

TEST(PfqSeries, Terminating) {
  // 2F1(-2, b; c; z) = 1 - 2 b z / c + b (b+1) z^2 / (c (c+1)).
  const double b = 0.8, c = 1.3, z = 0.7;
  EXPECT_LE(rel(pfq_series({-2.0, b}, {c}, z), 1 - 2 * b * z / c + b * (b + 1) * z * z / (c * (c + 1))), 1e-15);
}

TEST(PfqSeries, Errors) {
  EXPECT_THROW((void)pfq_series({0.3, 0.7}, {1.4}, 0.95), std::domain_error);
  EXPECT_THROW((void)pfq_series({0.3, 0.7}, {-2.0}, 0.5), std::domain_error);
  EXPECT_THROW((void)pfq_series({0.3, 0.7}, {0.0}, 0.5), std::domain_error);
  SeriesOptions opt;
  opt.max_terms = 5;
  EXPECT_THROW((void)pfq_series({0.3, 0.7}, {1.4}, 0.8, opt), std::runtime_error);
  SeriesOptions wide;
  wide.radius = 0.99;
  EXPECT_NO_THROW((void)pfq_series({0.3, 0.7}, {1.4}, 0.95, wide));
}

TEST(Exponents, TwoMu) {
  const double b = 0.731, kappa = 0.42;
  for (int n = 2; n <= 5; ++n) {
    EXPECT_DOUBLE_EQ(two_mu(n, Channel::omega_last, kappa, b), kappa / n);
    EXPECT_DOUBLE_EQ(two_mu(n, Channel::omega_1, kappa, b), (1 / b - b) - kappa / n);
  }
  EXPECT_EQ(channel_from_direction(4, 3), Channel::omega_last);
  EXPECT_EQ(channel_from_direction(4, 1), Channel::omega_1);
  EXPECT_THROW((void)channel_from_direction(4, 2), std::invalid_argument);
}

TEST(Exponents, TwoMuFromDimensions) {
  // 2 b mu = Delta(kappa w + b h) - Delta(kappa w) - Delta(b w_1), with h = h_1 for w = w_{n-1}, h_2 for w = w_1.
  const double b = 0.731, kappa = 0.37;
  for (int n = 3; n <= 5; ++n) {
    const TodaParams p(n, b);
    const NumericWeight deg = evaluate(omega(n, 1)) * b;
    const NumericWeight wl = evaluate(omega(n, n - 1)) * kappa, w1 = evaluate(omega(n, 1)) * kappa;
    const double last = delta(wl + evaluate(h_vec(n, 1)) * b, p) - delta(wl, p) - delta(deg, p);
    const double first = delta(w1 + evaluate(h_vec(n, 2)) * b, p) - delta(w1, p) - delta(deg, p);
    EXPECT_NEAR(last, b * two_mu(n, Channel::omega_last, kappa, b), 1e-13);
    EXPECT_NEAR(first, b * two_mu(n, Channel::omega_1, kappa, b), 1e-13);
  }
}

TEST(Exponents, ReproduceFromCharges) {
  std::mt19937 rng(11);
  for (int n = 2; n <= 4; ++n) {
    const TodaParams p(n, 0.731);
    for (int k = 0; k < 10; ++k) {
      const NumericWeight a1 = random_weight(rng, n), a2 = random_weight(rng, n);
      for (double s : {p.b, -1.0 / p.b}) {
        const ExponentData e = exponents_from_weights(a1, a2, 0.55, Channel::omega_1, p, s);
        for (int i = 0; i < n; ++i) {
          const NumericWeight h = evaluate(h_vec(n, i + 1)) * s;
          const double a = delta(a1 + h, p) - delta(a1, p) + s * e.mu;
          const double bb = delta(a2 + h, p) - delta(a2, p) + s * e.mu;
          EXPECT_LE(std::abs(e.A[i] - a), 1e-12 * std::max(1.0, std::abs(a)));
          EXPECT_LE(std::abs(e.B[i] - bb), 1e-12 * std::max(1.0, std::abs(bb)));
        }
        EXPECT_NEAR(e.delta_deg, delta(evaluate(omega(n, 1)) * s, p), 1e-14);
      }
    }
  }
}

TEST(Exponents, SumIndependentOfCharge) {
  std::mt19937 rng(12);
  for (int n = 2; n <= 5; ++n) {
    const TodaParams p(n, 0.731);
    const NumericWeight a2 = random_weight(rng, n);
    const ExponentData e1 = exponents_from_weights(random_weight(rng, n), a2, 0.6, Channel::omega_last, p);
    const ExponentData e2 = exponents_from_weights(random_weight(rng, n), a2, 0.6, Channel::omega_last, p);
    EXPECT_NEAR(fsum(e1.A), fsum(e2.A), 1e-13);
  }
}

TEST(Exponents, RefusesDegenerateCharges) {
  const TodaParams p(3, 0.731);
  const Charge generic = Charge::continuous("x", omega(3, 1)) + Charge::continuous("y", omega(3, 2));
  const Charge q = background_charge(3);
  const Charge non_generic = q + Charge(scaled(omega(3, 1), CoeffB::b()));
  const Charge semi = Charge::continuous("x", omega(3, 1));
  const Charge deg = Charge(scaled(omega(3, 1), CoeffB::b()));
  const Bindings bind{{"x", 0.31}, {"y", 0.77}};
  EXPECT_NO_THROW((void)exponents_from_charges(generic, generic, 0.5, Channel::omega_1, p, 0.0, bind));
  for (const Charge& bad : {q, non_generic, semi, deg}) {
    EXPECT_THROW((void)exponents_from_charges(bad, generic, 0.5, Channel::omega_1, p, 0.0, bind), std::domain_error);
    EXPECT_THROW((void)exponents_from_charges(generic, bad, 0.5, Channel::omega_1, p, 0.0, bind), std::domain_error);
  }
}

TEST(RiemannScheme, FuchsRelationExact) {
  std::mt19937 rng(13);
  for (int n = 2; n <= 5; ++n) {
    for (int k = 0; k < 25; ++k) {
      const ExponentData e = random_exponents(rng, n);
      EXPECT_EQ(fuchs_sum(e), n * (n - 1) / 2.0);
    }
  }
  std::mt19937 r3(3);
  EXPECT_EQ(fuchs_sum(random_exponents(r3, 3)), 3.0);
}

TEST(RiemannScheme, ExponentsAtOneFromIndicialPolynomial) {
  std::mt19937 rng(14);
  for (int n = 2; n <= 5; ++n) {
    for (int k = 0; k < 10; ++k) {
      const ExponentData e = random_exponents(rng, n);
      const auto poly = indicial_polynomial_at_one(e);
      ASSERT_EQ(static_cast<int>(poly.size()), n + 1);
      const RiemannScheme r = riemann_scheme(e);
      ASSERT_EQ(static_cast<int>(r.at1.size()), n);
      for (int m = 0; m + 1 < n; ++m) EXPECT_EQ(r.at1[m], m);
      for (double rho : r.at1) EXPECT_LE(indicial_residual(poly, rho), 1e-11);
      // Off the roots the normalised value stays far above rounding level.
      EXPECT_GT(indicial_residual(poly, r.at1.back() + 0.37), 1e-6);
      EXPECT_GT(indicial_residual(poly, 0.5), 1e-6);
    }
  }
}

TEST(Blocks, LeadingBehaviourAtZero) {
  std::mt19937 rng(15);
  const BlockSystem sys(random_exponents(rng, 3));
  const auto& e = sys.exponents();
  for (int i = 0; i < 3; ++i) {
    for (double z : {-1e-6, -1e-9}) {
      const double lead = std::pow(1 - z, e.two_s_mu()) * std::pow(-z, e.eta(i));
      EXPECT_NEAR(block_F(i, z, sys) / lead, 1.0, 50 * std::abs(z));
    }
  }
  EXPECT_THROW((void)block_F(0, 0.3, sys), std::domain_error);
  EXPECT_THROW((void)block_F(0, -1.5, sys), std::domain_error);
  EXPECT_THROW((void)block_G(0, -0.5, sys), std::domain_error);
}

TEST(Blocks, WeylRelabelling) {
  std::mt19937 rng(16);
  const TodaParams p(3, 0.731);
  const NumericWeight a1 = random_weight(rng, 3), a2 = random_weight(rng, 3);
  const BlockSystem base(exponents_from_weights(a1, a2, 0.5, Channel::omega_last, p));
  for (const auto& sigma : weyl_group(3)) {
    const BlockSystem s1(exponents_from_weights(star_act(sigma, a1, p.b), a2, 0.5, Channel::omega_last, p));
    const BlockSystem s2(exponents_from_weights(a1, star_act(sigma, a2, p.b), 0.5, Channel::omega_last, p));
    std::vector<double> f0, f1, g0, g2;
    for (int i = 0; i < 3; ++i) {
      f0.push_back(block_F(i, -0.3, base));
      f1.push_back(block_F(i, -0.3, s1));
      g0.push_back(block_G(i, -3.0, base));
      g2.push_back(block_G(i, -3.0, s2));
      // Blocks in the other basis are untouched.
      EXPECT_LE(rel(block_G(i, -3.0, s1), block_G(i, -3.0, base)), 1e-12);
      EXPECT_LE(rel(block_F(i, -0.3, s2), block_F(i, -0.3, base)), 1e-12);
    }
    for (auto* v : {&f0, &f1, &g0, &g2}) std::sort(v->begin(), v->end());
    for (int i = 0; i < 3; ++i) {
      EXPECT_LE(rel(f0[i], f1[i]), 1e-12);
      EXPECT_LE(rel(g0[i], g2[i]), 1e-12);
    }
  }
}

TEST(Blocks, ExchangeSymmetry) {
  std::mt19937 rng(17);
  for (int n = 2; n <= 4; ++n) {
    const BlockSystem sys(random_exponents(rng, n));
    const BlockSystem swapped(exchanged(sys.exponents()));
    const double z = -2.0;
    const double factor = std::pow(-1.0 / z, 2.0 * sys.exponents().delta_deg);
    for (int i = 0; i < n; ++i) EXPECT_LE(rel(block_G(i, z, sys), block_F(i, 1.0 / z, swapped) * factor), 1e-13);
  }
}

TEST(Connection, InverseByExchange) {
  std::mt19937 rng(18);
  for (int n = 2; n <= 4; ++n) {
    for (int k = 0; k < 10; ++k) {
      const ExponentData e = free_exponents(rng, n);
      const Eigen::MatrixXd prod = connection_matrix(e) * connection_matrix_inverse(e);
      EXPECT_LE((prod - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-8);
    }
  }
}

TEST(Connection, GaussCoefficients) {
  std::mt19937 rng(19);
  for (int k = 0; k < 10; ++k) {
    const ExponentData e = free_exponents(rng, 2);
    const Eigen::MatrixXd M = connection_matrix(e);
    // 2F1(a, b'; c; z) = G(c)G(b'-a)/(G(b')G(c-a)) (-z)^{-a} 2F1(a, a-c+1; a-b'+1; 1/z) + (a <-> b').
    for (int i = 0; i < 2; ++i) {
      const int o = 1 - i;
      const double c = 1 + e.A[i] - e.A[o];
      for (int j = 0; j < 2; ++j) {
        const double a = e.A[i] + e.B[j], bp = e.A[i] + e.B[1 - j];
        const double coeff = std::tgamma(c) * std::tgamma(bp - a) / (std::tgamma(bp) * std::tgamma(c - a));
        EXPECT_LE(rel(M(i, j), coeff), 1e-12);
      }
    }
  }
}

TEST(Connection, GammaRatioIdentity) {
  // M_jm (M^-1)_mi / (M_im (M^-1)_mj) is independent of m and equals the gamma product.
  std::mt19937 rng(20);
  for (int n = 2; n <= 4; ++n) {
    const ExponentData e = free_exponents(rng, n);
    const Eigen::MatrixXd M = connection_matrix(e), Mi = connection_matrix_inverse(e);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        double expect = 1.0;
        for (int k = 0; k < n; ++k) {
          if (k != i) expect *= gamma_ratio_value(e.A[k] - e.A[i]);
          if (k != j) expect /= gamma_ratio_value(e.A[k] - e.A[j]);
          expect *= gamma_ratio_value(e.A[i] + e.B[k]) / gamma_ratio_value(e.A[j] + e.B[k]);
        }
        for (int m = 0; m < n; ++m) EXPECT_LE(rel(M(j, m) * Mi(m, i) / (M(i, m) * Mi(m, j)), expect), 1e-10);
      }
    }
  }
}

TEST(Connection, NonGenericRefused) {
  ExponentData e;
  e.n = 2;
  e.b = e.shift = 0.731;
  e.A = {0.2, 1.2};
  e.B = {0.1, 0.4};
  EXPECT_THROW(BlockSystem{e}, std::domain_error);
}

TEST(Connection, TransportN2) {
  std::mt19937 rng(21);
  for (int k = 0; k < 20; ++k) {
    const BlockSystem sys(free_exponents(rng, 2));
    EXPECT_LE(verify_connection(sys, -0.5, -2.0), 1e-6);
  }
}

TEST(Connection, TransportN3FromCharges) {
  std::mt19937 rng(22);
  std::uniform_real_distribution<double> zf(-0.8, -0.2), zt(-6.0, -1.3);
  for (int k = 0; k < 20; ++k) {
    const BlockSystem sys(random_exponents(rng, 3));
    EXPECT_LE(verify_connection(sys, zf(rng), zt(rng)), 1e-6);
  }
}

TEST(Connection, TransportN4) {
  std::mt19937 rng(23);
  for (int k = 0; k < 5; ++k) {
    const BlockSystem sys(random_exponents(rng, 4));
    EXPECT_LE(verify_connection(sys, -0.4, -3.0), 1e-6);
  }
}

TEST(Connection, CorruptedMatrixDetected) {
  std::mt19937 rng(24);
  for (int n : {2, 3}) {
    const BlockSystem sys(random_exponents(rng, n));
    Eigen::MatrixXd bad = sys.M();
    bad(0, 1) *= 1.01;
    EXPECT_GT(verify_connection(sys, bad, -0.5, -2.0), 1e-3);
  }
}

TEST(Connection, DomainChecks) {
  std::mt19937 rng(25);
  const BlockSystem sys(random_exponents(rng, 2));
  EXPECT_THROW((void)verify_connection(sys, -0.05, -2.0), std::domain_error);
  EXPECT_THROW((void)verify_connection(sys, -0.5, -1.05), std::domain_error);
  EXPECT_THROW((void)verify_connection(sys, -0.5, -12.0), std::domain_error);
}

TEST(OdeResidual, FSolutions) {
  std::mt19937 rng(26);
  for (int k = 0; k < 5; ++k) {
    const BlockSystem sys(random_exponents(rng, 3));
    EXPECT_LE(ode_residual(sys, -0.2), 1e-10);
    EXPECT_LE(ode_residual(sys, -0.85), 1e-10);
  }
}

TEST(OdeResidual, GSolutions) {
  std::mt19937 rng(27);
  for (int k = 0; k < 5; ++k) {
    const BlockSystem sys(random_exponents(rng, 3));
    EXPECT_LE(ode_residual_G(sys, -5.0), 1e-10);
  }
}

TEST(OdeResidual, PerturbedExponentDetected) {
  std::mt19937 rng(28);
  const ExponentData e = random_exponents(rng, 3);
  ExponentData wrong = e;
  wrong.A[0] += 0.01;
  EXPECT_GT(ode_residual(e, series_params(wrong.A, wrong.B, 0), -0.2), 1e-4);
  EXPECT_LE(ode_residual(e, series_params(e.A, e.B, 0), -0.2), 1e-10);
}

TEST(Connection, BackwardTransport) {
  std::mt19937 rng(24);
  for (int n : {2, 3}) {
    const BlockSystem sys(random_exponents(rng, n));
    for (int j = 0; j < n; ++j) {
      const auto y = transport(sys.exponents(), sys.g_derivatives(j, -2.5), -2.5, -0.4);
      const auto back = transport(sys.exponents(), y, -0.4, -2.5);
      const auto g = sys.g_derivatives(j, -2.5);
      for (int k = 0; k < n; ++k) EXPECT_LE(std::abs(back[k] - g[k]), 1e-9 * std::abs(g[0]));
    }
    for (int i = 0; i < n; ++i) {
      double t = 0.0;
      for (int j = 0; j < n; ++j) t += sys.M()(i, j) * transport(sys.exponents(), sys.g_derivatives(j, -2.5), -2.5, -0.4)[0];
      EXPECT_LE(rel(t, sys.f(i, -0.4)), 1e-8);
    }
  }
}
