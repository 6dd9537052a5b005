#include <gtest/gtest.h>

#include <random>

#include "toda/lie_lattice.hpp"

using namespace toda;

namespace {

NumericWeight num(const RationalWeight& w) { return evaluate(w); }

// Independent oracle: simple reflection s_i(v) = v - (v.e_i) e_i, in exact arithmetic.
RationalWeight reflect(const RationalWeight& v, int i) {
  const int n = v.rank();
  return v - simple_root(n, i) * pair(v, simple_root(n, i));
}

RationalWeight random_rational(std::mt19937& rng, int n) {
  std::uniform_int_distribution<int> num(-20, 20), den(1, 6);
  RationalWeight w(n);
  for (int i = 0; i < n - 1; ++i) w[i] = Rational(num(rng), den(rng));
  return w;
}

ExactWeight random_exact(std::mt19937& rng, int n) {
  std::uniform_int_distribution<int> num(-12, 12), den(1, 4);
  ExactWeight w(n);
  for (int i = 0; i < n - 1; ++i)
    w[i] = CoeffB(Rational(num(rng), den(rng)), Rational(num(rng), den(rng)), Rational(num(rng), den(rng)));
  return w;
}

WeylElement random_weyl(std::mt19937& rng, int n) {
  std::vector<int> p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  std::shuffle(p.begin(), p.end(), rng);
  return WeylElement(p);
}

}  // namespace

TEST(WeightDot, Sl3Values) {
  EXPECT_NEAR(weight_dot(num(omega(3, 1)), num(omega(3, 1))), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(weight_dot(num(omega(3, 2)), num(omega(3, 2))), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(weight_dot(num(omega(3, 1)), num(omega(3, 2))), 1.0 / 3.0, 1e-15);
}

TEST(WeightDot, HBasisAndRho) {
  for (int n = 2; n <= 7; ++n) {
    EXPECT_EQ(pair(h_vec(n, 1), h_vec(n, 1)), Rational(n - 1, n));
    if (n > 2) EXPECT_EQ(pair(h_vec(n, 1), h_vec(n, 2)), Rational(-1, n));
    EXPECT_EQ(pair(rho(n), rho(n)), Rational(n * (n * n - 1), 12));
  }
  EXPECT_EQ(pair(rho(2), rho(2)), Rational(1, 2));
}

TEST(WeightDot, RankMismatchThrows) {
  EXPECT_THROW(weight_dot(num(rho(3)), num(rho(4))), std::invalid_argument);
}

TEST(StandardVectors, Basis) {
  auto s = standard_vectors(3);
  EXPECT_EQ(s.omega[0].coords(), (std::vector<Rational>{1, 0}));
  EXPECT_EQ(s.rho.coords(), (std::vector<Rational>{1, 1}));
  EXPECT_EQ(s.e[0].coords(), (std::vector<Rational>{2, -1}));
  EXPECT_EQ(standard_vectors(2).rho, omega(2, 1));
  EXPECT_THROW(standard_vectors(1), std::invalid_argument);
}

TEST(StandardVectors, GramConsistency) {
  for (int n = 2; n <= 6; ++n) {
    auto s = standard_vectors(n);
    for (int i = 0; i < n - 1; ++i) {
      for (int j = 0; j < n - 1; ++j) {
        EXPECT_EQ(pair(s.e[i], s.omega[j]), Rational(i == j ? 1 : 0));
        const int cartan = i == j ? 2 : (std::abs(i - j) == 1 ? -1 : 0);
        EXPECT_EQ(pair(s.e[i], s.e[j]), Rational(cartan));
      }
    }
    RationalWeight total(n);
    for (const auto& h : s.h) total += h;
    EXPECT_TRUE(total.is_zero());
  }
}

TEST(WeylElement, ParseAndPrint) {
  auto c = WeylElement::from_cycles(3, "(123)");
  EXPECT_EQ(c(0), 1);
  EXPECT_EQ(c(1), 2);
  EXPECT_EQ(c(2), 0);
  EXPECT_EQ(c.to_cycle_string(), "(123)");
  EXPECT_EQ(WeylElement::from_cycles(4, "(12)(34)").cycle_type(), (std::vector<int>{2, 2}));
  EXPECT_TRUE(WeylElement::from_cycles(3, "()").is_identity());
  EXPECT_EQ(WeylElement::from_cycles(11, "(1 11)").to_cycle_string(), "(1 11)");
  EXPECT_THROW(WeylElement::from_cycles(3, "(124)"), std::invalid_argument);
  EXPECT_THROW(WeylElement::from_cycles(3, "(12)(13)"), std::invalid_argument);
  EXPECT_THROW(WeylElement(std::vector<int>{0, 0, 1}), std::invalid_argument);
}

TEST(WeylElement, ConjugacyByCycleType) {
  auto a = WeylElement::from_cycles(4, "(12)");
  auto b = WeylElement::from_cycles(4, "(34)");
  auto c = WeylElement::from_cycles(4, "(123)");
  EXPECT_TRUE(conjugate(a, b));
  EXPECT_FALSE(conjugate(a, c));
  EXPECT_EQ(weyl_group(4).size(), 24U);
}

TEST(WeylAct, IdentityAndReflection) {
  const int n = 3;
  auto v = omega(n, 1);
  EXPECT_EQ(weyl_act(WeylElement::identity(n), v), v);
  EXPECT_EQ(weyl_act(WeylElement::transposition(n, 1, 2), v), v - simple_root(n, 1));
  for (int m = 2; m <= 6; ++m)
    EXPECT_EQ(weyl_act(WeylElement::longest(m), rho(m)), -rho(m));
}

TEST(WeylAct, SimpleReflectionsMatchOracle) {
  std::mt19937 rng(11);
  for (int n = 2; n <= 5; ++n) {
    for (int trial = 0; trial < 20; ++trial) {
      auto v = random_rational(rng, n);
      for (int i = 1; i < n; ++i)
        EXPECT_EQ(weyl_act(WeylElement::transposition(n, i, i + 1), v), reflect(v, i));
    }
  }
}

TEST(WeylAct, MapsHBasis) {
  auto sigma = WeylElement::from_cycles(4, "(142)");
  for (int k = 1; k <= 4; ++k) EXPECT_EQ(weyl_act(sigma, h_vec(4, k)), h_vec(4, sigma(k - 1) + 1));
}

TEST(WeylAct, CompositionAndInvariance) {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + trial % 4;
    auto s = random_weyl(rng, n), t = random_weyl(rng, n);
    auto v = random_exact(rng, n);
    auto w = random_rational(rng, n);
    EXPECT_EQ(weyl_act(s * t, v), weyl_act(s, weyl_act(t, v)));
    EXPECT_EQ(weyl_act(s.inverse(), weyl_act(s, v)), v);
    EXPECT_EQ(pair(weyl_act(s, v), weyl_act(s, w)), pair(v, w));
    Charge c(v);
    EXPECT_EQ(star_act(s * t, c), star_act(s, star_act(t, c)));
  }
}

TEST(StarAct, FixedPointAndIdentity) {
  const Charge q = background_charge(3);
  for (const auto& s : weyl_group(3)) EXPECT_EQ(star_act(s, q), q);
  Charge a(scaled(omega(3, 1), CoeffB(Rational(1, 3), 2, 0)));
  EXPECT_EQ(star_act(WeylElement::identity(3), a), a);
}

TEST(StarAct, NumericMatchesExact) {
  std::mt19937 rng(5);
  const double b = 0.731;
  for (int trial = 0; trial < 20; ++trial) {
    auto v = random_exact(rng, 4);
    auto s = random_weyl(rng, 4);
    auto exact = star_act(s, Charge(v)).evaluate(b);
    auto numeric = star_act(s, evaluate(v, b), b);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(exact[i], numeric[i], 1e-12 * (1 + std::abs(exact[i])));
  }
}

TEST(Dual, Basics) {
  EXPECT_EQ(dual(omega(3, 1)), omega(3, 2));
  for (int n = 2; n <= 6; ++n)
    for (int i = 1; i < n; ++i) EXPECT_EQ(dual(omega(n, i)), omega(n, n - i));
  std::mt19937 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + trial % 4;
    auto v = random_exact(rng, n);
    auto w = random_rational(rng, n);
    Charge a(v);
    EXPECT_EQ(dual(dual(a)), a);
    EXPECT_EQ(pair(dual(v), dual(w)), pair(v, w));
    const Charge q = background_charge(n);
    EXPECT_EQ(q + q - a, star_act(WeylElement::longest(n), dual(a)));
  }
}

TEST(Charge, ContinuousEvaluation) {
  Charge c = Charge(omega(3, 1)) + Charge::continuous("beta", h_vec(3, 3));
  auto v = c.evaluate(0.7, {{"beta", 0.5}});
  EXPECT_NEAR(v[0], 1.0, 1e-15);
  EXPECT_NEAR(v[1], -0.5, 1e-15);
  EXPECT_THROW(c.evaluate(0.7), std::invalid_argument);
  EXPECT_TRUE((c - Charge::continuous("beta", h_vec(3, 3))).cont().empty());
  auto sigma = WeylElement::from_cycles(3, "(13)");
  EXPECT_EQ(weyl_act(sigma, c).cont().at("beta"), to_exact(h_vec(3, 1)));
}

TEST(LatticeMember, Examples) {
  const int n = 3;
  const LatticeSpec bw{LatticeKind::weight, LatticeScale::b};
  const LatticeSpec iw{LatticeKind::weight, LatticeScale::inv_b};
  const LatticeSpec ir{LatticeKind::root, LatticeScale::inv_b};
  EXPECT_TRUE(lattice_member(Charge(scaled(omega(n, 1), CoeffB::b())), bw));
  EXPECT_TRUE(lattice_member(Charge(scaled(simple_root(n, 1), CoeffB::inv_b())), iw));
  EXPECT_TRUE(lattice_member(Charge(scaled(simple_root(n, 1), CoeffB::inv_b())), ir));
  EXPECT_FALSE(lattice_member(Charge(scaled(omega(n, 1), CoeffB::inv_b())), ir));
  Charge mixed = Charge(scaled(omega(n, 1), CoeffB::b())) + Charge(scaled(omega(n, 2), CoeffB::inv_b()));
  EXPECT_FALSE(lattice_member(mixed, bw));
  EXPECT_THROW(lattice_member(Charge::continuous("x", omega(n, 1)), bw), std::invalid_argument);
}

TEST(LatticeMember, StableUnderGeneratorsFlipsUnderHalves) {
  std::mt19937 rng(21);
  std::uniform_int_distribution<int> coef(-5, 5);
  for (int n = 2; n <= 5; ++n) {
    for (int trial = 0; trial < 25; ++trial) {
      for (auto kind : {LatticeKind::root, LatticeKind::weight}) {
        const LatticeSpec spec{kind, LatticeScale::b};
        RationalWeight base(n);
        for (int i = 1; i < n; ++i)
          base += (kind == LatticeKind::root ? simple_root(n, i) : omega(n, i)) * Rational(coef(rng));
        Charge v(scaled(base, CoeffB::b()));
        ASSERT_TRUE(lattice_member(v, spec));
        const int i = 1 + trial % (n - 1);
        const RationalWeight gen = kind == LatticeKind::root ? simple_root(n, i) : omega(n, i);
        EXPECT_TRUE(lattice_member(v + Charge(scaled(gen, CoeffB::b())), spec));
        EXPECT_FALSE(lattice_member(v + Charge(scaled(gen, CoeffB::b(Rational(1, 2)))), spec));
      }
    }
  }
}

TEST(LatticeMember, RootVersusWeight) {
  // omega_1 lies in R* but not in R for every n.
  for (int n = 2; n <= 6; ++n) {
    EXPECT_TRUE(in_lattice(omega(n, 1), LatticeKind::weight));
    EXPECT_FALSE(in_lattice(omega(n, 1), LatticeKind::root));
    EXPECT_TRUE(in_lattice(omega(n, 1) * Rational(n), LatticeKind::root));
  }
}
