#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "toda/coeff_b.hpp"
#include "toda/weight.hpp"

namespace toda {

// ---------------------------------------------------------------------------
// Weyl group of sl_n, realised as permutations of {h_1, ..., h_n}.
// ---------------------------------------------------------------------------

/// A permutation sigma of {1..n}, acting on weights by sigma(h_i) = h_sigma(i).
/// Stored 0-based.
class WeylElement {
 public:
  WeylElement() = default;
  explicit WeylElement(std::vector<int> perm) : perm_(std::move(perm)) {
    std::vector<int> seen(perm_.size(), 0);
    for (int p : perm_) {
      if (p < 0 || p >= static_cast<int>(perm_.size()) || seen[p]++)
        throw std::invalid_argument("WeylElement: not a permutation");
    }
    if (perm_.size() < 2) throw std::invalid_argument("WeylElement: rank must be at least 2");
  }

  static WeylElement identity(int n) {
    std::vector<int> p(static_cast<std::size_t>(n));
    std::iota(p.begin(), p.end(), 0);
    return WeylElement(std::move(p));
  }
  /// Transposition of i and j (1-based); (i, i+1) is the simple reflection s_i.
  static WeylElement transposition(int n, int i, int j) {
    auto s = identity(n);
    std::swap(s.perm_.at(i - 1), s.perm_.at(j - 1));
    return s;
  }
  /// The longest element s_0: i -> n+1-i.
  static WeylElement longest(int n) {
    std::vector<int> p(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) p[i] = n - 1 - i;
    return WeylElement(std::move(p));
  }

  /// Parses cycle notation such as "(123)", "(12)(34)", "(1 2)(3 4)" or "()" / "1".
  static WeylElement from_cycles(int n, const std::string& text) {
    auto s = identity(n);
    std::vector<std::vector<int>> cycles;
    std::vector<int>* cur = nullptr;
    std::string number;
    auto flush = [&] {
      if (number.empty()) return;
      if (!cur) throw std::invalid_argument("bad cycle notation: " + text);
      cur->push_back(std::stoi(number) - 1);
      number.clear();
    };
    const bool multi_digit = n >= 10 || text.find(' ') != std::string::npos ||
                             text.find(',') != std::string::npos;
    for (char ch : text) {
      if (ch == '(') {
        if (cur) throw std::invalid_argument("bad cycle notation: " + text);
        cycles.emplace_back();
        cur = &cycles.back();
      } else if (ch == ')') {
        flush();
        cur = nullptr;
      } else if (ch >= '0' && ch <= '9') {
        number += ch;
        if (!multi_digit) flush();
      } else if (ch == ' ' || ch == ',') {
        flush();
      } else {
        throw std::invalid_argument("bad cycle notation: " + text);
      }
    }
    if (cur) throw std::invalid_argument("bad cycle notation: " + text);
    std::vector<int> used(static_cast<std::size_t>(n), 0);
    for (const auto& c : cycles) {
      for (std::size_t k = 0; k < c.size(); ++k) {
        int from = c[k];
        int to = c[(k + 1) % c.size()];
        if (from < 0 || from >= n || used[from]++)
          throw std::invalid_argument("bad cycle notation: " + text);
        s.perm_[from] = to;
      }
    }
    return s;
  }

  [[nodiscard]] int rank() const { return static_cast<int>(perm_.size()); }
  /// Image of i (0-based).
  [[nodiscard]] int operator()(int i) const { return perm_.at(i); }
  [[nodiscard]] const std::vector<int>& perm() const { return perm_; }
  [[nodiscard]] bool is_identity() const {
    for (int i = 0; i < rank(); ++i)
      if (perm_[i] != i) return false;
    return true;
  }

  [[nodiscard]] WeylElement inverse() const {
    std::vector<int> p(perm_.size());
    for (int i = 0; i < rank(); ++i) p[perm_[i]] = i;
    return WeylElement(std::move(p));
  }

  /// Cycles (0-based), each starting at its smallest element, fixed points included.
  [[nodiscard]] std::vector<std::vector<int>> cycles() const {
    std::vector<std::vector<int>> out;
    std::vector<int> seen(perm_.size(), 0);
    for (int i = 0; i < rank(); ++i) {
      if (seen[i]) continue;
      std::vector<int> c;
      for (int j = i; !seen[j]; j = perm_[j]) {
        seen[j] = 1;
        c.push_back(j);
      }
      out.push_back(std::move(c));
    }
    return out;
  }

  /// Sorted cycle lengths; two elements are conjugate iff these agree.
  [[nodiscard]] std::vector<int> cycle_type() const {
    std::vector<int> t;
    for (const auto& c : cycles()) t.push_back(static_cast<int>(c.size()));
    std::sort(t.begin(), t.end(), std::greater<>());
    return t;
  }

  [[nodiscard]] std::string to_cycle_string() const {
    std::string out;
    for (const auto& c : cycles()) {
      if (c.size() < 2) continue;
      out += '(';
      for (std::size_t k = 0; k < c.size(); ++k) {
        if (k && rank() >= 10) out += ' ';
        out += std::to_string(c[k] + 1);
      }
      out += ')';
    }
    return out.empty() ? "()" : out;
  }

  /// (sigma o tau)(i) = sigma(tau(i)).
  friend WeylElement operator*(const WeylElement& sigma, const WeylElement& tau) {
    if (sigma.rank() != tau.rank()) throw std::invalid_argument("rank mismatch");
    std::vector<int> p(sigma.perm_.size());
    for (int i = 0; i < sigma.rank(); ++i) p[i] = sigma.perm_[tau.perm_[i]];
    return WeylElement(std::move(p));
  }
  friend bool operator==(const WeylElement&, const WeylElement&) = default;

 private:
  std::vector<int> perm_;
};

inline bool conjugate(const WeylElement& a, const WeylElement& b) {
  return a.rank() == b.rank() && a.cycle_type() == b.cycle_type();
}

/// All n! elements of the Weyl group, in lexicographic order of permutations.
inline std::vector<WeylElement> weyl_group(int n) {
  std::vector<int> p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  std::vector<WeylElement> out;
  do {
    out.emplace_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

/// Linear action sigma(v) on any weight.
template <class S>
Weight<S> weyl_act(const WeylElement& sigma, const Weight<S>& v) {
  if (sigma.rank() != v.rank()) throw std::invalid_argument("rank mismatch in Weyl action");
  auto c = v.h_coeffs();
  std::vector<S> d(c.size(), S{});
  for (int k = 0; k < sigma.rank(); ++k) d[sigma(k)] = c[k];
  return Weight<S>::from_h(d);
}

// ---------------------------------------------------------------------------
// Standard vectors.
// ---------------------------------------------------------------------------

inline RationalWeight omega(int n, int i) {
  if (i < 1 || i > n - 1) throw std::out_of_range("omega index");
  RationalWeight w(n);
  w[i - 1] = 1;
  return w;
}

/// h_k = omega_k - omega_{k-1}, with omega_0 = omega_n = 0.
inline RationalWeight h_vec(int n, int k) {
  if (k < 1 || k > n) throw std::out_of_range("h index");
  RationalWeight w(n);
  if (k <= n - 1) w[k - 1] += 1;
  if (k >= 2) w[k - 2] -= 1;
  return w;
}

/// Simple root e_i = h_i - h_{i+1}.
inline RationalWeight simple_root(int n, int i) { return h_vec(n, i) - h_vec(n, i + 1); }

inline RationalWeight rho(int n) {
  RationalWeight w(n);
  for (int i = 0; i < n - 1; ++i) w[i] = 1;
  return w;
}

struct StandardVectors {
  std::vector<RationalWeight> e, omega, h;
  RationalWeight rho;
};

inline StandardVectors standard_vectors(int n) {
  if (n < 2) throw std::invalid_argument("sl_n rank must be at least 2");
  StandardVectors s;
  for (int i = 1; i < n; ++i) {
    s.e.push_back(simple_root(n, i));
    s.omega.push_back(omega(n, i));
  }
  for (int k = 1; k <= n; ++k) s.h.push_back(h_vec(n, k));
  s.rho = rho(n);
  return s;
}

/// Positive roots h_i - h_j, i < j.
inline std::vector<RationalWeight> positive_roots(int n) {
  std::vector<RationalWeight> out;
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j) out.push_back(h_vec(n, i) - h_vec(n, j));
  return out;
}

/// Numeric pairing through the Gram matrix.
inline double weight_dot(const NumericWeight& v, const NumericWeight& w) { return pair(v, w); }

// ---------------------------------------------------------------------------
// Charges: exact part plus named continuous directions.
// ---------------------------------------------------------------------------

using Bindings = std::map<std::string, double>;

/// A vertex charge alpha = fixed + sum_p param_p * direction_p, with exact
/// CoeffB coefficients in the omega basis.
class Charge {
 public:
  Charge() = default;
  explicit Charge(int n) : fixed_(n) {}
  // NOLINTNEXTLINE(google-explicit-constructor)
  Charge(ExactWeight fixed) : fixed_(std::move(fixed)) {}
  // NOLINTNEXTLINE(google-explicit-constructor)
  Charge(const RationalWeight& fixed) : fixed_(to_exact(fixed)) {}

  /// The family param * direction.
  static Charge continuous(const std::string& param, const ExactWeight& direction) {
    Charge c(direction.rank());
    c.cont_[param] = direction;
    return c;
  }
  static Charge continuous(const std::string& param, const RationalWeight& direction) {
    return continuous(param, to_exact(direction));
  }

  [[nodiscard]] int rank() const { return fixed_.rank(); }
  [[nodiscard]] const ExactWeight& fixed() const { return fixed_; }
  [[nodiscard]] const std::map<std::string, ExactWeight>& cont() const { return cont_; }
  [[nodiscard]] bool has_continuous() const { return !cont_.empty(); }

  /// Numeric vector at coupling b with every continuous parameter bound.
  [[nodiscard]] NumericWeight evaluate(double b, const Bindings& bind = {}) const {
    NumericWeight out = toda::evaluate(fixed_, b);
    for (const auto& [name, dir] : cont_) {
      auto it = bind.find(name);
      if (it == bind.end()) throw std::invalid_argument("unbound continuous parameter '" + name + "'");
      out += it->second * toda::evaluate(dir, b);
    }
    return out;
  }

  /// Applies a linear map to every component.
  template <class F>
  [[nodiscard]] Charge map_linear(F&& f) const {
    Charge out(f(fixed_));
    for (const auto& [name, dir] : cont_) out.cont_[name] = f(dir);
    out.prune();
    return out;
  }

  Charge& operator+=(const Charge& o) {
    fixed_ += o.fixed_;
    for (const auto& [name, dir] : o.cont_) {
      auto it = cont_.find(name);
      if (it == cont_.end()) cont_[name] = dir;
      else it->second += dir;
    }
    prune();
    return *this;
  }
  Charge& operator-=(const Charge& o) { return *this += -o; }
  friend Charge operator+(Charge a, const Charge& c) { return a += c; }
  friend Charge operator-(Charge a, const Charge& c) { return a -= c; }
  friend Charge operator-(const Charge& a) {
    return a.map_linear([](const ExactWeight& w) { return -w; });
  }
  friend Charge operator*(const Rational& r, const Charge& a) {
    return a.map_linear([&](const ExactWeight& w) { return w * r; });
  }
  friend bool operator==(const Charge&, const Charge&) = default;

 private:
  void prune() {
    for (auto it = cont_.begin(); it != cont_.end();) {
      if (it->second.is_zero()) it = cont_.erase(it);
      else ++it;
    }
  }

  ExactWeight fixed_;
  std::map<std::string, ExactWeight> cont_;
};

/// Background charge Q = (1/b - b) rho, exact.
inline Charge background_charge(int n) { return Charge(scaled(rho(n), CoeffB(0, -1, 1))); }

inline Charge weyl_act(const WeylElement& sigma, const Charge& v) {
  return v.map_linear([&](const ExactWeight& w) { return weyl_act(sigma, w); });
}

/// sigma * alpha = Q + sigma(alpha - Q).
inline Charge star_act(const WeylElement& sigma, const Charge& alpha) {
  const Charge q = background_charge(alpha.rank());
  return q + weyl_act(sigma, alpha - q);
}

inline NumericWeight star_act(const WeylElement& sigma, const NumericWeight& alpha, double b) {
  const NumericWeight q = evaluate(rho(alpha.rank())) * (1.0 / b - b);
  return q + weyl_act(sigma, alpha - q);
}

/// alpha* = -s_0(alpha).
template <class S>
Weight<S> dual(const Weight<S>& alpha) {
  return -weyl_act(WeylElement::longest(alpha.rank()), alpha);
}

inline Charge dual(const Charge& alpha) {
  return alpha.map_linear([](const ExactWeight& w) { return dual(w); });
}

/// Exact pairing of a charge's fixed part with a rational vector.
inline CoeffB exact_pair(const Charge& v, const RationalWeight& r) {
  if (v.has_continuous()) throw std::invalid_argument("exact pairing needs a charge without continuous part");
  return pair(v.fixed(), r);
}

// ---------------------------------------------------------------------------
// Lattices.
// ---------------------------------------------------------------------------

enum class LatticeKind { root, weight };
enum class LatticeScale { one, b, inv_b };

struct LatticeSpec {
  LatticeKind kind = LatticeKind::weight;
  LatticeScale scale = LatticeScale::one;
};

/// Rational weight membership in R (root lattice) or R* (weight lattice).
inline bool in_lattice(const RationalWeight& x, LatticeKind kind) {
  std::int64_t congruence = 0;
  for (int i = 0; i < x.rank() - 1; ++i) {
    if (!is_integer(x[i])) return false;
    congruence += (i + 1) * x[i].numerator();
  }
  if (kind == LatticeKind::weight) return true;
  const std::int64_t n = x.rank();
  return ((congruence % n) + n) % n == 0;
}

/// Exact test v in scale * lattice. v must not carry continuous parameters.
inline bool lattice_member(const Charge& v, const LatticeSpec& spec) {
  if (v.has_continuous()) throw std::invalid_argument("lattice_member: continuous part present");
  RationalWeight part(v.rank());
  for (int i = 0; i < v.rank() - 1; ++i) {
    const CoeffB& c = v.fixed()[i];
    Rational keep;
    Rational other1, other2;
    switch (spec.scale) {
      case LatticeScale::one: keep = c.u; other1 = c.v; other2 = c.w; break;
      case LatticeScale::b: keep = c.v; other1 = c.u; other2 = c.w; break;
      case LatticeScale::inv_b: keep = c.w; other1 = c.u; other2 = c.v; break;
    }
    if (!is_zero(other1) || !is_zero(other2)) return false;
    part[i] = keep;
  }
  return in_lattice(part, spec.kind);
}

}  // namespace toda
