#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <future>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "toda/toda.hpp"

namespace toda::job {

using json = nlohmann::json;

/// Malformed job or input data: exit status 2.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum ExitCode { ok = 0, tolerance_failure = 1, parse_error = 2, domain_error = 3 };

// ---------------------------------------------------------------------------
// Schema.
// ---------------------------------------------------------------------------

inline json rational_to_json(const Rational& r) {
  if (is_integer(r)) return r.numerator();
  return to_string(r);
}

inline Rational rational_from_json(const json& j) {
  try {
    if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
    if (j.is_number_float()) return parse_rational(j.dump());
    if (j.is_string()) return parse_rational(j.get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
  throw ParseError("expected a rational number, got " + j.dump());
}

inline json coeff_to_json(const CoeffB& c) {
  return {{"u", rational_to_json(c.u)}, {"v", rational_to_json(c.v)}, {"w", rational_to_json(c.w)}};
}

inline CoeffB coeff_from_json(const json& j) {
  if (j.is_number() || j.is_string()) return CoeffB(rational_from_json(j));
  if (!j.is_object()) throw ParseError("expected {u, v, w}, got " + j.dump());
  for (const auto& [k, v] : j.items())
    if (k != "u" && k != "v" && k != "w") throw ParseError("unknown coefficient key '" + k + "'");
  auto get = [&](const char* k) { return j.contains(k) ? rational_from_json(j.at(k)) : Rational(0); };
  return {get("u"), get("v"), get("w")};
}

inline json weight_to_json(const ExactWeight& w) {
  json a = json::array();
  for (const CoeffB& c : w.coords()) a.push_back(coeff_to_json(c));
  return a;
}

inline ExactWeight weight_from_json(const json& j, int n) {
  if (!j.is_array()) throw ParseError("omega coefficients must be an array");
  if (static_cast<int>(j.size()) != n - 1)
    throw ParseError("expected " + std::to_string(n - 1) + " omega coefficients, got " + std::to_string(j.size()));
  ExactWeight w(n);
  for (int i = 0; i < n - 1; ++i) w[i] = coeff_from_json(j[i]);
  return w;
}

/// {"omega_coeffs": [{u, v, w}, ...], "cont": {name: [{u, v, w}, ...]}}: u + v b + w/b per omega_i.
inline json charge_to_json(const Charge& a) {
  json cont = json::object();
  for (const auto& [name, dir] : a.cont()) cont[name] = weight_to_json(dir);
  return {{"omega_coeffs", weight_to_json(a.fixed())}, {"cont", cont}};
}

inline Charge charge_from_json(const json& j, int n) {
  if (!j.is_object() || !j.contains("omega_coeffs")) throw ParseError("charge needs omega_coeffs");
  for (const auto& [k, v] : j.items())
    if (k != "omega_coeffs" && k != "cont") throw ParseError("unknown charge key '" + k + "'");
  Charge a(weight_from_json(j.at("omega_coeffs"), n));
  if (j.contains("cont")) {
    if (!j.at("cont").is_object()) throw ParseError("cont must be an object");
    for (const auto& [name, dir] : j.at("cont").items()) a += Charge::continuous(name, weight_from_json(dir, n));
  }
  return a;
}

inline json field_to_json(const FieldLabel& f) {
  json j = {{"alpha", charge_to_json(f.alpha)},
            {"alphabar", charge_to_json(f.alphabar)},
            {"sigma", f.sigma.to_cycle_string()},
            {"degeneracy", to_string(f.degeneracy.kind)}};
  if (f.is_semi_degenerate()) j["direction"] = f.degeneracy.direction;
  return j;
}

inline WeylElement sigma_from_string(int n, const std::string& s) {
  try {
    return WeylElement::from_cycles(n, s);
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
}

/// Parses a field label. "direction" marks a semi-degenerate label; the degeneracy entry is
/// otherwise recomputed.
inline FieldLabel field_from_json(const json& j, int n) {
  if (!j.is_object() || !j.contains("alpha")) throw ParseError("field needs alpha");
  for (const auto& [k, v] : j.items())
    if (k != "alpha" && k != "alphabar" && k != "sigma" && k != "degeneracy" && k != "direction")
      throw ParseError("unknown field key '" + k + "'");
  FieldLabel f;
  f.alpha = charge_from_json(j.at("alpha"), n);
  f.alphabar = j.contains("alphabar") ? charge_from_json(j.at("alphabar"), n) : f.alpha;
  f.sigma = sigma_from_string(n, j.value("sigma", std::string("()")));
  f.degeneracy = detail::field_tag(f.alpha, f.alphabar);
  if (j.contains("direction")) {
    const int d = j.at("direction").get<int>();
    f.degeneracy = DegeneracyTag{};
    f.degeneracy.kind = DegeneracyTag::Kind::semi_degenerate;
    f.degeneracy.direction = d;
    if (!f.is_semi_degenerate()) throw ParseError("field is not semi-degenerate along omega_" + std::to_string(d));
  }
  return f;
}

inline bool same_field(const FieldLabel& a, const FieldLabel& b) {
  return a.alpha == b.alpha && a.alphabar == b.alphabar && a.sigma == b.sigma &&
         a.is_semi_degenerate() == b.is_semi_degenerate() &&
         (!a.is_semi_degenerate() || a.degeneracy.direction == b.degeneracy.direction);
}

inline json special_to_json(const SpecialValue& v) {
  json j = {{"log_abs", v.log_abs}, {"sign", v.sign}, {"quarter", v.quarter}, {"order", v.order},
            {"flagged", v.flagged}};
  j["value"] = v.finite() && v.is_real() ? json(v.value()) : json(nullptr);
  return j;
}

inline json three_point_to_json(const ThreePointResult& r) {
  json j = special_to_json(r.value);
  j["order_twice"] = r.order_twice;
  j["value"] = r.finite() && r.value.is_real() ? json(r.value.value()) : json(nullptr);
  json comps = json::array();
  for (const auto& c : r.components)
    comps.push_back({{"role", c.role}, {"argument", c.argument}, {"power", c.power}, {"value", special_to_json(c.value)}});
  j["components"] = comps;
  return j;
}

inline Channel channel_from_string(const std::string& s) {
  if (s == "omega_1") return Channel::omega_1;
  if (s == "omega_last") return Channel::omega_last;
  throw ParseError("channel must be omega_1 or omega_last, got '" + s + "'");
}

inline std::string channel_name(Channel c) { return c == Channel::omega_1 ? "omega_1" : "omega_last"; }

inline ShiftFamily family_from_string(const std::string& s) {
  if (s == "b") return ShiftFamily::b;
  if (s == "minus_inv_b") return ShiftFamily::minus_inv_b;
  throw ParseError("family must be b or minus_inv_b, got '" + s + "'");
}

inline Bindings bindings_from_json(const json& j) {
  Bindings b;
  if (j.is_null()) return b;
  if (!j.is_object()) throw ParseError("bind must be an object");
  for (const auto& [k, v] : j.items()) {
    if (!v.is_number()) throw ParseError("binding '" + k + "' must be a number");
    b[k] = v.get<double>();
  }
  return b;
}

// ---------------------------------------------------------------------------
// Job specification.
// ---------------------------------------------------------------------------

inline const std::vector<std::string>& commands() {
  static const std::vector<std::string> c{"upsilon",        "weights",       "structure-constant",
                                          "classify",       "fuse",          "verify-shift",
                                          "verify-crossing", "sweep"};
  return c;
}

struct JobSpec {
  std::string command;
  int n = 3;
  double b = 0.731;
  std::uint64_t seed = 7;
  /// Command inputs; charges and fields use the schema above.
  json inputs = json::object();
  /// Empty path: standard output.
  std::string output_path;
  /// json or csv.
  std::string format = "json";

  friend bool operator==(const JobSpec&, const JobSpec&) = default;
};

inline json to_json(const JobSpec& s) {
  return {{"command", s.command},
          {"params", {{"n", s.n}, {"b", s.b}}},
          {"seed", s.seed},
          {"inputs", s.inputs},
          {"output", {{"path", s.output_path}, {"format", s.format}}}};
}

inline JobSpec job_from_json(const json& j) {
  try {
    if (!j.is_object()) throw ParseError("job must be a JSON object");
    JobSpec s;
    s.command = j.at("command").get<std::string>();
    if (std::find(commands().begin(), commands().end(), s.command) == commands().end())
      throw ParseError("unknown command '" + s.command + "'");
    const json& p = j.at("params");
    s.n = p.at("n").get<int>();
    s.b = p.at("b").get<double>();
    if (s.n < 2) throw ParseError("params.n must be at least 2");
    if (!(s.b > 0)) throw ParseError("params.b must be positive");
    s.seed = j.value("seed", std::uint64_t{7});
    s.inputs = j.value("inputs", json::object());
    if (!s.inputs.is_object()) throw ParseError("inputs must be an object");
    if (j.contains("output")) {
      s.output_path = j.at("output").value("path", std::string());
      s.format = j.at("output").value("format", std::string("json"));
    }
    if (s.format != "json" && s.format != "csv") throw ParseError("output.format must be json or csv");
    return s;
  } catch (const json::exception& e) {
    throw ParseError(std::string("job: ") + e.what());
  }
}

inline JobSpec parse_job(const std::string& text) {
  try {
    return job_from_json(json::parse(text));
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("job: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Execution.
// ---------------------------------------------------------------------------

struct Result {
  int status = ok;
  /// Serialised artifact, ending in a newline.
  std::string text;
};

/// Worker count: hardware concurrency capped by TODA_BOOTSTRAP_THREADS.
inline int thread_budget() {
  int t = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("TODA_BOOTSTRAP_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1) throw ParseError("TODA_BOOTSTRAP_THREADS must be a positive integer");
    t = std::min<long>(t, v);
  }
  return t;
}

/// out[k] = f(k), k < count, on up to `threads` workers.
template <class F>
auto parallel_map(std::size_t count, int threads, F&& f) {
  using T = decltype(f(std::size_t{0}));
  std::vector<T> out(count);
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(threads, count));
  std::vector<std::future<void>> jobs;
  for (std::size_t t = 0; t < workers; ++t)
    jobs.push_back(std::async(std::launch::async, [&, t] {
      for (std::size_t k = t; k < count; k += workers) out[k] = f(k);
    }));
  for (auto& j : jobs) j.get();
  return out;
}

namespace detail {

/// Random charge with four-decimal omega coordinates in [lo, hi].
inline Charge random_charge(std::mt19937_64& rng, int n, double lo = -0.5, double hi = 1.3) {
  std::uniform_int_distribution<std::int64_t> u(static_cast<std::int64_t>(lo * 1e4), static_cast<std::int64_t>(hi * 1e4));
  ExactWeight w(n);
  for (int i = 0; i < n - 1; ++i) w[i] = CoeffB(Rational(u(rng), 10000));
  return Charge(w);
}

inline double random_kappa(std::mt19937_64& rng) {
  return std::uniform_int_distribution<int>(2000, 8000)(rng) / 1e4;
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

inline const json& need(const json& in, const char* key) {
  if (!in.contains(key)) throw ParseError(std::string("inputs.") + key + " is required");
  return in.at(key);
}

inline Charge charge_input(const json& in, const char* key, int n) { return charge_from_json(need(in, key), n); }

inline json monodromy_to_json(const MonodromyCharge& m) {
  return {{"eta", to_string(m.eta)}, {"etahat", m.etahat ? json(to_string(*m.etahat)) : json(nullptr)}};
}

/// The same primary relabelled so that its sigma becomes `target` (a conjugate).
inline FieldLabel relabel_to(const FieldLabel& f, const WeylElement& target) {
  if (f.sigma == target) return f;
  if (!conjugate(f.sigma, target)) throw ParseError("sigma " + target.to_cycle_string() + " is not in the class of " +
                                                    f.sigma.to_cycle_string());
  for (const auto& mu : weyl_group(f.rank()))
    if (mu * f.sigma * mu.inverse() == target) return relabel(f, mu);
  throw std::logic_error("relabel_to: no conjugating element");
}

inline json field_report(const FieldLabel& f, const TodaParams& p, const Bindings& bind) {
  json j = field_to_json(f);
  const bool ok = verify_constraints(f);
  j["constraints_ok"] = ok;
  j["cycle_type"] = f.sigma.cycle_type();
  if (ok) {
    j["monodromy"] = monodromy_to_json(monodromy_charges(f));
    if (!f.alpha.has_continuous() && !f.alphabar.has_continuous()) j["spin"] = spin(f, p, bind);
  }
  return j;
}

}  // namespace detail

inline Result run_upsilon(const JobSpec& s) {
  const UpsilonEvaluator ev(s.b);
  const json& xs = detail::need(s.inputs, "x");
  if (!xs.is_array()) throw ParseError("inputs.x must be an array");
  json out = {{"b", s.b}, {"values", json::array()}};
  for (const auto& x : xs) {
    if (!x.is_number()) throw ParseError("inputs.x entries must be numbers");
    const double v = x.get<double>();
    json row = special_to_json(ev.upsilon(v));
    row["x"] = v;
    out["values"].push_back(row);
  }
  return {ok, detail::dump(out)};
}

inline Result run_weights(const JobSpec& s) {
  const TodaParams p(s.n, s.b);
  const Charge a = detail::charge_input(s.inputs, "alpha", s.n);
  const Bindings bind = bindings_from_json(s.inputs.value("bind", json()));
  const NumericWeight x = a.evaluate(s.b, bind);
  json out = {{"alpha", charge_to_json(a)}, {"central_charge", p.c()}, {"delta", delta(x, p)}};
  if (s.n >= 3) {
    const auto w3 = w3_charge(x, p);
    out["w3"] = {w3.real(), w3.imag()};
  }
  const auto g = is_generic(a, p);
  out["generic"] = g.generic;
  out["conditional"] = g.conditional;
  out["exceptions"] = g.exceptions;
  if (s.n <= 7) out["classification"] = to_string(classify_charge(a).kind);
  return {ok, detail::dump(out)};
}

inline Result run_structure_constant(const JobSpec& s) {
  const TodaParams p(s.n, s.b);
  const UpsilonEvaluator ev(s.b);
  const Bindings bind = bindings_from_json(s.inputs.value("bind", json()));
  const Channel c = channel_from_string(s.inputs.value("channel", std::string("omega_last")));
  json out;
  if (s.inputs.contains("field1")) {
    const FieldLabel f1 = field_from_json(s.inputs.at("field1"), s.n);
    const FieldLabel f2 = field_from_json(detail::need(s.inputs, "field2"), s.n);
    const FieldLabel f3 = field_from_json(detail::need(s.inputs, "field3"), s.n);
    out = three_point_to_json(nonscalar_C(f1, f2, f3, c, p, ev, bind));
  } else {
    const Charge a1 = detail::charge_input(s.inputs, "alpha1", s.n);
    const Charge a2 = detail::charge_input(s.inputs, "alpha2", s.n);
    const double kappa = detail::need(s.inputs, "kappa").get<double>();
    out = three_point_to_json(scalar_C(a1, a2, {c, kappa}, p, ev, bind));
  }
  out["channel"] = channel_name(c);
  return {ok, detail::dump(out)};
}

/// Builds a field from inputs: "field", or "sigma" with "indices" (sl_2: r, s; sl_3 cyclic:
/// n1, n2, m1, m2; sl_3 transposition: r, s) and optional "beta" / "beta_param".
inline FieldLabel field_from_inputs(const JobSpec& s) {
  if (s.inputs.contains("field")) return field_from_json(s.inputs.at("field"), s.n);
  const WeylElement sigma = sigma_from_string(s.n, s.inputs.value("sigma", std::string("()")));
  if (sigma.is_identity()) return make_scalar_field(detail::charge_input(s.inputs, "alpha", s.n));
  const json& idx = detail::need(s.inputs, "indices");
  if (!idx.is_array()) throw ParseError("inputs.indices must be an array");
  std::vector<Rational> r;
  for (const auto& v : idx) r.push_back(rational_from_json(v));
  auto expect = [&](std::size_t k) {
    if (r.size() != k) throw ParseError("expected " + std::to_string(k) + " indices");
  };
  const std::vector<int> type = sigma.cycle_type();
  if (s.n == 2) {
    expect(2);
    return make_field_sl2(r[0], r[1]);
  }
  if (s.n == 3) {
    Sl3FieldSpec spec;
    if (type[0] == 3) {
      expect(4);
      spec.cls = Sl3Class::cyclic;
      spec.n1 = r[0];
      spec.n2 = r[1];
      spec.m1 = r[2];
      spec.m2 = r[3];
    } else {
      expect(2);
      spec.cls = Sl3Class::transposition;
      spec.r = r[0];
      spec.s = r[1];
      if (s.inputs.contains("beta")) spec.beta = coeff_from_json(s.inputs.at("beta"));
      spec.beta_param = s.inputs.value("beta_param", std::string());
    }
    const FieldLabel f = make_field_sl3(spec);
    return detail::relabel_to(f, sigma);
  }
  throw ParseError("indices are defined for n = 2 and n = 3; pass inputs.field for n > 3");
}

inline Result run_classify(const JobSpec& s) {
  const TodaParams p(s.n, s.b);
  const Bindings bind = bindings_from_json(s.inputs.value("bind", json()));
  return {ok, detail::dump(detail::field_report(field_from_inputs(s), p, bind))};
}

inline Result run_fuse(const JobSpec& s) {
  const TodaParams p(s.n, s.b);
  const Bindings bind = bindings_from_json(s.inputs.value("bind", json()));
  const FieldLabel f = field_from_inputs(s);
  FullyDegenerate d{};
  try {
    d = parse_fully_degenerate(s.inputs.value("degenerate", std::string("b*omega_1")));
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
  json out = {{"field", field_to_json(f)}, {"degenerate", to_string(d)}, {"products", json::array()}};
  for (const FieldLabel& g : fuse_nonscalar_degenerate(f, d)) out["products"].push_back(detail::field_report(g, p, bind));
  return {ok, detail::dump(out)};
}

inline constexpr double kShiftTol = 1e-7;
inline constexpr double kOffdiagTol = 1e-8;
inline constexpr double kMismatchTol = 1e-6;

/// inputs.tolerance, if present, replaces the default bound.
inline double tolerance_from(const JobSpec& s, double fallback) {
  if (!s.inputs.contains("tolerance")) return fallback;
  const json& t = s.inputs.at("tolerance");
  if (!t.is_number() || !(t.get<double>() > 0)) throw ParseError("inputs.tolerance must be a positive number");
  return t.get<double>();
}

/// Scalar shift-equation residuals over random configurations.
inline Result run_verify_shift(const JobSpec& s) {
  const TodaParams p(s.n, s.b);
  const UpsilonEvaluator ev(s.b);
  const ShiftFamily fam = family_from_string(s.inputs.value("family", std::string("b")));
  const int count = s.inputs.value("count", 20);
  if (count < 1) throw ParseError("inputs.count must be positive");
  std::mt19937_64 rng(s.seed);
  struct Case {
    NumericWeight a1, a2, a2o;
    SemiDegenerate sd;
    int i, j;
  };
  std::vector<Case> cases;
  for (int k = 0; k < count; ++k) {
    Case c{detail::random_charge(rng, s.n).evaluate(s.b), detail::random_charge(rng, s.n).evaluate(s.b),
           detail::random_charge(rng, s.n).evaluate(s.b), {}, 0, 1};
    c.sd = {rng() % 2 ? Channel::omega_1 : Channel::omega_last, detail::random_kappa(rng)};
    c.i = static_cast<int>(rng() % s.n);
    c.j = (c.i + 1 + static_cast<int>(rng() % (s.n - 1))) % s.n;
    cases.push_back(c);
  }
  const auto res = parallel_map(cases.size(), thread_budget(), [&](std::size_t k) {
    const Case& c = cases[k];
    return shift_residual_scalar(c.a1, c.a2, c.a2o, c.sd, fam, c.i, c.j, p, ev);
  });
  const double worst = *std::max_element(res.begin(), res.end());
  const double tol = tolerance_from(s, kShiftTol);
  const bool pass = worst <= tol;
  json out = {{"family", s.inputs.value("family", std::string("b"))}, {"count", count}, {"residuals", res},
              {"max_residual", worst}, {"tolerance", tol}, {"pass", pass}};
  return {pass ? ok : tolerance_failure, detail::dump(out)};
}

/// Crossing check for one random scalar configuration, or for the given fields.
inline Result run_verify_crossing(const JobSpec& s) {
  const TodaParams p(s.n, s.b);
  const std::vector<double> z = default_sample_points(s.inputs.value("points", 10));
  const int threads = thread_budget();
  CrossingReport r;
  json config;
  if (s.inputs.contains("field1")) {
    const FieldLabel f1 = field_from_json(s.inputs.at("field1"), s.n);
    const FieldLabel f2 = field_from_json(detail::need(s.inputs, "field2"), s.n);
    const FieldLabel f3 = field_from_json(detail::need(s.inputs, "field3"), s.n);
    const Channel c = channel_from_string(s.inputs.value("channel", std::string("omega_last")));
    const Bindings bind = bindings_from_json(s.inputs.value("bind", json()));
    r = crossing_residual(f1, f2, f3, c, p, z, bind, threads);
    config = s.inputs;
  } else {
    std::mt19937_64 rng(s.seed);
    const Charge a1 = detail::random_charge(rng, s.n), a2 = detail::random_charge(rng, s.n);
    const double kappa = detail::random_kappa(rng);
    const Channel c = rng() % 2 ? Channel::omega_1 : Channel::omega_last;
    config = {{"alpha1", charge_to_json(a1)}, {"alpha2", charge_to_json(a2)}, {"kappa", kappa}, {"channel", channel_name(c)}};
    r = crossing_residual(make_scalar_field(a1), make_scalar_field(a2),
                          make_semidegenerate_field(s.n, direction(c, s.n), CoeffB(Rational(0)), CoeffB(Rational(0)), "kappa"),
                          c, p, z, {{"kappa", kappa}}, threads);
  }
  const double tol = tolerance_from(s, kMismatchTol);
  const bool pass = r.offdiag_residual <= kOffdiagTol && r.ell_residual <= kOffdiagTol && r.crossing_mismatch <= tol;
  json out = {{"config", config},
              {"X", std::vector<double>(r.X.data(), r.X.data() + r.X.size())},
              {"Y", std::vector<double>(r.Y.data(), r.Y.data() + r.Y.size())},
              {"offdiag_residual", r.offdiag_residual},
              {"ell_residual", r.ell_residual},
              {"consistency_residual", r.consistency_residual},
              {"crossing_mismatch", r.crossing_mismatch},
              {"sample_points", r.sample_points},
              {"mismatches", r.mismatches},
              {"tolerance", tol},
              {"pass", pass}};
  return {pass ? ok : tolerance_failure, detail::dump(out)};
}

namespace detail {

struct GridAxis {
  std::string name;
  double from = 0.0, to = 0.0;
  int count = 1;
  [[nodiscard]] double at(int k) const { return count == 1 ? from : from + (to - from) * k / (count - 1); }
};

inline std::string csv_number(double x) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace detail

/// CSV of log|C|, sign, phase and zero order over a grid in kappa and/or continuous parameters.
inline Result run_sweep(const JobSpec& s) {
  const TodaParams p(s.n, s.b);
  const UpsilonEvaluator ev(s.b);
  const Channel c = channel_from_string(s.inputs.value("channel", std::string("omega_last")));
  std::mt19937_64 rng(s.seed);
  const Charge a1 = s.inputs.contains("alpha1") ? charge_from_json(s.inputs.at("alpha1"), s.n)
                                                : detail::random_charge(rng, s.n);
  const Charge a2 = s.inputs.contains("alpha2") ? charge_from_json(s.inputs.at("alpha2"), s.n)
                                                : detail::random_charge(rng, s.n);
  const Bindings base = bindings_from_json(s.inputs.value("bind", json()));
  const double kappa0 = s.inputs.value("kappa", 0.5);
  const json& g = detail::need(s.inputs, "grid");
  if (!g.is_array() || g.empty() || g.size() > 2) throw ParseError("inputs.grid must list one or two axes");
  std::vector<detail::GridAxis> axes;
  for (const auto& a : g) {
    try {
      axes.push_back({a.at("name").get<std::string>(), a.at("from").get<double>(), a.at("to").get<double>(),
                      a.at("count").get<int>()});
    } catch (const json::exception& e) {
      throw ParseError(std::string("grid axis: ") + e.what());
    }
    if (axes.back().count < 1) throw ParseError("grid count must be positive");
  }
  for (const auto& ax : axes)
    if (ax.name != "kappa" && !a1.cont().count(ax.name) && !a2.cont().count(ax.name))
      throw ParseError("grid axis '" + ax.name + "' is neither kappa nor a continuous parameter");
  const std::size_t rows = axes.size() == 1 ? axes[0].count : static_cast<std::size_t>(axes[0].count) * axes[1].count;
  struct Row {
    std::vector<double> params;
    std::string status;
    ThreePointResult r;
  };
  const auto out = parallel_map(rows, thread_budget(), [&](std::size_t k) {
    Row row;
    Bindings bind = base;
    double kappa = kappa0;
    const std::size_t idx[2] = {axes.size() == 1 ? k : k / axes[1].count, axes.size() == 1 ? 0 : k % axes[1].count};
    for (std::size_t a = 0; a < axes.size(); ++a) {
      const double v = axes[a].at(static_cast<int>(idx[a]));
      row.params.push_back(v);
      if (axes[a].name == "kappa") kappa = v;
      else bind[axes[a].name] = v;
    }
    try {
      row.r = scalar_C(a1.evaluate(p.b, bind), a2.evaluate(p.b, bind), {c, kappa}, p, ev);
      row.status = row.r.order_twice > 0 ? "zero" : row.r.order_twice < 0 ? "pole" : "finite";
    } catch (const std::domain_error&) {
      row.status = "outside-domain";
    }
    return row;
  });
  std::string csv;
  for (const auto& ax : axes) csv += ax.name + ",";
  csv += "log_abs,sign,quarter,order_twice,flagged,status\n";
  for (const Row& row : out) {
    for (double v : row.params) csv += detail::csv_number(v) + ",";
    if (row.status == "outside-domain") {
      csv += ",,,,,outside-domain\n";
      continue;
    }
    csv += detail::csv_number(row.r.value.log_abs) + "," + std::to_string(row.r.value.sign) + "," +
           std::to_string(row.r.value.quarter) + "," + std::to_string(row.r.order_twice) + "," +
           (row.r.flagged() ? "1" : "0") + "," + row.status + "\n";
  }
  return {ok, csv};
}

/// Runs a job. Throws ParseError / std::invalid_argument (status 2) and std::domain_error (status 3).
inline Result run(const JobSpec& s) {
  if (s.command == "upsilon") return run_upsilon(s);
  if (s.command == "weights") return run_weights(s);
  if (s.command == "structure-constant") return run_structure_constant(s);
  if (s.command == "classify") return run_classify(s);
  if (s.command == "fuse") return run_fuse(s);
  if (s.command == "verify-shift") return run_verify_shift(s);
  if (s.command == "verify-crossing") return run_verify_crossing(s);
  if (s.command == "sweep") return run_sweep(s);
  throw ParseError("unknown command '" + s.command + "'");
}

/// run() with exceptions mapped to exit statuses; the message goes to `err`.
inline Result run_guarded(const JobSpec& s, std::string& err) {
  try {
    return run(s);
  } catch (const ParseError& e) {
    err = e.what();
    return {parse_error, ""};
  } catch (const json::exception& e) {
    err = e.what();
    return {parse_error, ""};
  } catch (const std::invalid_argument& e) {
    err = e.what();
    return {parse_error, ""};
  } catch (const std::domain_error& e) {
    err = e.what();
    return {domain_error, ""};
  } catch (const std::out_of_range& e) {
    err = e.what();
    return {domain_error, ""};
  }
}

}  // namespace toda::job
