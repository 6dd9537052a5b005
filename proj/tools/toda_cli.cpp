// toda_cli: structure constants, field classification and verification runs.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <CLI11.hpp>

#include "toda_job.hpp"

namespace fs = std::filesystem;
using toda::job::json;
using toda::job::JobSpec;
using toda::job::ParseError;

namespace {

struct Options {
  int n = 3;
  double b = 0.731;
  std::uint64_t seed = 7;
  std::string output, format, job_file;
  bool emit_job = false;
  // Command inputs.
  std::vector<double> x;
  std::string alpha, alpha1, alpha2, field, field1, field2, field3;
  std::string channel = "omega_last", sigma = "()", indices, beta, beta_param, degenerate = "b*omega_1";
  std::string family = "b";
  double kappa = 0.5;
  double tolerance = 0.0;
  bool kappa_set = false;
  int count = 20, points = 10;
  std::vector<std::string> bind, grid;
};

json parse_json_arg(const std::string& text, const char* flag) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string(flag) + ": " + e.what());
  }
}

json bindings(const std::vector<std::string>& items) {
  json b = json::object();
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw ParseError("--bind expects name=value, got '" + item + "'");
    try {
      std::size_t used = 0;
      const std::string v = item.substr(eq + 1);
      b[item.substr(0, eq)] = std::stod(v, &used);
      if (used != v.size()) throw std::invalid_argument(v);
    } catch (const std::logic_error&) {
      throw ParseError("--bind value is not a number: '" + item + "'");
    }
  }
  return b;
}

/// name:from:to:count
json grid_axis(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.size() != 4) throw ParseError("--grid expects name:from:to:count, got '" + text + "'");
  try {
    return {{"name", parts[0]}, {"from", std::stod(parts[1])}, {"to", std::stod(parts[2])}, {"count", std::stoi(parts[3])}};
  } catch (const std::logic_error&) {
    throw ParseError("--grid has a malformed number: '" + text + "'");
  }
}

void put_charge(json& in, const char* key, const std::string& text, int n) {
  if (text.empty()) return;
  in[key] = toda::job::charge_to_json(toda::job::charge_from_json(parse_json_arg(text, key), n));
}

void put_field(json& in, const char* key, const std::string& text, int n) {
  if (text.empty()) return;
  in[key] = toda::job::field_to_json(toda::job::field_from_json(parse_json_arg(text, key), n));
}

JobSpec build_job(const std::string& command, const Options& o) {
  JobSpec s;
  s.command = command;
  s.n = o.n;
  s.b = o.b;
  s.seed = o.seed;
  s.output_path = o.output;
  s.format = o.format.empty() ? (command == "sweep" ? "csv" : "json") : o.format;
  if (s.n < 2) throw ParseError("--n must be at least 2");
  if (!(s.b > 0)) throw ParseError("--b must be positive");
  json& in = s.inputs;
  if (!o.bind.empty()) in["bind"] = bindings(o.bind);
  if (command == "upsilon") {
    in["x"] = o.x;
  } else if (command == "weights") {
    put_charge(in, "alpha", o.alpha, o.n);
  } else if (command == "structure-constant" || command == "verify-crossing") {
    in["channel"] = o.channel;
    put_field(in, "field1", o.field1, o.n);
    put_field(in, "field2", o.field2, o.n);
    put_field(in, "field3", o.field3, o.n);
    if (command == "structure-constant" && o.field1.empty()) {
      put_charge(in, "alpha1", o.alpha1, o.n);
      if (o.alpha2 == "dual" && in.contains("alpha1"))
        in["alpha2"] = toda::job::charge_to_json(toda::dual(toda::job::charge_from_json(in["alpha1"], o.n)));
      else
        put_charge(in, "alpha2", o.alpha2, o.n);
      in["kappa"] = o.kappa;
    }
    if (command == "verify-crossing") {
      in["points"] = o.points;
      if (o.tolerance > 0) in["tolerance"] = o.tolerance;
    }
  } else if (command == "classify" || command == "fuse") {
    put_field(in, "field", o.field, o.n);
    put_charge(in, "alpha", o.alpha, o.n);
    in["sigma"] = o.sigma;
    if (!o.indices.empty()) {
      json idx = json::array();
      std::stringstream ss(o.indices);
      for (std::string p; std::getline(ss, p, ',');) idx.push_back(p);
      in["indices"] = idx;
    }
    if (!o.beta.empty()) in["beta"] = o.beta;
    if (!o.beta_param.empty()) in["beta_param"] = o.beta_param;
    if (command == "fuse") in["degenerate"] = o.degenerate;
  } else if (command == "verify-shift") {
    in["family"] = o.family;
    in["count"] = o.count;
    if (o.tolerance > 0) in["tolerance"] = o.tolerance;
  } else if (command == "sweep") {
    in["channel"] = o.channel;
    put_charge(in, "alpha1", o.alpha1, o.n);
    put_charge(in, "alpha2", o.alpha2, o.n);
    in["kappa"] = o.kappa;
    json g = json::array();
    for (const auto& a : o.grid) g.push_back(grid_axis(a));
    in["grid"] = g;
  }
  return s;
}

/// Writes through a temporary file in the target directory, then renames.
void write_atomic(const std::string& path, const std::string& text) {
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string());
    out << text;
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  fs::rename(tmp, target);
}

int execute(const JobSpec& job) {
  std::string err;
  const auto r = toda::job::run_guarded(job, err);
  if (!err.empty()) {
    std::cerr << "error: " << err << "\n";
    return r.status;
  }
  if (job.output_path.empty()) std::cout << r.text << std::flush;
  else write_atomic(job.output_path, r.text);
  return r.status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Toda structure constants, field labels and bootstrap checks"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sc) {
    sc->add_option("--n", o.n, "rank of sl_n")->capture_default_str();
    sc->add_option("--b", o.b, "coupling b > 0")->capture_default_str();
    sc->add_option("--seed", o.seed, "seed for random configurations")->capture_default_str();
    sc->add_option("--output,-o", o.output, "output path (default: stdout)");
    sc->add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sc->add_flag("--emit-job", o.emit_job, "print the job JSON instead of running it");
    sc->add_option("--bind", o.bind, "continuous parameter value, name=value");
  };

  std::vector<std::pair<std::string, CLI::App*>> subs;
  auto add = [&](const std::string& name, const std::string& help) {
    CLI::App* sc = app.add_subcommand(name, help);
    common(sc);
    subs.emplace_back(name, sc);
    return sc;
  };

  add("upsilon", "Upsilon_b at the given points")->add_option("--x", o.x, "arguments")->required();
  add("weights", "conformal dimension, W3 charge and classification of a charge")
      ->add_option("--alpha", o.alpha, "charge JSON")
      ->required();
  {
    auto* sc = add("structure-constant", "C(alpha1, alpha2, kappa omega_j), or the non-scalar constant of three fields");
    sc->add_option("--alpha1", o.alpha1, "charge JSON");
    sc->add_option("--alpha2", o.alpha2, "charge JSON, or 'dual' for the conjugate of alpha1");
    sc->add_option("--kappa", o.kappa, "semi-degenerate coefficient")->capture_default_str();
    sc->add_option("--channel", o.channel, "omega_1 or omega_last")->capture_default_str();
    sc->add_option("--field1", o.field1, "field JSON");
    sc->add_option("--field2", o.field2, "field JSON");
    sc->add_option("--field3", o.field3, "semi-degenerate field JSON");
  }
  for (const char* name : {"classify", "fuse"}) {
    auto* sc = add(name, std::string(name) == "fuse" ? "fusion with a fully degenerate field"
                                                     : "field label, constraints and monodromy charges");
    sc->add_option("--sigma", o.sigma, "permutation in cycle notation")->capture_default_str();
    sc->add_option("--indices", o.indices, "comma-separated lattice indices");
    sc->add_option("--alpha", o.alpha, "charge JSON for sigma = identity");
    sc->add_option("--field", o.field, "field JSON");
    sc->add_option("--beta", o.beta, "sl_3 transposition continuous shift (rational)");
    sc->add_option("--beta-param", o.beta_param, "name of a continuous beta parameter");
    if (std::string(name) == "fuse")
      sc->add_option("--degenerate", o.degenerate, "b*omega_1, b*omega_{n-1}, -omega_1/b or -omega_{n-1}/b")
          ->capture_default_str();
  }
  {
    auto* sc = add("verify-shift", "scalar shift-equation residuals over random configurations");
    sc->add_option("--family", o.family, "b or minus_inv_b")->capture_default_str();
    sc->add_option("--count", o.count, "number of configurations")->capture_default_str();
    sc->add_option("--tolerance", o.tolerance, "residual bound (default 1e-7)")->check(CLI::PositiveNumber);
  }
  {
    auto* sc = add("verify-crossing", "four-point crossing check");
    sc->add_option("--points", o.points, "sample points")->capture_default_str();
    sc->add_option("--tolerance", o.tolerance, "mismatch bound (default 1e-6)")->check(CLI::PositiveNumber);
    sc->add_option("--channel", o.channel, "omega_1 or omega_last")->capture_default_str();
    sc->add_option("--field1", o.field1, "field JSON");
    sc->add_option("--field2", o.field2, "field JSON");
    sc->add_option("--field3", o.field3, "semi-degenerate field JSON");
  }
  {
    auto* sc = add("sweep", "CSV grid of log|C| over kappa and continuous parameters");
    sc->add_option("--alpha1", o.alpha1, "charge JSON (default: random from seed)");
    sc->add_option("--alpha2", o.alpha2, "charge JSON (default: random from seed)");
    sc->add_option("--kappa", o.kappa, "kappa when it is not a grid axis")->capture_default_str();
    sc->add_option("--channel", o.channel, "omega_1 or omega_last")->capture_default_str();
    sc->add_option("--grid", o.grid, "axis name:from:to:count (one or two)")->required();
  }
  CLI::App* run = app.add_subcommand("run", "execute a JSON job file");
  run->add_option("--job", o.job_file, "job file")->required()->check(CLI::ExistingFile);
  run->add_option("--output,-o", o.output, "override the job's output path");
  run->add_flag("--emit-job", o.emit_job, "print the normalised job JSON instead of running it");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return toda::job::parse_error;
  }

  try {
    JobSpec job;
    if (run->parsed()) {
      std::ifstream in(o.job_file);
      std::stringstream ss;
      ss << in.rdbuf();
      job = toda::job::parse_job(ss.str());
      if (!o.output.empty()) job.output_path = o.output;
    } else {
      for (const auto& [name, sc] : subs)
        if (sc->parsed()) job = build_job(name, o);
    }
    if (o.emit_job) {
      std::cout << to_json(job).dump(2) << "\n";
      return toda::job::ok;
    }
    return execute(job);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return toda::job::parse_error;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return toda::job::parse_error;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return toda::job::domain_error;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}
