// Command-line front end. Every verb builds an ExperimentConfig and hands it
// to the harness, so `carnot run --config` reproduces any verb's report.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "carnot/algebra_io.hpp"
#include "carnot/errors.hpp"
#include "carnot/harness.hpp"

using nlohmann::json;

namespace {

struct Common {
  std::string alg = "h1";
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string sigmas;
  std::string layer_norm = "euclidean";
  long calibration_pairs = 20000;
  std::string params_file;
  std::string domain = "full";
  std::string map;
};

void add_common(CLI::App* cmd, Common& c, bool with_map, bool with_domain) {
  cmd->add_option("--alg", c.alg, "builtin algebra (h1, engel, r3, free:2:3, ...) or structure-constant file");
  cmd->add_option("--seed", c.seed, "base seed");
  cmd->add_option("--out", c.out, "report path; CSV traces are written next to it");
  cmd->add_option("--sigmas", c.sigmas, "explicit layer weights, comma separated; default calibrates");
  cmd->add_option("--layer-norm", c.layer_norm, "euclidean | max");
  cmd->add_option("--calibration-pairs", c.calibration_pairs, "triangle-check sample size for calibration");
  cmd->add_option("--params", c.params_file, "JSON object of operation parameters; flags take precedence");
  if (with_map) cmd->add_option("--map", c.map, "map id from the registry");
  if (with_domain) cmd->add_option("--set,--domain", c.domain, "domain descriptor");
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

// Coordinates stay strings so rationals such as 1/3 are read exactly.
json coords(const std::string& text) {
  json out = json::array();
  for (const auto& s : split(text, ',')) out.push_back(s);
  return out;
}

json numbers(const std::string& text) {
  json out = json::array();
  for (const auto& s : split(text, ',')) {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      out.push_back(v);
    } catch (const std::exception&) {
      throw carnot::ConfigError("expected a number, got '" + s + "'");
    }
  }
  return out;
}

carnot::ExperimentConfig base_config(const Common& c, const std::string& operation) {
  carnot::ExperimentConfig cfg;
  cfg.algebra = c.alg;
  cfg.operation = operation;
  cfg.map = c.map;
  cfg.domain = c.domain;
  cfg.seed = c.seed.value_or(0);
  cfg.output = c.out;
  cfg.norm.layer_norm = carnot::parse_layer_norm(c.layer_norm);
  cfg.norm.calibration_pairs = c.calibration_pairs;
  if (!c.sigmas.empty()) {
    cfg.norm.sigma_source = "explicit";
    for (const auto& v : numbers(c.sigmas)) cfg.norm.sigmas.push_back(v.get<double>());
  }
  if (!c.params_file.empty()) {
    std::ifstream in(c.params_file);
    if (!in) throw carnot::ConfigError("cannot open params file '" + c.params_file + "'");
    try {
      cfg.params = json::parse(in);
    } catch (const json::parse_error& e) {
      throw carnot::ConfigError("params file '" + c.params_file + "' is not valid JSON: " + e.what());
    }
    if (!cfg.params.is_object()) throw carnot::ConfigError("params file must hold a JSON object");
  }
  return cfg;
}

int finish(carnot::ExperimentConfig cfg) {
  carnot::apply_seed_override(cfg);
  const carnot::RunReport report = carnot::run(cfg);
  std::cout << carnot::report_to_json(report).dump(2) << "\n";
  if (!cfg.output.empty()) carnot::write_report(report, cfg.output);
  if (report.exit_code != 0) {
    std::cerr << "carnot: " << report.error.value("kind", "Error") << ": " << report.error.value("message", "") << "\n";
  }
  return report.exit_code;
}

// Errors raised before a config exists still produce a report-shaped document.
int fail(const std::string& message, int code) {
  const json doc = {{"version", carnot::kToolVersion},
                    {"error", {{"kind", code == 2 ? "ValidationError" : "Error"}, {"message", message}}},
                    {"exit_code", code}};
  std::cout << doc.dump(2) << "\n";
  std::cerr << "carnot: " << message << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"carnot: Carnot group arithmetic, Pansu differentiation and porosity diagnostics"};
  app.set_version_flag("--version", std::string(carnot::kToolVersion));
  app.require_subcommand(1);

  Common common;
  // key -> raw flag text; the kind decides how it is converted into params.
  std::map<std::string, std::string> coord_flags, number_list_flags, string_flags, integer_flags, real_flags;
  std::string operation;

  auto leaf = [&](CLI::App* cmd, const std::string& op, bool with_map, bool with_domain) {
    add_common(cmd, common, with_map, with_domain);
    cmd->callback([&operation, op] { operation = op; });
    return cmd;
  };
  auto coord = [&](CLI::App* cmd, const std::string& flag, const std::string& key, const std::string& help) {
    cmd->add_option(flag, coord_flags[key], help);
  };
  auto list = [&](CLI::App* cmd, const std::string& flag, const std::string& key, const std::string& help) {
    cmd->add_option(flag, number_list_flags[key], help);
  };
  auto text = [&](CLI::App* cmd, const std::string& flag, const std::string& key, const std::string& help) {
    cmd->add_option(flag, string_flags[key], help);
  };
  auto integer = [&](CLI::App* cmd, const std::string& flag, const std::string& key, const std::string& help) {
    cmd->add_option(flag, integer_flags[key], help);
  };
  auto real = [&](CLI::App* cmd, const std::string& flag, const std::string& key, const std::string& help) {
    cmd->add_option(flag, real_flags[key], help);
  };

  // algebra gen writes the algebra file itself rather than a report.
  auto* algebra = app.add_subcommand("algebra", "build or verify structure constants")->require_subcommand(1);
  std::string gen_name;
  int gen_rank = 0, gen_step = 0;
  auto* gen = algebra->add_subcommand("gen", "write a builtin or free nilpotent algebra as JSON");
  gen->add_option("--name", gen_name, "builtin algebra name");
  gen->add_option("--rank", gen_rank, "rank of the free nilpotent algebra");
  gen->add_option("--step", gen_step, "step of the free nilpotent algebra");
  gen->add_option("--out", common.out, "output path; stdout when omitted");
  gen->callback([&] { operation = "algebra_gen"; });
  leaf(algebra->add_subcommand("verify", "check antisymmetry, Jacobi and grading"), "verify_algebra", false, false);

  auto* bch = leaf(app.add_subcommand("bch", "exact group product of two elements"), "bch", false, false);
  coord(bch, "--x", "x", "first factor, comma separated (rationals allowed)");
  coord(bch, "--y", "y", "second factor");

  auto* norm = app.add_subcommand("norm", "homogeneous norm tools")->require_subcommand(1);
  integer(leaf(norm->add_subcommand("calibrate", "search layer weights passing the triangle check"), "calibrate", false, false),
          "--pairs", "pairs", "fresh triangle-check pairs");
  auto* eval = leaf(norm->add_subcommand("eval", "evaluate the norm and distance"), "norm_eval", false, false);
  coord(eval, "--x", "x", "point");
  coord(eval, "--y", "y", "second point for the distance");

  auto* lemma = app.add_subcommand("lemma", "empirical constants of the metric inequalities")->require_subcommand(1);
  auto* pp = leaf(lemma->add_subcommand("product-perturbation", "perturbed product inequality"), "product_perturbation", false, false);
  integer(pp, "--N", "N", "number of factors");
  real(pp, "--b", "b", "perturbation size");
  integer(pp, "--samples", "samples", "random inputs");
  integer(pp, "--constant-samples", "constant_samples", "samples for the norm-equivalence constants");
  auto* conj = leaf(lemma->add_subcommand("conjugation", "conjugation bound"), "conjugation", false, false);
  integer(conj, "--samples", "samples", "random inputs");
  auto* cons = leaf(lemma->add_subcommand("constants", "norm-equivalence constants"), "constants", false, false);
  real(cons, "--b", "b", "ball radius");
  integer(cons, "--samples", "samples", "random inputs");

  auto* der = leaf(app.add_subcommand("derivative", "directional derivative along a dilation schedule"), "derivative", true, true);
  coord(der, "--point", "point", "base point");
  coord(der, "--direction", "direction", "direction");
  text(der, "--schedule", "schedule", "t0:q:steps");
  real(der, "--tol", "relative_tolerance", "relative convergence tolerance");

  auto* pansu = leaf(app.add_subcommand("pansu", "fit the Pansu differential and its residual curve"), "pansu", true, true);
  coord(pansu, "--point", "point", "base point");
  text(pansu, "--schedule", "schedule", "t0:q:steps");
  real(pansu, "--tol", "relative_tolerance", "relative convergence tolerance");
  list(pansu, "--radii", "radii", "residual radii");
  integer(pansu, "--samples", "samples", "sphere samples per radius");

  auto* comp = leaf(app.add_subcommand("composition", "compare f'(a zeta + b eta) with a f'(zeta) + b f'(eta)"), "composition", true, true);
  coord(comp, "--point", "point", "base point");
  coord(comp, "--zeta", "zeta", "first direction");
  coord(comp, "--eta", "eta", "second direction");
  real(comp, "--a", "a", "first coefficient");
  real(comp, "--b", "b", "second coefficient");
  text(comp, "--schedule", "schedule", "t0:q:steps");

  auto* dens = leaf(app.add_subcommand("density", "ball density of a domain at a point"), "density_index", false, true);
  coord(dens, "--point", "point", "base point");
  list(dens, "--radii", "radii", "radii");
  integer(dens, "--samples", "samples", "samples per radius");
  auto* ddens = leaf(app.add_subcommand("directional-density", "fraction of a horizontal segment outside a domain"),
                     "directional_density", false, true);
  coord(ddens, "--point", "point", "base point");
  coord(ddens, "--direction", "direction", "direction");
  list(ddens, "--t", "t_list", "segment lengths");
  integer(ddens, "--resolution", "resolution", "midpoint grid size");

  auto* por = app.add_subcommand("porosity", "porosity diagnostics")->require_subcommand(1);
  auto* probe = leaf(por->add_subcommand("probe", "search porosity witnesses at a point"), "porosity_probe", false, true);
  coord(probe, "--point", "point", "anchor point");
  real(probe, "--lambda", "lambda", "porosity ratio");
  list(probe, "--radii", "radii", "radii");
  integer(probe, "--budget", "budget", "certificate samples per hole");
  auto* bad = leaf(por->add_subcommand("badset", "membership diagnostic for the non-differentiability set"), "bad_set", true, true);
  coord(bad, "--point", "point", "point under test");
  real(bad, "--eps", "eps", "epsilon");
  auto* meas = leaf(por->add_subcommand("measure", "grid scan of the porous part of a set"), "measure_scan", false, true);
  list(meas, "--box-lo", "box_lo", "lower box corner");
  list(meas, "--box-hi", "box_hi", "upper box corner");
  list(meas, "--resolutions", "resolutions", "levels K");
  integer(meas, "--samples", "samples", "samples per level");

  auto* suite = app.add_subcommand("suite", "run acceptance criteria");
  add_common(suite, common, false, false);
  std::string suite_name = "all";
  suite->add_option("name", suite_name, "algebra-exact | norm | lemmas | pansu | porosity | domains | all");
  suite->callback([&] { operation = "suite"; });

  auto* runcmd = app.add_subcommand("run", "run a JSON experiment config");
  std::string config_path;
  runcmd->add_option("--config", config_path, "config file")->required();
  runcmd->add_option("--out", common.out, "report path; overrides the config");
  runcmd->callback([&] { operation = "run"; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (operation == "run") {
      auto cfg = carnot::load_config(config_path);
      if (!common.out.empty()) cfg.output = common.out;
      return finish(cfg);
    }
    if (operation == "algebra_gen") {
      std::string name = gen_name;
      if (name.empty()) {
        if (gen_rank <= 0 || gen_step <= 0) throw carnot::ConfigError("algebra gen needs --name or --rank and --step");
        name = "free:" + std::to_string(gen_rank) + ":" + std::to_string(gen_step);
      }
      const std::string doc = carnot::algebra_to_json(*carnot::builtin_algebra(name)).dump(2) + "\n";
      if (common.out.empty()) {
        std::cout << doc;
      } else {
        std::ofstream out(common.out);
        if (!out) throw carnot::ConfigError("cannot write '" + common.out + "'");
        out << doc;
      }
      return 0;
    }

    auto cfg = base_config(common, operation);
    for (const auto& [key, v] : coord_flags)
      if (!v.empty()) cfg.params[key] = coords(v);
    for (const auto& [key, v] : number_list_flags)
      if (!v.empty()) cfg.params[key] = numbers(v);
    for (const auto& [key, v] : string_flags)
      if (!v.empty()) cfg.params[key] = v;
    for (const auto& [key, v] : real_flags)
      if (!v.empty()) cfg.params[key] = numbers(v).at(0);
    for (const auto& [key, v] : integer_flags) {
      if (v.empty()) continue;
      const double x = numbers(v).at(0);
      if (x != static_cast<double>(static_cast<long>(x))) throw carnot::ConfigError("--" + key + " must be an integer");
      cfg.params[key] = static_cast<long>(x);
    }
    if (operation == "suite") cfg.params["name"] = suite_name;
    return finish(cfg);
  } catch (const carnot::Error& e) {
    return fail(e.what(), 2);
  } catch (const std::exception& e) {
    return fail(e.what(), 1);
  }
}
