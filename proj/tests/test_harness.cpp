#include <cstdlib>
#include <random>
#include <sstream>

#include "doctest.h"
#include "carnot/algebra_io.hpp"
#include "carnot/derivative.hpp"
#include "carnot/harness.hpp"
#include "carnot/registry.hpp"

using namespace carnot;
using nlohmann::json;

namespace {

ExperimentConfig config(const std::string& op, json params = json::object()) {
  ExperimentConfig c;
  c.operation = op;
  c.params = std::move(params);
  c.seed = 7;
  return c;
}

std::string random_word(std::mt19937_64& rng) {
  static const std::string alphabet = "abcxyz-:,./0123456789 \"\\";
  std::string out;
  const int n = static_cast<int>(rng() % 12);
  for (int i = 0; i < n; ++i) out += alphabet[rng() % alphabet.size()];
  return out;
}

}  // namespace

TEST_CASE("config documents round-trip losslessly") {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 200; ++i) {
    ExperimentConfig c;
    c.algebra = random_word(rng);
    c.norm.sigma_source = rng() % 2 ? "calibrate" : "explicit";
    c.norm.sigmas = {1.0, std::ldexp(static_cast<double>(rng() % 1000), -7), 0.1 * static_cast<double>(rng() % 7 + 1)};
    c.norm.layer_norm = rng() % 2 ? LayerNorm::Max : LayerNorm::Euclidean;
    c.norm.calibration_pairs = static_cast<long>(rng() % 100000) + 1;
    c.map = random_word(rng);
    c.domain = random_word(rng);
    c.operation = "op" + random_word(rng);
    c.params = {{"x", {random_word(rng), 0.1 * static_cast<double>(rng() % 100)}}, {"n", static_cast<long>(rng() % 50)}};
    c.seed = rng();
    c.output = random_word(rng);
    const json doc = config_to_json(c);
    const json again = config_to_json(config_from_json(json::parse(doc.dump())));
    CHECK(doc == again);
    CHECK(doc.dump() == again.dump());
  }
}

TEST_CASE("config validation") {
  json doc = config_to_json(config("verify_algebra"));
  doc["surprise"] = 1;
  CHECK_THROWS_AS(config_from_json(doc), ConfigError);
  doc = config_to_json(config("verify_algebra"));
  doc["schema"] = "carnot.config/0";
  CHECK_THROWS_AS(config_from_json(doc), ConfigError);
  doc = config_to_json(config("verify_algebra"));
  doc["norm"]["extra"] = true;
  CHECK_THROWS_AS(config_from_json(doc), ConfigError);
  doc = config_to_json(config("verify_algebra"));
  doc["seed"] = "seven";
  CHECK_THROWS_AS(config_from_json(doc), ConfigError);
  doc = config_to_json(config("verify_algebra"));
  doc.erase("operation");
  CHECK_THROWS_AS(config_from_json(doc), ConfigError);
}

TEST_CASE("seed override from the environment") {
  auto c = config("verify_algebra");
  ::setenv("CARNOT_SEED", "12345", 1);
  apply_seed_override(c);
  CHECK(c.seed == 12345);
  ::setenv("CARNOT_SEED", "12x", 1);
  CHECK_THROWS_AS(apply_seed_override(c), ConfigError);
  ::unsetenv("CARNOT_SEED");
  apply_seed_override(c);
  CHECK(c.seed == 12345);
}

TEST_CASE("csv traces use rfc 4180 quoting and round-trip doubles") {
  CHECK(csv_escape("plain") == "plain");
  CHECK(csv_escape("a,b") == "\"a,b\"");
  CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
  std::ostringstream out;
  write_csv(out, {"t", {"t", "value, scaled"}, {{0.1, 1.0 / 3.0}, {1e-300, -2.5}}});
  CHECK(out.str() == "t,\"value, scaled\"\r\n0.10000000000000001,0.33333333333333331\r\n1e-300,-2.5\r\n");
  CHECK(std::stod("0.33333333333333331") == 1.0 / 3.0);
}

TEST_CASE("verify_algebra on h1 passes") {
  const auto rep = run(config("verify_algebra"));
  CHECK(rep.exit_code == 0);
  CHECK(rep.error.is_null());
  CHECK(rep.payload["report"]["passed"] == true);
  CHECK(rep.version == "0.1.0");
  CHECK(rep.config == config_to_json(config("verify_algebra")));
}

TEST_CASE("identical configs give byte-identical payloads") {
  std::vector<ExperimentConfig> configs = {
      config("product_perturbation", {{"N", 2}, {"samples", 3000}, {"constant_samples", 1000}}),
      config("calibrate", {{"pairs", 2000}}),
      config("porosity_probe", {{"radii", {1.0, 0.5}}, {"budget", 500}}),
      config("density_index", {{"radii", {1.0, 0.5}}, {"samples", 500}}),
  };
  configs[2].domain = "halfspace:1,0,0:0";
  configs[3].domain = "probe-holes";
  auto pansu = config("pansu", {{"point", {0.1, 0.2, 0.3}}, {"samples", 200}});
  pansu.map = "smooth-h1r";
  configs.push_back(pansu);
  for (const auto& c : configs) {
    CAPTURE(c.operation);
    const auto a = run(c), b = run(c);
    REQUIRE(a.exit_code == 0);
    CHECK(a.payload.dump() == b.payload.dump());
    CHECK(a.warnings == b.warnings);
  }
}

TEST_CASE("validation failures exit with code 2") {
  auto c = config("pansu");
  c.map = "no-such-map";
  auto rep = run(c);
  CHECK(rep.exit_code == 2);
  CHECK(rep.error["message"].get<std::string>().find("no-such-map") != std::string::npos);

  rep = run(config("no_such_operation"));
  CHECK(rep.exit_code == 2);

  rep = run(config("calibrate", {{"pairz", 10}}));
  CHECK(rep.exit_code == 2);
  CHECK(rep.error["message"].get<std::string>().find("pairz") != std::string::npos);

  c = config("verify_algebra");
  c.algebra = "/nonexistent/algebra.json";
  CHECK(run(c).exit_code == 2);

  c = config("density_index");
  c.domain = "halfspace:1,0:0";
  CHECK(run(c).exit_code == 2);

  CHECK(run(config("suite", {{"name", "nope"}})).exit_code == 2);
  CHECK(run(config("bch", {{"x", {"1/0", 0, 0}}, {"y", {0, 0, 0}}})).exit_code == 2);
}

TEST_CASE("operation failures exit with code 1 and a structured error") {
  // Right translations have no directional derivative across the center.
  auto c = config("composition", {{"zeta", {1, 0, 0}}, {"eta", {0, 1, 0}}, {"schedule", "1:0.5:20"}});
  c.map = "right-translate:0,3,0";
  const auto rep = run(c);
  CHECK(rep.exit_code == 1);
  CHECK(rep.error["kind"] == "NonConvergence");
  CHECK(rep.payload.is_null());
}

TEST_CASE("bch accepts exact rational coordinates") {
  const auto rep = run(config("bch", {{"x", {"1", "0", "0"}}, {"y", {"0", "1/3", "0"}}}));
  REQUIRE(rep.exit_code == 0);
  CHECK(rep.payload["product"] == json({"1", "1/3", "1/6"}));
}

TEST_CASE("operations attach plot traces") {
  auto c = config("derivative", {{"direction", {1, 0, 0}}, {"schedule", "1:0.5:8"}});
  c.map = "smooth-h1r";
  const auto rep = run(c);
  REQUIRE(rep.exit_code == 0);
  REQUIRE(rep.traces.size() == 1);
  CHECK(rep.traces[0].rows.size() == 8);
  CHECK(rep.traces[0].header[0] == "t");
}

TEST_CASE("plugin maps load through the documented interface") {
  const std::string path = CARNOT_TEST_PLUGIN;
  const auto n = HomogeneousNorm::unit(build_heisenberg(1));
  const auto f = make_map("custom:" + path, n, [](AlgebraPtr a) { return HomogeneousNorm::unit(std::move(a)); });
  CHECK(f.target_alg().dim() == 1);
  CHECK(f.lipschitz_supplied);
  const auto fit = fit_pansu_differential(f, Point(n.alg(), {0.3, -0.1, 2.0}));
  REQUIRE(fit.passed);
  CHECK(fit.first_layer[0][0] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(fit.first_layer[0][1] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK_THROWS_AS(make_map("custom:/nonexistent/libnothing.so", n, nullptr), ConfigError);
}
