#include "carnot/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "carnot/algebra_io.hpp"
#include "carnot/json_io.hpp"
#include "carnot/registry.hpp"
#include "carnot/sampling.hpp"
#include "carnot/suites.hpp"

namespace carnot {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) throw ConfigError("unknown field '" + it.key() + "' in " + where);
  }
}

template <class T>
T field(const json& obj, const std::string& key, const T& fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("field '" + key + "' in " + where + " has the wrong type");
  }
}

}  // namespace

ExperimentConfig config_from_json(const json& doc) {
  reject_unknown(doc, {"schema", "algebra", "norm", "map", "domain", "operation", "params", "seed", "output"}, "config");
  const std::string schema = field<std::string>(doc, "schema", "", "config");
  if (schema != kConfigSchema) throw ConfigError("config schema must be '" + std::string(kConfigSchema) + "', got '" + schema + "'");
  ExperimentConfig c;
  c.algebra = field<std::string>(doc, "algebra", c.algebra, "config");
  if (doc.contains("norm")) {
    const json& n = doc.at("norm");
    reject_unknown(n, {"sigma_source", "sigmas", "layer_norm", "calibration_pairs"}, "norm");
    c.norm.sigma_source = field<std::string>(n, "sigma_source", c.norm.sigma_source, "norm");
    if (c.norm.sigma_source != "calibrate" && c.norm.sigma_source != "explicit") {
      throw ConfigError("norm.sigma_source must be 'calibrate' or 'explicit'");
    }
    c.norm.sigmas = field<std::vector<double>>(n, "sigmas", {}, "norm");
    try {
      c.norm.layer_norm = parse_layer_norm(field<std::string>(n, "layer_norm", "euclidean", "norm"));
    } catch (const InvalidArgument& e) {
      throw ConfigError(e.what());
    }
    c.norm.calibration_pairs = field<long>(n, "calibration_pairs", c.norm.calibration_pairs, "norm");
    if (c.norm.calibration_pairs <= 0) throw ConfigError("norm.calibration_pairs must be positive");
    if (c.norm.sigma_source == "explicit" && c.norm.sigmas.empty()) throw ConfigError("explicit norm needs sigmas");
  }
  c.map = field<std::string>(doc, "map", "", "config");
  c.domain = field<std::string>(doc, "domain", c.domain, "config");
  c.operation = field<std::string>(doc, "operation", "", "config");
  if (c.operation.empty()) throw ConfigError("config needs an operation");
  c.params = doc.contains("params") ? doc.at("params") : json::object();
  if (!c.params.is_object()) throw ConfigError("params must be a JSON object");
  c.seed = field<std::uint64_t>(doc, "seed", 0, "config");
  c.output = field<std::string>(doc, "output", "", "config");
  return c;
}

json config_to_json(const ExperimentConfig& c) {
  return {{"schema", kConfigSchema},
          {"algebra", c.algebra},
          {"norm",
           {{"sigma_source", c.norm.sigma_source},
            {"sigmas", c.norm.sigmas},
            {"layer_norm", to_string(c.norm.layer_norm)},
            {"calibration_pairs", c.norm.calibration_pairs}}},
          {"map", c.map},
          {"domain", c.domain},
          {"operation", c.operation},
          {"params", c.params},
          {"seed", c.seed},
          {"output", c.output}};
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return config_from_json(doc);
}

void apply_seed_override(ExperimentConfig& config) {
  const char* env = std::getenv("CARNOT_SEED");
  if (!env || !*env) return;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (*end != '\0') throw ConfigError(std::string("CARNOT_SEED must be an unsigned integer, got '") + env + "'");
  config.seed = v;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void write_csv(std::ostream& out, const CsvTrace& trace) {
  for (std::size_t i = 0; i < trace.header.size(); ++i) out << (i ? "," : "") << csv_escape(trace.header[i]);
  out << "\r\n";
  char buf[64];
  for (const auto& row : trace.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", row[i]);
      out << (i ? "," : "") << buf;
    }
    out << "\r\n";
  }
}

json report_to_json(const RunReport& r) {
  json traces = json::array();
  for (const auto& t : r.traces) traces.push_back(t.name);
  return {{"config", r.config},     {"version", r.version},   {"wall_clock_seconds", r.wall_clock_seconds},
          {"payload", r.payload},   {"warnings", r.warnings}, {"error", r.error},
          {"exit_code", r.exit_code}, {"traces", traces}};
}

void write_report(const RunReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write report '" + path + "'");
  out << report_to_json(report).dump(2) << "\n";
  const std::filesystem::path p(path);
  for (const auto& trace : report.traces) {
    const auto csv = p.parent_path() / (p.stem().string() + "." + trace.name + ".csv");
    std::ofstream c(csv, std::ios::binary);
    if (!c) throw ConfigError("cannot write trace '" + csv.string() + "'");
    write_csv(c, trace);
  }
}

namespace {

class Context {
 public:
  Context(const ExperimentConfig& cfg, RunReport& rep) : cfg_(cfg), rep_(rep) {}

  const ExperimentConfig& cfg() const { return cfg_; }
  RunReport& report() { return rep_; }
  const json& params() const { return cfg_.params; }

  AlgebraPtr algebra(bool verify = true) {
    if (!alg_) alg_ = resolve_algebra(cfg_.algebra, verify);
    return alg_;
  }

  HomogeneousNorm norm_for(const AlgebraPtr& a) {
    auto it = norms_.find(a.get());
    if (it != norms_.end()) return it->second;
    HomogeneousNorm n;
    if (cfg_.norm.sigma_source == "explicit" && a.get() == algebra().get()) {
      n = HomogeneousNorm(a, cfg_.norm.sigmas, cfg_.norm.layer_norm);
    } else {
      const auto cal = calibrate_sigmas(a, cfg_.norm.layer_norm, cfg_.norm.calibration_pairs, splitmix64(cfg_.seed ^ 0xCA11B));
      for (const auto& w : cal.warnings) rep_.warnings.push_back(w);
      if (!cal.violation_free) rep_.warnings.push_back("calibration for " + a->name() + " is not violation-free");
      n = cal.norm;
    }
    norms_.emplace(a.get(), n);
    return n;
  }

  HomogeneousNorm source_norm() { return norm_for(algebra()); }

  DomainSet domain() { return parse_domain(cfg_.domain, source_norm()); }

  MapUnderTest map() {
    if (cfg_.map.empty()) throw ConfigError("operation '" + cfg_.operation + "' needs a map id");
    MapUnderTest f = make_map(cfg_.map, source_norm(), [this](AlgebraPtr a) { return norm_for(a); });
    f.domain = domain();
    if (!f.lipschitz_supplied) rep_.warnings.push_back("Lipschitz constant of " + f.id + " estimated by sampling");
    return f;
  }

  template <class T>
  T get(const std::string& key, const T& fallback) const {
    return field<T>(cfg_.params, key, fallback, "params");
  }

  Point point(const std::string& key, const GradedAlgebra& alg, const std::optional<Point>& fallback = std::nullopt) const {
    if (!cfg_.params.contains(key)) {
      if (fallback) return *fallback;
      throw ConfigError("params." + key + " is required");
    }
    return to_double(exact(key, alg));
  }

  ExactElement exact(const std::string& key, const GradedAlgebra& alg) const {
    if (!cfg_.params.contains(key)) throw ConfigError("params." + key + " is required");
    const json& v = cfg_.params.at(key);
    if (!v.is_array() || static_cast<int>(v.size()) != alg.dim()) {
      throw ConfigError("params." + key + " must be an array of " + std::to_string(alg.dim()) + " coordinates for " + alg.name());
    }
    ExactElement x(alg);
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (v[i].is_string()) {
        x[i] = parse_rational(v[i].get<std::string>());
      } else if (v[i].is_number()) {
        x[i] = exact_from_double(v[i].get<double>());
      } else {
        throw ConfigError("params." + key + " entries must be numbers or rational strings");
      }
    }
    return x;
  }

  std::vector<double> numbers(const std::string& key, const std::vector<double>& fallback) const {
    return get<std::vector<double>>(key, fallback);
  }

  Schedule schedule() const { return parse_schedule(get<std::string>("schedule", "1:0.5:30")); }

 private:
  const ExperimentConfig& cfg_;
  RunReport& rep_;
  AlgebraPtr alg_;
  std::map<const GradedAlgebra*, HomogeneousNorm> norms_;
};

std::vector<double> default_radii() {
  std::vector<double> out;
  for (int k = 1; k <= 10; ++k) out.push_back(std::ldexp(1.0, -k));
  return out;
}

CsvTrace quotient_trace(const std::string& name, const DerivativeEstimate& e) {
  CsvTrace t{name, {"t", "increment", "gap"}, {}};
  if (!e.quotients.empty()) {
    for (std::size_t i = 0; i < e.quotients.front().size(); ++i) t.header.push_back("q" + std::to_string(i));
  }
  for (std::size_t k = 0; k < e.scales.size(); ++k) {
    std::vector<double> row = {e.scales[k], e.increments[k], e.gaps[k]};
    for (double v : e.quotients[k].coords()) row.push_back(v);
    t.rows.push_back(std::move(row));
  }
  return t;
}

using Operation = std::function<json(Context&)>;

struct OperationSpec {
  std::set<std::string> params;
  Operation fn;
};

const std::map<std::string, OperationSpec>& operations() {
  static const std::map<std::string, OperationSpec> ops = {
      {"algebra_gen", {{}, [](Context& c) { return algebra_to_json(*c.algebra()); }}},
      {"verify_algebra",
       {{},
        [](Context& c) {
          const auto alg = c.algebra(false);
          const auto vr = verify_algebra(*alg);
          json out = {{"algebra", alg->name()}, {"dim", alg->dim()}, {"step", alg->step()},
                      {"layer_dims", std::vector<int>(alg->layer_dims().begin(), alg->layer_dims().end())},
                      {"report", to_json(vr)}};
          if (!vr.passed()) {
            c.report().exit_code = 1;
            c.report().error = {{"kind", "InvalidAlgebra"}, {"message", "structure constants fail verification"}};
          }
          return out;
        }}},
      {"bch",
       {{"x", "y"},
        [](Context& c) {
          const auto alg = c.algebra();
          const ExactElement x = c.exact("x", *alg);
          const ExactElement y = c.exact("y", *alg);
          const ExactElement xy = group_product(*alg, x, y);
          return json{{"x", to_json(x)}, {"y", to_json(y)}, {"product", to_json(xy)}, {"product_double", to_json(to_double(xy))},
                      {"x_inverse", to_json(group_inverse(x))}};
        }}},
      {"calibrate",
       {{"pairs"},
        [](Context& c) {
          const auto cal = calibrate_sigmas(c.algebra(), c.cfg().norm.layer_norm, c.get<long>("pairs", 20000), c.cfg().seed);
          return to_json(cal);
        }}},
      {"norm_eval",
       {{"x", "y"},
        [](Context& c) {
          const auto norm = c.source_norm();
          const Point x = c.point("x", norm.alg());
          json out = {{"norm", to_json(norm)}, {"x", to_json(x)}, {"value", hnorm(norm, x)}};
          if (c.params().contains("y")) {
            const Point y = c.point("y", norm.alg());
            out["y"] = to_json(y);
            out["distance"] = hdist(norm, x, y);
          }
          return out;
        }}},
      {"product_perturbation",
       {{"N", "b", "samples", "constant_samples"},
        [](Context& c) {
          const auto norm = c.source_norm();
          const int N = c.get<int>("N", 3);
          const double b = c.get<double>("b", 1.0);
          const auto rep = check_product_perturbation(norm, N, b, c.get<long>("samples", 100000), c.cfg().seed);
          const auto bound = pipeline_constant(norm, b, c.get<long>("constant_samples", 20000), splitmix64(c.cfg().seed + 3));
          json out = to_json(rep);
          out["norm"] = to_json(norm);
          out["bound"] = to_json(bound);
          out["bound_holds"] = rep.empirical <= bound.value;
          return out;
        }}},
      {"conjugation",
       {{"samples"},
        [](Context& c) {
          const auto norm = c.source_norm();
          json out = to_json(check_conjugation_bound(norm, c.get<long>("samples", 100000), c.cfg().seed));
          out["norm"] = to_json(norm);
          return out;
        }}},
      {"constants",
       {{"b", "samples"},
        [](Context& c) {
          const auto norm = c.source_norm();
          const double b = c.get<double>("b", 1.0);
          const long samples = c.get<long>("samples", 20000);
          json empirical = json::array();
          for (const auto& r : norm_equivalence_constants(norm, b, samples, c.cfg().seed)) empirical.push_back(to_json(r));
          const auto a = analytic_constants(norm, b);
          return json{{"norm", to_json(norm)},
                      {"b", b},
                      {"empirical", empirical},
                      {"analytic", {{"C1", a.c1}, {"C2", a.c2}, {"C3", a.c3}}},
                      {"pipeline", to_json(pipeline_constant(norm, b, samples, splitmix64(c.cfg().seed + 3)))}};
        }}},
      {"derivative",
       {{"point", "direction", "schedule", "relative_tolerance"},
        [](Context& c) {
          const auto f = c.map();
          const auto& g = f.source_alg();
          DerivativeOptions opt{c.schedule(), c.get<double>("relative_tolerance", 1e-6), c.cfg().seed};
          const Point x = c.point("point", g, Point(g));
          const auto est = f.exact_eval ? directional_derivative(f, x, c.exact("direction", g), opt)
                                        : directional_derivative(f, x, c.point("direction", g), opt);
          c.report().traces.push_back(quotient_trace("quotients", est));
          json out = to_json(est);
          out["map"] = f.id;
          out["lipschitz"] = f.lipschitz;
          return out;
        }}},
      {"pansu",
       {{"point", "schedule", "relative_tolerance", "radii", "samples"},
        [](Context& c) {
          const auto f = c.map();
          const auto& g = f.source_alg();
          DerivativeOptions opt{c.schedule(), c.get<double>("relative_tolerance", 1e-6), c.cfg().seed};
          const Point x = c.point("point", g, Point(g));
          const auto fit = fit_pansu_differential(f, x, opt);
          json out = {{"map", f.id}, {"lipschitz", f.lipschitz}, {"fit", to_json(fit)}};
          for (std::size_t k = 0; k < fit.horizontal.size(); ++k) {
            c.report().traces.push_back(quotient_trace("direction" + std::to_string(k), fit.horizontal[k]));
          }
          json curve = json::array();
          if (fit.differential) {
            CsvTrace t{"residual", {"radius", "residual"}, {}};
            for (const auto& r : differentiability_residual(f, x, *fit.differential, c.numbers("radii", default_radii()),
                                                            c.get<long>("samples", 1000), c.cfg().seed)) {
              curve.push_back(to_json(r));
              t.rows.push_back({r.radius, r.residual});
            }
            c.report().traces.push_back(std::move(t));
          }
          out["residual_curve"] = curve;
          return out;
        }}},
      {"composition",
       {{"point", "zeta", "eta", "a", "b", "schedule", "relative_tolerance"},
        [](Context& c) {
          const auto f = c.map();
          const auto& g = f.source_alg();
          DerivativeOptions opt{c.schedule(), c.get<double>("relative_tolerance", 1e-6), c.cfg().seed};
          const auto rep = composition_check(f, c.point("point", g, Point(g)), c.point("zeta", g), c.point("eta", g),
                                             c.get<double>("a", 1.0), c.get<double>("b", 1.0), opt);
          CsvTrace t{"discrepancy", {"t", "discrepancy"}, {}};
          for (std::size_t k = 0; k < rep.scales.size(); ++k) t.rows.push_back({rep.scales[k], rep.per_scale[k]});
          c.report().traces.push_back(std::move(t));
          json out = to_json(rep);
          out["map"] = f.id;
          return out;
        }}},
      {"density_index",
       {{"point", "radii", "samples"},
        [](Context& c) {
          const auto A = c.domain();
          const Point x = c.point("point", A.alg(), Point(A.alg()));
          json rows = json::array();
          CsvTrace t{"density", {"radius", "ratio"}, {}};
          for (const auto& s : density_index(A, x, c.numbers("radii", default_radii()), c.get<long>("samples", 10000), c.cfg().seed)) {
            rows.push_back(to_json(s));
            t.rows.push_back({s.radius, s.ratio});
          }
          c.report().traces.push_back(std::move(t));
          return json{{"domain", A.label()}, {"point", to_json(x)}, {"density", rows}};
        }}},
      {"directional_density",
       {{"point", "direction", "t_list", "resolution"},
        [](Context& c) {
          const auto A = c.domain();
          const Point x = c.point("point", A.alg(), Point(A.alg()));
          const Point zeta = c.point("direction", A.alg());
          json rows = json::array();
          CsvTrace t{"bad_fraction", {"t", "bad_fraction"}, {}};
          for (const auto& d : directional_density_index(A, x, zeta, c.numbers("t_list", default_radii()), c.get<long>("resolution", 100000))) {
            rows.push_back(to_json(d));
            t.rows.push_back({d.t, d.bad_fraction});
          }
          c.report().traces.push_back(std::move(t));
          return json{{"domain", A.label()}, {"point", to_json(x)}, {"direction", to_json(zeta)}, {"rows", rows}};
        }}},
      {"porosity_probe",
       {{"point", "lambda", "radii", "budget"},
        [](Context& c) {
          const auto E = c.domain();
          const Point a = c.point("point", E.alg(), Point(E.alg()));
          const auto rep = porosity_probe(E, a, c.get<double>("lambda", 0.25), c.numbers("radii", default_radii()),
                                          c.get<long>("budget", 10000), c.cfg().seed);
          CsvTrace t{"witnesses", {"radius", "found"}, {}};
          for (const auto& s : rep.scales) t.rows.push_back({s.radius, s.witness ? 1.0 : 0.0});
          c.report().traces.push_back(std::move(t));
          json out = to_json(rep);
          out["set"] = E.label();
          return out;
        }}},
      {"bad_set",
       {{"point", "zeta", "eta", "y", "z", "eps", "delta", "t_grid", "omega_restarts", "omega_steps", "direction_samples",
         "constant_samples"},
        [](Context& c) {
          const auto f = c.map();
          const auto& g = f.source_alg();
          const auto& m = f.target_alg();
          BadSetParams p;
          p.zeta = c.point("zeta", g, basis_vector<double>(g, 0));
          p.eta = c.point("eta", g, g.layer_dim(1) > 1 ? basis_vector<double>(g, 1) : basis_vector<double>(g, 0));
          p.y = c.point("y", m);
          p.z = c.point("z", m);
          p.eps = c.get<double>("eps", 1e-3);
          p.delta = c.get<double>("delta", 1.0);
          std::vector<double> grid;
          for (int k = 1; k <= 8; ++k) grid.push_back(std::ldexp(1.0, -k));
          p.t_grid = c.numbers("t_grid", grid);
          p.omega_restarts = c.get<int>("omega_restarts", 100);
          p.omega_steps = c.get<int>("omega_steps", 20);
          p.direction_samples = c.get<int>("direction_samples", 64);
          p.constant_samples = c.get<long>("constant_samples", 20000);
          p.seed = c.cfg().seed;
          const auto d = bad_set_membership(f, c.point("point", g, Point(g)), p);
          CsvTrace t{"omega", {"t", "lhs", "rhs"}, {}};
          for (const auto& s : d.scales) t.rows.push_back({s.t, s.lhs, s.rhs});
          c.report().traces.push_back(std::move(t));
          json out = to_json(d);
          out["map"] = f.id;
          return out;
        }}},
      {"measure_scan",
       {{"box_lo", "box_hi", "resolutions", "samples"},
        [](Context& c) {
          const auto E = c.domain();
          const auto n = static_cast<std::size_t>(E.alg().dim());
          Box box{c.numbers("box_lo", std::vector<double>(n, -4.5)), c.numbers("box_hi", std::vector<double>(n, 4.5))};
          json rows = json::array();
          CsvTrace t{"measure", {"resolution", "fraction", "porous_estimate"}, {}};
          for (const auto& r : porous_measure_scan(E, box, c.get<std::vector<int>>("resolutions", {2, 4, 6, 8}),
                                                   c.get<long>("samples", 20000), c.cfg().seed)) {
            rows.push_back(to_json(r));
            t.rows.push_back({static_cast<double>(r.resolution), r.fraction, r.porous_estimate});
          }
          c.report().traces.push_back(std::move(t));
          return json{{"set", E.label()}, {"box", {{"lo", box.lo}, {"hi", box.hi}}}, {"rows", rows}};
        }}},
      {"suite",
       {{"name"},
        [](Context& c) {
          const std::string name = c.get<std::string>("name", "all");
          SuiteOptions opt;
          if (c.cfg().seed != 0) opt.seed = c.cfg().seed;
          json criteria = json::array();
          std::vector<int> failed;
          for (const auto& r : run_suite(name, opt)) {
            criteria.push_back({{"id", r.id}, {"name", r.name}, {"passed", r.passed}, {"detail", r.detail}, {"data", r.data}});
            if (!r.passed) failed.push_back(r.id);
          }
          if (!failed.empty()) {
            std::string ids;
            for (int id : failed) ids += (ids.empty() ? "" : ",") + std::to_string(id);
            c.report().exit_code = 1;
            c.report().error = {{"kind", "CriteriaFailed"}, {"message", "failed criteria: " + ids}};
          }
          return json{{"suite", name}, {"seed", opt.seed}, {"criteria", criteria}, {"passed", failed.empty()}};
        }}},
  };
  return ops;
}

std::string error_kind(const std::exception& e) {
  if (dynamic_cast<const NonConvergence*>(&e)) return "NonConvergence";
  if (dynamic_cast<const SparseDomainError*>(&e)) return "SparseDomainError";
  if (dynamic_cast<const InconsistentExtension*>(&e)) return "InconsistentExtension";
  if (dynamic_cast<const Error*>(&e)) return "Error";
  return "InternalError";
}

}  // namespace

std::vector<std::string> operation_names() {
  std::vector<std::string> out;
  for (const auto& [name, spec] : operations()) out.push_back(name);
  return out;
}

RunReport run(const ExperimentConfig& config) {
  RunReport rep;
  rep.config = config_to_json(config);
  const auto start = std::chrono::steady_clock::now();
  try {
    const auto& ops = operations();
    const auto it = ops.find(config.operation);
    if (it == ops.end()) throw ConfigError("unknown operation '" + config.operation + "'");
    reject_unknown(config.params, it->second.params, "params of " + config.operation);
    Context ctx(config, rep);
    rep.payload = it->second.fn(ctx);
  } catch (const ConfigError& e) {
    rep = RunReport{rep.config, kToolVersion, 0.0, nullptr, rep.warnings, {{"kind", "ValidationError"}, {"message", e.what()}}, 2, {}};
  } catch (const InvalidArgument& e) {
    rep = RunReport{rep.config, kToolVersion, 0.0, nullptr, rep.warnings, {{"kind", "ValidationError"}, {"message", e.what()}}, 2, {}};
  } catch (const InvalidAlgebra& e) {
    rep = RunReport{rep.config, kToolVersion, 0.0, nullptr, rep.warnings, {{"kind", "ValidationError"}, {"message", e.what()}}, 2, {}};
  } catch (const AlgebraMismatch& e) {
    rep = RunReport{rep.config, kToolVersion, 0.0, nullptr, rep.warnings, {{"kind", "ValidationError"}, {"message", e.what()}}, 2, {}};
  } catch (const DimensionCapExceeded& e) {
    rep = RunReport{rep.config, kToolVersion, 0.0, nullptr, rep.warnings, {{"kind", "ValidationError"}, {"message", e.what()}}, 2, {}};
  } catch (const json::exception& e) {
    rep = RunReport{rep.config, kToolVersion, 0.0, nullptr, rep.warnings, {{"kind", "ValidationError"}, {"message", e.what()}}, 2, {}};
  } catch (const std::exception& e) {
    rep = RunReport{rep.config, kToolVersion, 0.0, nullptr, rep.warnings, {{"kind", error_kind(e)}, {"message", e.what()}}, 1, {}};
  }
  rep.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

}  // namespace carnot
