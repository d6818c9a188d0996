#include "carnot/json_io.hpp"

#include <cmath>

namespace carnot {

namespace {

// JSON has no infinities; they are written as null.
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

template <class T>
json list(const std::vector<T>& xs) {
  json out = json::array();
  for (const auto& x : xs) out.push_back(to_json(x));
  return out;
}

json numbers(const std::vector<double>& xs) {
  json out = json::array();
  for (double x : xs) out.push_back(number(x));
  return out;
}

json matrix(const std::vector<std::vector<double>>& m) {
  json out = json::array();
  for (const auto& row : m) out.push_back(numbers(row));
  return out;
}

}  // namespace

json to_json(const Point& x) {
  json out = json::array();
  for (double v : x.coords()) out.push_back(number(v));
  return out;
}

json to_json(const ExactElement& x) {
  json out = json::array();
  for (const auto& v : x.coords()) out.push_back(to_string(v));
  return out;
}

json to_json(const HomogeneousNorm& norm) {
  return {{"algebra", norm.algebra->name()},
          {"sigmas", numbers(norm.sigmas)},
          {"layer_norm", to_string(norm.layer_norm)},
          {"certified_pairs", norm.certified_pairs}};
}

json to_json(const VerifyReport& r) {
  json violations = json::array();
  for (const auto& v : r.violations) {
    violations.push_back({{"check", v.check}, {"i", v.i}, {"j", v.j}, {"k", v.k}, {"detail", v.detail}});
  }
  return {{"passed", r.passed()},
          {"antisymmetry", r.antisymmetry},
          {"jacobi", r.jacobi},
          {"grading", r.grading},
          {"nilpotent", r.nilpotent},
          {"rank_condition", r.rank_condition},
          {"stratified", r.stratified_flag},
          {"violations", violations},
          {"unlisted_violations", r.unlisted}};
}

json to_json(const CalibrationResult& r) {
  return {{"norm", to_json(r.norm)},
          {"violation_free", r.violation_free},
          {"residual", number(r.residual)},
          {"pairs", r.pairs},
          {"candidates_tried", r.candidates_tried},
          {"warnings", r.warnings}};
}

json to_json(const Witness& w) {
  json inputs = json::object();
  for (std::size_t i = 0; i < w.inputs.size(); ++i) inputs[w.names[i]] = to_json(w.inputs[i]);
  return {{"inputs", inputs}, {"lhs", number(w.lhs)}, {"rhs", number(w.rhs)}};
}

json to_json(const ConstantReport& r) {
  json params = {{"b", number(r.b)}};
  if (r.N > 0) params["N"] = r.N;
  return {{"lemma", r.lemma},
          {"constant", r.name},
          {"params", params},
          {"empirical_constant", number(r.empirical)},
          {"witness", to_json(r.witness)},
          {"samples", r.samples},
          {"seed", r.seed},
          {"skipped", r.skipped},
          {"consistent_zero", r.consistent_zero},
          {"polish_evaluations", r.polish_evaluations}};
}

json to_json(const PipelineConstant& p) {
  return {{"b", number(p.b)}, {"B", number(p.big_b)}, {"C3_B", number(p.c3)}, {"C4_B", number(p.c4.empirical)},
          {"value", number(p.value)}};
}

json to_json(const DerivativeEstimate& e) {
  json quotients = json::array();
  for (const auto& q : e.quotients) quotients.push_back(to_json(q));
  return {{"direction", to_json(e.direction)},
          {"scales", numbers(e.scales)},
          {"quotients", quotients},
          {"gaps", numbers(e.gaps)},
          {"increments", numbers(e.increments)},
          {"limit", to_json(e.limit)},
          {"converged", e.converged},
          {"residual", number(e.residual)},
          {"tolerance", number(e.tolerance)},
          {"exact", e.exact},
          {"floored_scales", e.floored}};
}

json to_json(const HHom& L) {
  json rows = json::array();
  for (const auto& row : L.matrix()) {
    json r = json::array();
    for (const auto& v : row) r.push_back(to_string(v));
    rows.push_back(r);
  }
  json blocks = json::array();
  for (int layer = 1; layer <= std::min(L.source().step(), L.target().step()); ++layer) blocks.push_back(matrix(L.layer_block(layer)));
  return {{"source", L.source().name()}, {"target", L.target().name()}, {"matrix", rows}, {"layer_blocks", blocks}};
}

json to_json(const PansuFit& fit) {
  json checks = json::array();
  for (const auto& c : fit.checks) {
    checks.push_back({{"kind", c.kind},
                      {"direction", to_json(c.direction)},
                      {"a", number(c.a)},
                      {"measured", to_json(c.measured)},
                      {"predicted", to_json(c.predicted)},
                      {"discrepancy", number(c.discrepancy)},
                      {"tolerance", number(c.tolerance)},
                      {"converged", c.converged},
                      {"passed", c.passed}});
  }
  return {{"base", to_json(fit.base)},
          {"horizontal", list(fit.horizontal)},
          {"first_layer", matrix(fit.first_layer)},
          {"differential", fit.differential ? to_json(*fit.differential) : json(nullptr)},
          {"checks", checks},
          {"all_converged", fit.all_converged},
          {"consistent", fit.consistent},
          {"passed", fit.passed},
          {"failure", fit.failure}};
}

json to_json(const ResidualSample& r) {
  return {{"radius", number(r.radius)}, {"residual", number(r.residual)}, {"admissible", r.admissible}, {"inconclusive", r.inconclusive}};
}

json to_json(const CompositionReport& r) {
  return {{"discrepancy", number(r.discrepancy)},
          {"scales", numbers(r.scales)},
          {"per_scale", numbers(r.per_scale)},
          {"zeta", to_json(r.zeta)},
          {"eta", to_json(r.eta)},
          {"product", to_json(r.product)}};
}

json to_json(const Certificate& c) {
  return {{"closed_form", c.closed_form}, {"samples", c.samples}, {"hits", c.hits}, {"seed", c.seed}};
}

json to_json(const HoleWitness& w) {
  return {{"scale", number(w.scale)},
          {"center", to_json(w.center)},
          {"radius", number(w.radius)},
          {"distance", number(w.distance)},
          {"certificate", to_json(w.certificate)}};
}

json to_json(const ProbeReport& r) {
  json scales = json::array();
  for (const auto& s : r.scales) {
    scales.push_back({{"radius", number(s.radius)},
                      {"candidates", s.candidates},
                      {"found", s.witness.has_value()},
                      {"witness", s.witness ? to_json(*s.witness) : json(nullptr)}});
  }
  return {{"anchor", to_json(r.anchor)}, {"lambda", number(r.lambda)}, {"budget", r.budget}, {"scales", scales},
          {"witness_count", r.witnesses().size()}};
}

json to_json(const BadSetConstants& c) {
  return {{"b1", number(c.b1)}, {"b2", number(c.b2)}, {"C1", number(c.c1)}, {"C2", number(c.c2)},
          {"L", number(c.lipschitz)}, {"nu", c.nu}, {"s", c.s}, {"threshold", number(c.threshold)}};
}

json to_json(const BadSetDiagnostic& d) {
  json scales = json::array();
  for (const auto& s : d.scales) {
    scales.push_back({{"t", number(s.t)},
                      {"zeta_t", to_json(s.zeta_t)},
                      {"eta_t", to_json(s.eta_t)},
                      {"A1", number(s.a1)},
                      {"A2", number(s.a2)},
                      {"A3", number(s.a3)},
                      {"A4", number(s.a4)},
                      {"conditions", s.conditions},
                      {"omega_found", s.omega_found},
                      {"omega", to_json(s.omega)},
                      {"omega_gap", number(s.omega_gap)},
                      {"lhs", number(s.lhs)},
                      {"rhs", number(s.rhs)},
                      {"badt", s.badt},
                      {"badt2", s.badt2},
                      {"note", s.note}});
  }
  const auto& p = d.params;
  json params = {{"zeta", to_json(p.zeta)}, {"eta", to_json(p.eta)}, {"y", to_json(p.y)}, {"z", to_json(p.z)},
                 {"eps", number(p.eps)}, {"delta", number(p.delta)}, {"t_grid", numbers(p.t_grid)},
                 {"omega_restarts", p.omega_restarts}, {"omega_steps", p.omega_steps},
                 {"direction_samples", p.direction_samples}, {"constant_samples", p.constant_samples}, {"seed", p.seed}};
  return {{"p", to_json(d.p)}, {"params", params}, {"constants", to_json(d.constants)}, {"scales", scales},
          {"verdict", d.verdict}, {"reason", d.reason}};
}

json to_json(const MeasureRow& r) {
  json out = {{"resolution", r.resolution}, {"samples", r.samples}, {"fraction", number(r.fraction)},
              {"fraction_stderr", number(r.fraction_stderr)}, {"porous_component", r.porous_component}};
  if (r.porous_component) {
    out["neighborhood_radius"] = number(r.neighborhood_radius);
    out["porous_estimate"] = number(r.porous_estimate);
    out["porous_stderr"] = number(r.porous_stderr);
  }
  return out;
}

json to_json(const DensitySample& s) {
  return {{"radius", number(s.radius)}, {"ratio", number(s.ratio)}, {"stderr", number(s.stderr_)}, {"samples", s.samples}};
}

json to_json(const DirectionalDensity& d) { return {{"t", number(d.t)}, {"bad_fraction", number(d.bad_fraction)}}; }

}  // namespace carnot
