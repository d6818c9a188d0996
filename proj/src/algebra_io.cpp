#include "carnot/algebra_io.hpp"

#include <charconv>
#include <fstream>
#include <regex>
#include <set>

#include "carnot/free_nilpotent.hpp"
#include "carnot/verify.hpp"

namespace carnot {

namespace {

using nlohmann::json;

[[noreturn]] void schema_error(const std::string& what) { throw InvalidAlgebra("algebra file: " + what); }

Rational json_integer(const json& v, const char* field) {
  if (v.is_number_integer()) return Rational(mpz_class(std::to_string(v.get<long long>()), 10));
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (!std::regex_match(s, std::regex("[+-]?[0-9]+"))) schema_error(std::string(field) + " must be an integer, got '" + s + "'");
    return Rational(mpz_class(s[0] == '+' ? s.substr(1) : s, 10));
  }
  schema_error(std::string(field) + " must be an integer or integer string");
}

void require_keys(const json& obj, const std::set<std::string>& allowed, const std::set<std::string>& required,
                  const std::string& where) {
  if (!obj.is_object()) schema_error(where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key)) schema_error("unknown field '" + key + "' in " + where);
  }
  for (const auto& key : required) {
    if (!obj.contains(key)) schema_error("missing field '" + key + "' in " + where);
  }
}

int json_index(const json& v, const char* field, int dim) {
  if (!v.is_number_integer()) schema_error(std::string(field) + " must be an integer");
  const long long x = v.get<long long>();
  if (x < 0 || x >= dim) schema_error(std::string(field) + " = " + std::to_string(x) + " out of range [0, " + std::to_string(dim) + ")");
  return static_cast<int>(x);
}

}  // namespace

AlgebraPtr algebra_from_json(const json& doc, bool verify) {
  require_keys(doc, {"name", "dim", "step", "layer_dims", "basis", "brackets", "stratified"},
               {"dim", "step", "layer_dims", "brackets"}, "algebra");
  if (!doc["dim"].is_number_integer() || doc["dim"].get<long long>() < 1) schema_error("dim must be a positive integer");
  if (!doc["step"].is_number_integer() || doc["step"].get<long long>() < 1) schema_error("step must be a positive integer");
  const int dim = doc["dim"].get<int>();
  const int step = doc["step"].get<int>();
  if (!doc["layer_dims"].is_array()) schema_error("layer_dims must be an array");
  std::vector<int> layer_dims;
  int total = 0;
  for (const auto& d : doc["layer_dims"]) {
    if (!d.is_number_integer() || d.get<long long>() < 1) schema_error("layer_dims entries must be positive integers");
    layer_dims.push_back(d.get<int>());
    total += layer_dims.back();
  }
  if (static_cast<int>(layer_dims.size()) != step) schema_error("layer_dims has " + std::to_string(layer_dims.size()) + " entries but step is " + std::to_string(step));
  if (total != dim) schema_error("layer_dims sum to " + std::to_string(total) + " but dim is " + std::to_string(dim));

  std::vector<std::string> labels;
  if (doc.contains("basis")) {
    if (!doc["basis"].is_array()) schema_error("basis must be an array of strings");
    for (const auto& b : doc["basis"]) {
      if (!b.is_string()) schema_error("basis must be an array of strings");
      labels.push_back(b.get<std::string>());
    }
    if (static_cast<int>(labels.size()) != dim) schema_error("basis has " + std::to_string(labels.size()) + " labels but dim is " + std::to_string(dim));
  }

  if (!doc["brackets"].is_array()) schema_error("brackets must be an array");
  std::vector<StructureConstant> table;
  std::set<std::pair<int, int>> seen;
  for (const auto& entry : doc["brackets"]) {
    require_keys(entry, {"i", "j", "coeffs"}, {"i", "j", "coeffs"}, "bracket entry");
    const int i = json_index(entry["i"], "i", dim);
    const int j = json_index(entry["j"], "j", dim);
    if (i >= j) schema_error("bracket entry (" + std::to_string(i) + ", " + std::to_string(j) + ") must have i < j");
    if (!seen.insert({i, j}).second) schema_error("duplicate bracket entry (" + std::to_string(i) + ", " + std::to_string(j) + ")");
    if (!entry["coeffs"].is_array()) schema_error("coeffs must be an array");
    for (const auto& c : entry["coeffs"]) {
      require_keys(c, {"k", "num", "den"}, {"k", "num"}, "coefficient");
      const int k = json_index(c["k"], "k", dim);
      const Rational num = json_integer(c["num"], "num");
      const Rational den = c.contains("den") ? json_integer(c["den"], "den") : Rational(1);
      if (sgn(den) == 0) schema_error("zero denominator");
      Rational value = num / den;
      value.canonicalize();
      table.push_back({i, j, k, value});
    }
  }

  const std::string name = doc.contains("name") && doc["name"].is_string() ? doc["name"].get<std::string>() : "custom";
  bool stratified = false;
  if (doc.contains("stratified")) {
    if (!doc["stratified"].is_boolean()) schema_error("stratified must be a boolean");
    stratified = doc["stratified"].get<bool>();
  }
  auto alg = std::make_shared<GradedAlgebra>(name, layer_dims, labels, table, stratified);
  if (!doc.contains("stratified")) {
    const VerifyReport probe = verify_algebra(*alg);
    alg = std::make_shared<GradedAlgebra>(name, layer_dims, labels, table, probe.rank_condition);
  }
  if (verify) {
    const VerifyReport report = verify_algebra(*alg);
    if (!report.passed()) {
      const auto& v = report.violations.front();
      throw InvalidAlgebra("algebra '" + name + "' fails " + v.check + " check: " + v.detail);
    }
  }
  return alg;
}

AlgebraPtr load_algebra_file(const std::string& path, bool verify) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open algebra file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidAlgebra("algebra file '" + path + "' is not valid JSON: " + e.what());
  }
  return algebra_from_json(doc, verify);
}

json algebra_to_json(const GradedAlgebra& alg) {
  json doc;
  doc["name"] = alg.name();
  doc["dim"] = alg.dim();
  doc["step"] = alg.step();
  doc["layer_dims"] = std::vector<int>(alg.layer_dims().begin(), alg.layer_dims().end());
  doc["basis"] = std::vector<std::string>(alg.labels().begin(), alg.labels().end());
  doc["stratified"] = alg.is_stratified();
  json brackets = json::array();
  for (const auto& block : alg.pair_blocks()) {
    json coeffs = json::array();
    for (std::size_t t = block.begin; t < block.end; ++t) {
      const auto& c = alg.structure()[t];
      json entry{{"k", c.k}};
      const mpz_class num = c.value.get_num();
      const mpz_class den = c.value.get_den();
      if (num.fits_slong_p()) entry["num"] = num.get_si(); else entry["num"] = num.get_str();
      if (den.fits_slong_p()) entry["den"] = den.get_si(); else entry["den"] = den.get_str();
      coeffs.push_back(std::move(entry));
    }
    brackets.push_back({{"i", block.i}, {"j", block.j}, {"coeffs", std::move(coeffs)}});
  }
  doc["brackets"] = std::move(brackets);
  return doc;
}

bool is_builtin_algebra(const std::string& name) {
  static const std::regex pattern("h[1-9][0-9]*|engel|r[1-9][0-9]*|free:[1-9][0-9]*:[1-9][0-9]*");
  return std::regex_match(name, pattern);
}

AlgebraPtr builtin_algebra(const std::string& name) {
  if (!is_builtin_algebra(name)) throw InvalidArgument("unknown builtin algebra '" + name + "'");
  if (name == "engel") return build_engel();
  if (name[0] == 'h') return build_heisenberg(std::stoi(name.substr(1)));
  if (name[0] == 'r') return build_abelian(std::stoi(name.substr(1)));
  const auto colon = name.find(':', 5);
  return build_free_nilpotent(std::stoi(name.substr(5, colon - 5)), std::stoi(name.substr(colon + 1)));
}

AlgebraPtr resolve_algebra(const std::string& source, bool verify) {
  if (is_builtin_algebra(source)) return builtin_algebra(source);
  return load_algebra_file(source, verify);
}

}  // namespace carnot
