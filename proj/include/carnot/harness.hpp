#pragma once

// Experiment configuration, dispatch and report persistence.

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "carnot/metric.hpp"

namespace carnot {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kConfigSchema = "carnot.config/1";

struct NormConfig {
  std::string sigma_source = "calibrate";  // calibrate | explicit
  std::vector<double> sigmas;
  LayerNorm layer_norm = LayerNorm::Euclidean;
  long calibration_pairs = 20000;
};

struct ExperimentConfig {
  std::string algebra = "h1";  // builtin name or structure-constant file
  NormConfig norm;
  std::string map;             // registry id; empty when unused
  std::string domain = "full";
  std::string operation;
  nlohmann::json params = nlohmann::json::object();
  std::uint64_t seed = 0;
  std::string output;          // report path; empty for stdout only
};

/// Strict parse: unknown fields and a wrong schema tag throw ConfigError.
ExperimentConfig config_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const ExperimentConfig& config);
ExperimentConfig load_config(const std::string& path);

/// CARNOT_SEED, when set, replaces the configured seed.
void apply_seed_override(ExperimentConfig& config);

struct CsvTrace {
  std::string name;
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

/// RFC 4180 with 17 significant digits.
void write_csv(std::ostream& out, const CsvTrace& trace);
std::string csv_escape(const std::string& field);

struct RunReport {
  nlohmann::json config;
  std::string version = kToolVersion;
  double wall_clock_seconds = 0.0;
  nlohmann::json payload;
  std::vector<std::string> warnings;
  nlohmann::json error;  // null on success, else {kind, message}
  int exit_code = 0;     // 0 success, 1 operation failure, 2 validation failure
  std::vector<CsvTrace> traces;
};

nlohmann::json report_to_json(const RunReport& report);

/// Dispatches the configured operation. Never throws for operation or
/// validation errors; they are reported with the matching exit code.
RunReport run(const ExperimentConfig& config);

/// Writes the JSON report and, next to it, one <stem>.<trace>.csv per trace.
void write_report(const RunReport& report, const std::string& path);

std::vector<std::string> operation_names();

}  // namespace carnot
