// Golden-file driver for the CLI. Each case in cases.json runs the carnot
// binary in a fresh work directory and compares exit code, stdout and any
// listed output files against tests/golden/<case>.json. Wall-clock fields
// are dropped before comparison. CARNOT_UPDATE_GOLDEN=1 rewrites the files.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) out += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return out + "'";
}

json normalize(const std::string& text) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) return text;
  if (doc.is_object()) doc.erase("wall_clock_seconds");
  return doc;
}

struct Outcome {
  int exit_code = 0;
  std::string stdout_text;
};

Outcome execute(const std::string& carnot, const json& args) {
  std::string cmd = shell_quote(carnot);
  for (const auto& a : args) cmd += " " + shell_quote(a.get<std::string>());
  cmd += " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) throw std::runtime_error("cannot run " + cmd);
  Outcome out;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) out.stdout_text.append(buf, n);
  const int status = pclose(pipe);
  out.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : 128;
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"golden-file runner"};
  std::string carnot, cases_path, golden_dir, work_root, plugin_dir, name;
  app.add_option("--carnot", carnot)->required();
  app.add_option("--cases", cases_path)->required();
  app.add_option("--golden-dir", golden_dir)->required();
  app.add_option("--work-dir", work_root)->required();
  app.add_option("--plugin-dir", plugin_dir);
  app.add_option("--case", name)->required();
  CLI11_PARSE(app, argc, argv);

  const json cases = json::parse(read_file(cases_path));
  const auto it = std::find_if(cases.begin(), cases.end(), [&](const json& c) { return c.at("name") == name; });
  if (it == cases.end()) {
    std::cerr << "no golden case named " << name << "\n";
    return 2;
  }
  const json& spec = *it;

  const fs::path work = fs::absolute(fs::path(work_root) / name);
  fs::remove_all(work);
  fs::create_directories(work);
  carnot = fs::absolute(carnot).string();
  const json inputs = spec.value("inputs", json::object());
  const json env = spec.value("env", json::object());
  for (const auto& [file, content] : inputs.items()) {
    std::ofstream(work / file) << (content.is_string() ? content.get<std::string>() : content.dump(2));
  }
  fs::current_path(work);
  ::unsetenv("CARNOT_SEED");
  if (!plugin_dir.empty()) ::setenv("CARNOT_PLUGIN_PATH", plugin_dir.c_str(), 1);
  for (const auto& [key, value] : env.items()) ::setenv(key.c_str(), value.get<std::string>().c_str(), 1);

  for (const auto& setup : spec.value("setup", json::array())) {
    if (execute(carnot, setup).exit_code != 0) {
      std::cerr << "setup command failed: " << setup.dump() << "\n";
      return 1;
    }
  }
  const Outcome outcome = execute(carnot, spec.at("args"));
  json actual = {{"args", spec.at("args")}, {"exit_code", outcome.exit_code}, {"stdout", normalize(outcome.stdout_text)}};
  json files = json::object();
  for (const auto& f : spec.value("files", json::array())) {
    const fs::path p = work / f.get<std::string>();
    files[f.get<std::string>()] = fs::exists(p) ? normalize(read_file(p)) : json(nullptr);
  }
  actual["files"] = files;

  const fs::path golden = fs::path(golden_dir) / (name + ".json");
  const char* update = std::getenv("CARNOT_UPDATE_GOLDEN");
  if (update && std::string(update) == "1") {
    std::ofstream(golden) << actual.dump(2) << "\n";
    std::cout << "updated " << golden << "\n";
    return 0;
  }
  if (!fs::exists(golden)) {
    std::cerr << "missing golden file " << golden << " (run with CARNOT_UPDATE_GOLDEN=1)\n";
    return 1;
  }
  const json expected = json::parse(read_file(golden));
  if (expected == actual) {
    std::cout << "golden " << name << ": match\n";
    return 0;
  }
  std::cerr << "golden " << name << ": mismatch\n" << json::diff(expected, actual).dump(2) << "\n";
  return 1;
}
