#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "srdg/core.hpp"

namespace srdg {

/// Everything a batch run needs. Negative numeric fields mean "use the problem default".
struct RunConfig {
  std::string problem = "rotation";
  std::vector<int> n{50};
  int p = 1;
  int q = -1;
  double cfl = 0.9;
  std::string flux;  // "roe" | "llf"; empty keeps the problem's choice
  int limit = -1;    // 1 forces MC/BJ + positivity limiting, 0 disables it
  double t_final = -1.0;
  long max_steps = 10000000;
  int output_every = 0;  // steps between VTK/mass snapshots; 0 writes only the final state
  bool vtk = true;
  std::string output;
  std::uint64_t seed = 1;
  int threads = 1;
  std::string boundary_file;  // JSON boundary for the mesh command
  std::vector<double> lo;
  std::vector<double> hi;

  /// Boundary degree after the pairing rule: p = 1 uses quadratic boundaries, otherwise q = p.
  [[nodiscard]] int effective_q() const {
    if (q < 0) return p == 1 ? 2 : p;
    return p == 1 ? std::max(q, 2) : q;
  }

  void validate() const {
    if (p < 0) throw ConfigError("p must be >= 0");
    if (n.empty()) throw ConfigError("at least one N is required");
    for (int k : n)
      if (k < 1) throw ConfigError("N must be positive");
    if (q == 0 || q < -1) throw ConfigError("q must be >= 1");
    if (!(cfl > 0.0)) throw ConfigError("cfl must be positive");
    if (!flux.empty() && flux != "roe" && flux != "llf") throw ConfigError("flux must be roe or llf");
    if (max_steps < 1) throw ConfigError("max_steps must be positive");
    if (output_every < 0) throw ConfigError("output_every must be >= 0");
    if (!lo.empty() && lo.size() != 2) throw ConfigError("lo must have two entries");
    if (!hi.empty() && hi.size() != 2) throw ConfigError("hi must have two entries");
  }
};

[[nodiscard]] inline nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json j;
  j["problem"] = c.problem;
  j["n"] = c.n;
  j["p"] = c.p;
  j["q"] = c.effective_q();
  j["cfl"] = c.cfl;
  j["flux"] = c.flux;
  j["limit"] = c.limit;
  j["t_final"] = c.t_final;
  j["max_steps"] = c.max_steps;
  j["output_every"] = c.output_every;
  j["vtk"] = c.vtk;
  j["output"] = c.output;
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  if (!c.boundary_file.empty()) j["boundary_file"] = c.boundary_file;
  if (!c.lo.empty()) j["lo"] = c.lo;
  if (!c.hi.empty()) j["hi"] = c.hi;
  return j;
}

/// Read keys present in j into c; unknown keys are rejected so typos do not pass silently.
inline void apply_json(const nlohmann::json& j, RunConfig& c) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "problem") c.problem = v.get<std::string>();
      else if (key == "n") c.n = v.is_array() ? v.get<std::vector<int>>() : std::vector<int>{v.get<int>()};
      else if (key == "p") c.p = v.get<int>();
      else if (key == "q") c.q = v.get<int>();
      else if (key == "cfl") c.cfl = v.get<double>();
      else if (key == "flux") c.flux = v.get<std::string>();
      else if (key == "limit") c.limit = v.is_boolean() ? static_cast<int>(v.get<bool>()) : v.get<int>();
      else if (key == "t_final") c.t_final = v.get<double>();
      else if (key == "max_steps") c.max_steps = v.get<long>();
      else if (key == "output_every") c.output_every = v.get<int>();
      else if (key == "vtk") c.vtk = v.get<bool>();
      else if (key == "output") c.output = v.get<std::string>();
      else if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "threads") c.threads = v.get<int>();
      else if (key == "boundary_file") c.boundary_file = v.get<std::string>();
      else if (key == "lo") c.lo = v.get<std::vector<double>>();
      else if (key == "hi") c.hi = v.get<std::vector<double>>();
      else throw ConfigError("unknown config key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
}

[[nodiscard]] inline RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(f);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config " + path + " is not valid JSON: " + e.what());
  }
  RunConfig c;
  apply_json(j, c);
  return c;
}

}  // namespace srdg
