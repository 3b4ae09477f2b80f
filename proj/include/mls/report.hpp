#pragma once

#include <cstdint>
#include <map>
#include <string>

#include <json.hpp>

namespace mls {

inline constexpr const char* kToolVersion = "mlslab 1.0.0";

inline uint64_t fnv64_str(const std::string& s, uint64_t h = 1469598103934665603ull) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

struct FunctionalReport {
  std::string name;
  double value = 0.0;
  double stat_error = 0.0;  // statistical or truncation error bar
  double T = 0.0;           // window parameter
  double window_width = 1.0;
  long n = 0;
  uint64_t seed = 0;
  uint64_t inputs_hash = 0;
  std::string notes;
  std::map<std::string, double> extras;

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["name"] = name;
    j["value"] = value;
    j["stat_error"] = stat_error;
    j["window"] = {{"T", T}, {"width", window_width}};
    j["n"] = n;
    j["seed"] = seed;
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(inputs_hash));
    j["inputs_hash"] = std::string(buf);
    if (!notes.empty()) j["notes"] = notes;
    for (const auto& [k, v] : extras) j["extras"][k] = v;
    j["tool"] = kToolVersion;
    return j;
  }
};

}  // namespace mls
