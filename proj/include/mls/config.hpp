// Experiment configuration: JSON file with nested tables, validated up front;
// its hash keys every emitted artifact.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mls/conformal.hpp"

namespace mls {

struct MetricSpec {
  std::vector<Bump> bumps;
  double eps = 0.0;
  int periodization_depth = 2;
  std::string name = "metric";

  nlohmann::json to_json() const;
  static MetricSpec from_json(const nlohmann::json& j);
};

struct ExperimentConfig {
  int version = 1;
  std::string group = "bolza";
  std::vector<MetricSpec> metrics;  // first entry is the primary metric
  double length_cap = 10.0;
  double window_T = 9.0;
  std::vector<double> eps_ladder = {0.005, 0.01, 0.02, 0.04};
  uint64_t seed = 12345;
  // flow / variance controls
  double flow_T = 200.0;
  std::size_t flow_n = 2000;
  double dt_max = 0.05;
  int workers = 0;  // 0: hardware concurrency
  std::string out_dir = "out";

  static ExperimentConfig from_file(const std::string& path);
  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  // hash of the canonical serialization, excluding out_dir and workers
  uint64_t hash() const;
  void validate() const;

  const MetricSpec& primary_metric() const;
};

nlohmann::json default_config_json();

}  // namespace mls
