#include "mls/config.hpp"

#include <fstream>
#include <stdexcept>

#include "mls/report.hpp"

namespace mls {

nlohmann::json MetricSpec::to_json() const {
  nlohmann::json j;
  j["name"] = name;
  j["eps"] = eps;
  j["periodization_depth"] = periodization_depth;
  nlohmann::json bs = nlohmann::json::array();
  for (const auto& b : bumps)
    bs.push_back({{"center", {b.center.real(), b.center.imag()}},
                  {"width", b.width},
                  {"amplitude", b.amplitude}});
  j["bumps"] = bs;
  return j;
}

MetricSpec MetricSpec::from_json(const nlohmann::json& j) {
  MetricSpec m;
  m.name = j.value("name", std::string("metric"));
  m.eps = j.value("eps", 0.0);
  m.periodization_depth = j.value("periodization_depth", 2);
  if (j.contains("bumps")) {
    for (const auto& b : j.at("bumps")) {
      Bump bump;
      auto c = b.at("center");
      bump.center = {c.at(0).get<double>(), c.at(1).get<double>()};
      bump.width = b.at("width").get<double>();
      bump.amplitude = b.at("amplitude").get<double>();
      m.bumps.push_back(bump);
    }
  }
  return m;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("config: cannot open " + path);
  nlohmann::json j;
  f >> j;
  return from_json(j);
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  c.version = j.value("version", 1);
  if (c.version != 1) throw std::runtime_error("config: unsupported schema version");
  c.group = j.value("group", std::string("bolza"));
  if (j.contains("metrics"))
    for (const auto& m : j.at("metrics")) c.metrics.push_back(MetricSpec::from_json(m));
  else if (j.contains("metric"))
    c.metrics.push_back(MetricSpec::from_json(j.at("metric")));
  c.length_cap = j.value("length_cap", 10.0);
  c.window_T = j.value("window_T", c.length_cap - 1.0);
  if (j.contains("eps_ladder")) c.eps_ladder = j.at("eps_ladder").get<std::vector<double>>();
  c.seed = j.value("seed", 12345ull);
  if (j.contains("flow")) {
    const auto& fl = j.at("flow");
    c.flow_T = fl.value("T", 200.0);
    c.flow_n = fl.value("n", static_cast<std::size_t>(2000));
    c.dt_max = fl.value("dt_max", 0.05);
  }
  c.workers = j.value("workers", 0);
  c.out_dir = j.value("out", std::string("out"));
  c.validate();
  return c;
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j;
  j["version"] = version;
  j["group"] = group;
  nlohmann::json ms = nlohmann::json::array();
  for (const auto& m : metrics) ms.push_back(m.to_json());
  j["metrics"] = ms;
  j["length_cap"] = length_cap;
  j["window_T"] = window_T;
  j["eps_ladder"] = eps_ladder;
  j["seed"] = seed;
  j["flow"] = {{"T", flow_T}, {"n", flow_n}, {"dt_max", dt_max}};
  return j;
}

uint64_t ExperimentConfig::hash() const { return fnv64_str(to_json().dump()); }

void ExperimentConfig::validate() const {
  if (group != "bolza") throw std::runtime_error("config: only the bolza group is built in");
  if (!(length_cap > 0)) throw std::runtime_error("config: length_cap must be > 0");
  if (!(window_T > 1.0) || window_T + 1.0 > length_cap + 1e-9)
    throw std::runtime_error("config: window_T must satisfy 1 < T and T+1 <= length_cap");
  if (metrics.empty()) throw std::runtime_error("config: at least one metric spec required");
  for (const auto& m : metrics) {
    for (const auto& b : m.bumps) {
      if (!(b.width >= 0.15 && b.width <= 1.0))
        throw std::runtime_error("config: bump widths must lie in [0.15, 1.0]");
      if (std::abs(b.center) >= 0.8)
        throw std::runtime_error("config: bump centers must satisfy |c| < 0.8");
    }
    if (m.periodization_depth < 1 || m.periodization_depth > 3)
      throw std::runtime_error("config: periodization_depth must be 1..3");
  }
  if (!(flow_T > 1.0) || flow_n < 2) throw std::runtime_error("config: flow parameters invalid");
}

const MetricSpec& ExperimentConfig::primary_metric() const {
  if (metrics.empty()) throw std::runtime_error("config: no metric specs");
  return metrics.front();
}

nlohmann::json default_config_json() {
  ExperimentConfig c;
  MetricSpec m;
  m.name = "two_bump";
  m.eps = 0.02;
  m.bumps = {Bump{{0.25, 0.1}, 0.5, 1.6}, Bump{{-0.15, 0.3}, 0.45, -1.2}};
  c.metrics.push_back(m);
  return c.to_json();
}

}  // namespace mls
