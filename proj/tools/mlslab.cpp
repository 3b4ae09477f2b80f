// Experiment runner: spectrum caching, thermodynamic reports, variance and
// distance pipelines over config-driven metric families.
#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "mls/busemann.hpp"
#include "mls/config.hpp"
#include "mls/distances.hpp"
#include "mls/flow.hpp"
#include "mls/parallel.hpp"
#include "mls/report.hpp"
#include "mls/thermo.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Context {
  mls::ExperimentConfig cfg;
  mls::SurfaceGroup group = mls::SurfaceGroup::bolza();
  std::vector<mls::ConjClass> classes;
  int workers = 1;
  fs::path out;

  uint64_t config_hash() const { return cfg.hash(); }

  mls::ConformalMetric metric(const mls::MetricSpec& spec) const {
    mls::ConformalFactor phi(group, spec.bumps, spec.periodization_depth);
    return mls::ConformalMetric(group, phi, spec.eps);
  }
  mls::ConformalMetric metric_at(const mls::MetricSpec& spec, double eps) const {
    mls::ConformalFactor phi(group, spec.bumps, spec.periodization_depth);
    return mls::ConformalMetric(group, phi, eps);
  }

  mls::DoubleSpectrum spectrum(const mls::ConformalMetric& g) const {
    mls::SpectrumOptions so;
    so.workers = workers;
    so.cache_dir = (out / "cache").string();
    return mls::build_double_spectrum(g, classes, cfg.length_cap, so);
  }
};

void write_json(const fs::path& p, const json& j) {
  fs::create_directories(p.parent_path());
  std::ofstream f(p);
  f << j.dump(2) << "\n";
}

json report_header(const Context& ctx) {
  json j;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx", (unsigned long long)ctx.config_hash());
  j["config_hash"] = buf;
  j["seed"] = ctx.cfg.seed;
  j["tool"] = mls::kToolVersion;
  return j;
}

void load_classes(Context& ctx) {
  ctx.classes = mls::enumerate_classes(ctx.group, ctx.cfg.length_cap);
  fs::create_directories(ctx.out / "cache");
  char name[96];
  std::snprintf(name, sizeof(name), "base_spectrum_cap%.3f.csv", ctx.cfg.length_cap);
  fs::path p = ctx.out / "cache" / name;
  if (!fs::exists(p)) mls::write_spectrum_csv(p.string(), ctx.classes);
}

int run_spectrum(Context& ctx) {
  load_classes(ctx);
  auto g = ctx.metric(ctx.cfg.primary_metric());
  fs::path cache = ctx.out / "cache";
  bool had_cache = false;
  for (const auto& e : fs::directory_iterator(cache))
    if (e.path().filename().string().rfind("spectrum_", 0) == 0) had_cache = true;
  auto ds = ctx.spectrum(g);
  json j = report_header(ctx);
  j["classes"] = ds.entries.size();
  j["failed"] = ds.failed;
  j["length_cap"] = ds.length_cap;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx", (unsigned long long)ds.metric_hash);
  j["metric_hash"] = buf;
  j["n_policy"] = ds.n_policy;
  j["cache_hit"] = had_cache;
  write_json(ctx.out / "spectrum_report.json", j);
  std::fprintf(stderr, "spectrum: %zu classes (%zu failed), cache %s\n", ds.entries.size(),
               ds.failed, had_cache ? "hit" : "miss");
  return 0;
}

int run_thermo(Context& ctx) {
  load_classes(ctx);
  const auto& spec = ctx.cfg.primary_metric();
  auto g = ctx.metric(spec);
  auto ds = ctx.spectrum(g);
  auto base = mls::base_spectrum(ctx.classes, ctx.cfg.length_cap);
  const double T = ctx.cfg.window_T;

  auto rf = mls::rigidity_functionals(ds, T, &base);
  auto ent = mls::entropy(ds, T);
  auto sL = mls::stretch(ds, mls::EquilibriumMeasure::Liouville, T);
  auto sBM = mls::stretch(ds, mls::EquilibriumMeasure::BowenMargulis, T);
  auto inter = mls::intersection(ds, mls::PotentialCombo::unstable_jacobian(),
                                 mls::PotentialCombo::v_potential(), T);

  // Hessian cross-check: symmetric second difference of psi along +-eps vs the
  // flow variance of the first-order observable (the centered conformal
  // direction phi; equivalently Var(2 phi)/4).
  mls::ConformalFactor phi(ctx.group, spec.bumps, spec.periodization_depth);
  mls::ConformalMetric base_metric(ctx.group, mls::ConformalFactor{}, 0.0);
  double vol = mls::metric_volume(base_metric);
  double mean_phi =
      mls::domain_integral(ctx.group, [&](std::complex<double> z) { return phi(z); }) / vol;
  mls::Observable u = [&phi, mean_phi](std::complex<double> x, std::complex<double>) {
    return phi(x) - mean_phi;
  };
  mls::FlowOptions fo;
  fo.dt_max = ctx.cfg.dt_max;
  auto var = mls::variance(base_metric, u, ctx.cfg.flow_T, ctx.cfg.flow_n, ctx.cfg.seed, fo,
                           ctx.workers);

  auto ds_neg = ctx.spectrum(ctx.metric_at(spec, -spec.eps));
  auto rf_neg = mls::rigidity_functionals(ds_neg, T, &base);
  double second_diff = (rf.psi.value + rf_neg.psi.value) / (spec.eps * spec.eps);

  json j = report_header(ctx);
  j["psi"] = rf.psi.to_json();
  j["pressure_term"] = rf.pressure_term.to_json();
  j["stretch_term"] = rf.stretch_term.to_json();
  j["entropy"] = ent.to_json();
  j["stretch_liouville"] = sL.to_json();
  j["stretch_bowen_margulis"] = sBM.to_json();
  j["renormalized_intersection"] = inter.renormalized.to_json();
  j["hessian_check"] = {{"second_difference", second_diff},
                        {"variance_phi_centered", var.value},
                        {"variance_stat_error", var.stat_error},
                        {"ratio", var.value != 0 ? second_diff / var.value : 0.0}};
  write_json(ctx.out / "rigidity_report.json", j);
  std::fprintf(stderr, "thermo: psi=%.3e entropy=%.6f hessian ratio=%.3f\n", rf.psi.value,
               ent.value, var.value != 0 ? second_diff / var.value : 0.0);
  return 0;
}

int run_variance(Context& ctx) {
  load_classes(ctx);
  const auto& spec = ctx.cfg.primary_metric();
  mls::ConformalFactor phi(ctx.group, spec.bumps, spec.periodization_depth);
  mls::ConformalMetric base_metric(ctx.group, mls::ConformalFactor{}, 0.0);
  mls::PressureMetricOptions po;
  po.T = ctx.cfg.flow_T;
  po.n = ctx.cfg.flow_n;
  po.seed = ctx.cfg.seed;
  po.workers = ctx.workers;
  po.flow.dt_max = ctx.cfg.dt_max;
  auto rep = mls::pressure_metric_form(base_metric, phi, phi, po);
  json j = report_header(ctx);
  j["pressure_metric_form"] = rep.to_json();
  write_json(ctx.out / "variance_report.json", j);
  std::fprintf(stderr, "variance: G(h,h)=%.6e (+-%.1e)\n", rep.value, rep.stat_error);
  return 0;
}

int run_distance(Context& ctx) {
  load_classes(ctx);
  if (ctx.cfg.metrics.size() < 2)
    throw std::runtime_error("distance: need at least two metric specs");
  const double T = ctx.cfg.window_T;
  std::vector<mls::DoubleSpectrum> specs;
  std::vector<double> entropies;
  for (const auto& m : ctx.cfg.metrics) {
    auto g = ctx.metric(m);
    specs.push_back(ctx.spectrum(g));
    entropies.push_back(mls::entropy(specs.back(), T).value);
  }
  const std::size_t K = specs.size();
  json dmat = json::array(), tmat = json::array();
  for (std::size_t i = 0; i < K; ++i) {
    json drow = json::array(), trow = json::array();
    for (std::size_t k = 0; k < K; ++k) {
      auto pair = mls::join_spectra(specs[i], specs[k]);
      drow.push_back(mls::d_length(pair).value);
      trow.push_back(mls::d_thurston(pair, entropies[i], entropies[k]).value);
    }
    dmat.push_back(drow);
    tmat.push_back(trow);
  }
  // tail curves for the primary metric
  auto tails = mls::tail_ratios(specs[0]);
  {
    std::ofstream f(ctx.out / "tails.csv");
    f << "T,window_max,window_min\n";
    char buf[96];
    for (const auto& w : tails.windows) {
      std::snprintf(buf, sizeof(buf), "%.3f,%.17g,%.17g\n", w.T, std::expm1(w.log_max),
                    std::expm1(w.log_min));
      f << buf;
    }
  }
  {
    std::ofstream f(ctx.out / "distance_matrix.csv");
    f << "i,j,d_length,d_thurston\n";
    char buf[128];
    for (std::size_t i = 0; i < K; ++i)
      for (std::size_t k = 0; k < K; ++k) {
        std::snprintf(buf, sizeof(buf), "%zu,%zu,%.17g,%.17g\n", i, k,
                      dmat[i][k].get<double>(), tmat[i][k].get<double>());
        f << buf;
      }
  }
  mls::ConformalFactor phi(ctx.group, ctx.cfg.primary_metric().bumps,
                           ctx.cfg.primary_metric().periodization_depth);
  auto fin = mls::finsler_norm(ctx.classes, phi, T);
  json j = report_header(ctx);
  j["d_length"] = dmat;
  j["d_thurston"] = tmat;
  j["entropies"] = entropies;
  j["finsler_norm"] = fin.to_json();
  j["tail_plus"] = tails.tail_plus;
  j["tail_minus"] = tails.tail_minus;
  write_json(ctx.out / "distance_report.json", j);
  std::fprintf(stderr, "distance: %zu metrics, tails [%+.3e, %+.3e]\n", K, tails.tail_minus,
               tails.tail_plus);
  return 0;
}

int run_conjugacy(Context& ctx) {
  load_classes(ctx);
  const auto& spec = ctx.cfg.primary_metric();
  auto g = ctx.metric(spec);
  auto ds = ctx.spectrum(g);
  std::size_t n = std::min<std::size_t>(10, ctx.classes.size());
  json rows = json::array();
  std::vector<json> slots(n);
  mls::parallel_for(n, ctx.workers, [&](std::size_t i) {
    const auto& c = ctx.classes[i];
    double integral = mls::reparam_class_integral(g, c);
    double lg = 0;
    for (const auto& e : ds.entries)
      if (e.canon == c.canon) lg = e.lg;
    slots[i] = json{{"class", c.canon},
                    {"l0", c.l0},
                    {"lg_optimizer", lg},
                    {"reparam_integral", integral},
                    {"mismatch", integral - lg}};
  });
  for (auto& s : slots) rows.push_back(s);
  json j = report_header(ctx);
  j["conjugacy"] = rows;
  write_json(ctx.out / "conjugacy_report.json", j);
  std::fprintf(stderr, "conjugacy: checked %zu classes\n", n);
  return 0;
}

int run_verify(Context& ctx);

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"marked-length-spectrum laboratory"};
  std::string config_path, out_dir;
  int workers = 0;
  uint64_t seed = 0;
  bool seed_set = false;
  app.add_option("--config,-c", config_path, "experiment config (json)")->required();
  app.add_option("--workers,-j", workers, "worker threads (default: hardware)");
  app.add_option("--out,-o", out_dir, "output directory (overrides config)");
  auto* seed_opt = app.add_option("--seed,-s", seed, "seed override");

  std::string sub;
  app.add_option("subcommand", sub,
                 "one of: spectrum, thermo, variance, distance, conjugacy, verify")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) ? 2 : 2;
  }

  Context ctx;
  try {
    ctx.cfg = mls::ExperimentConfig::from_file(config_path);
    seed_set = seed_opt->count() > 0;
    if (seed_set) ctx.cfg.seed = seed;
    if (workers > 0) ctx.cfg.workers = workers;
    ctx.workers = ctx.cfg.workers > 0 ? ctx.cfg.workers
                                      : static_cast<int>(std::thread::hardware_concurrency());
    if (ctx.workers <= 0) ctx.workers = 1;
    ctx.out = out_dir.empty() ? fs::path(ctx.cfg.out_dir) : fs::path(out_dir);
    fs::create_directories(ctx.out);
  } catch (const std::exception& e) {
    std::cerr << nlohmann::json{{"error", e.what()}, {"kind", "config"}}.dump() << "\n";
    return 2;
  }

  try {
    if (sub == "spectrum") return run_spectrum(ctx);
    if (sub == "thermo") return run_thermo(ctx);
    if (sub == "variance") return run_variance(ctx);
    if (sub == "distance") return run_distance(ctx);
    if (sub == "conjugacy") return run_conjugacy(ctx);
    if (sub == "verify") return run_verify(ctx);
    std::cerr << nlohmann::json{{"error", "unknown subcommand: " + sub}, {"kind", "config"}}.dump()
              << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << nlohmann::json{{"error", e.what()}, {"kind", "compute"}}.dump() << "\n";
    return 1;
  }
}

namespace {

int run_verify(Context& ctx) {
  // Reduced self-check pipeline: every subcommand once, deterministic output.
  int rc = 0;
  rc |= run_spectrum(ctx);
  rc |= run_thermo(ctx);
  rc |= run_variance(ctx);
  if (ctx.cfg.metrics.size() >= 2) rc |= run_distance(ctx);
  rc |= run_conjugacy(ctx);
  json j = report_header(ctx);
  j["status"] = rc == 0 ? "ok" : "failed";
  write_json(ctx.out / "verify_report.json", j);
  return rc;
}

}  // namespace
