#include "mls/distances.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mls {

RatioTail tail_ratios(const DoubleSpectrum& ds) {
  if (ds.entries.empty()) throw std::invalid_argument("tail_ratios: empty spectrum");
  RatioTail out;
  double Tmax = ds.max_l0();
  for (double T = std::floor(ds.entries.front().l0); T < Tmax; T += 1.0) {
    RatioWindow w;
    w.T = T;
    double mx = -1e300, mn = 1e300;
    for (const auto& e : ds.entries) {
      if (!e.ok || e.l0 < T || e.l0 >= T + 1.0) continue;
      double lr = std::log(e.lg / e.l0);
      mx = std::max(mx, lr);
      mn = std::min(mn, lr);
      ++w.count;
    }
    if (w.count == 0) continue;
    w.log_max = mx;
    w.log_min = mn;
    out.windows.push_back(w);
  }
  if (out.windows.empty()) throw std::runtime_error("tail_ratios: no populated window");
  const RatioWindow& last = out.windows.back();
  out.tail_plus = std::expm1(last.log_max);
  out.tail_minus = std::expm1(last.log_min);
  if (out.windows.size() >= 2) {
    const RatioWindow& prev = out.windows[out.windows.size() - 2];
    out.drift = std::max(std::abs(std::expm1(prev.log_max) - out.tail_plus),
                         std::abs(std::expm1(prev.log_min) - out.tail_minus));
  }
  return out;
}

SpectrumPair join_spectra(const DoubleSpectrum& a, const DoubleSpectrum& b) {
  if (a.entries.size() != b.entries.size())
    throw std::invalid_argument("join_spectra: class sets differ in size");
  SpectrumPair p;
  p.canon.reserve(a.entries.size());
  for (std::size_t i = 0; i < a.entries.size(); ++i) {
    const auto& ea = a.entries[i];
    const auto& eb = b.entries[i];
    if (ea.canon != eb.canon) throw std::invalid_argument("join_spectra: class sets differ");
    if (!ea.ok || !eb.ok) continue;
    p.canon.push_back(ea.canon);
    p.l0.push_back(ea.l0);
    p.len1.push_back(ea.lg);
    p.len2.push_back(eb.lg);
  }
  return p;
}

namespace {

// Windowed sup of a per-class quantity ordered by l0; returns the last-window
// sup and the previous-window sup for the drift bar.
std::pair<double, double> windowed_sup(const std::vector<double>& l0,
                                       const std::vector<double>& q) {
  if (l0.empty()) throw std::invalid_argument("windowed_sup: empty data");
  double Tmax = *std::max_element(l0.begin(), l0.end());
  double cur = -1e300, prev = -1e300;
  double Tlast = std::floor(Tmax - 1e-12);
  for (std::size_t i = 0; i < l0.size(); ++i) {
    if (l0[i] >= Tlast) cur = std::max(cur, q[i]);
    else if (l0[i] >= Tlast - 1.0) prev = std::max(prev, q[i]);
  }
  if (cur == -1e300) throw std::runtime_error("windowed_sup: empty last window");
  return {cur, prev};
}

}  // namespace

FunctionalReport d_length(const SpectrumPair& p) {
  std::vector<double> q(p.canon.size());
  for (std::size_t i = 0; i < q.size(); ++i)
    q[i] = std::abs(std::log(p.len1[i]) - std::log(p.len2[i]));
  auto [cur, prev] = windowed_sup(p.l0, q);
  FunctionalReport rep;
  rep.name = "d_length";
  rep.value = cur;
  rep.T = std::floor(*std::max_element(p.l0.begin(), p.l0.end()) - 1e-12);
  rep.extras["value_prev_window"] = prev;
  rep.stat_error = prev > -1e299 ? std::abs(cur - prev) : 0.0;
  rep.n = static_cast<long>(p.canon.size());
  return rep;
}

FunctionalReport d_thurston(const SpectrumPair& p, double entropy1, double entropy2) {
  if (!(entropy1 > 0) || !(entropy2 > 0))
    throw std::invalid_argument("d_thurston: entropy normalization failure");
  std::vector<double> q(p.canon.size());
  for (std::size_t i = 0; i < q.size(); ++i)
    q[i] = std::log(entropy2 * p.len2[i]) - std::log(entropy1 * p.len1[i]);
  auto [cur, prev] = windowed_sup(p.l0, q);
  FunctionalReport rep;
  rep.name = "d_thurston";
  rep.value = cur;
  rep.T = std::floor(*std::max_element(p.l0.begin(), p.l0.end()) - 1e-12);
  rep.extras["value_prev_window"] = prev;
  rep.extras["entropy1"] = entropy1;
  rep.extras["entropy2"] = entropy2;
  rep.stat_error = prev > -1e299 ? std::abs(cur - prev) : 0.0;
  rep.n = static_cast<long>(p.canon.size());
  return rep;
}

FunctionalReport finsler_norm(const std::vector<ConjClass>& classes, const ConformalFactor& phi,
                              double T) {
  if (classes.empty()) throw std::invalid_argument("finsler_norm: no classes");
  // per-class averages of phi along the exact axes
  std::vector<double> avg(classes.size());
  for (std::size_t i = 0; i < classes.size(); ++i)
    avg[i] = phi.empty() ? 0.0 : xray_integral(phi, classes[i]) / classes[i].l0;

  // Bowen-Margulis mean of pi2* h = 2 phi over the window [T, T+1)
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < classes.size(); ++i) {
    double l0 = classes[i].l0;
    if (l0 < T || l0 >= T + 1.0) continue;
    num += avg[i] * l0;
    den += l0;
  }
  if (den == 0.0) throw std::runtime_error("finsler_norm: empty window");
  double bm_mean = num / den;

  double best = -1e300;
  std::size_t arg = 0;
  for (std::size_t i = 0; i < classes.size(); ++i) {
    double v = avg[i] - bm_mean;
    if (v > best) {
      best = v;
      arg = i;
    }
  }
  FunctionalReport rep;
  rep.name = "finsler_norm";
  // 1/2 sup over classes of the class average of (2 phi - BM mean)
  rep.value = best;
  rep.T = T;
  rep.n = static_cast<long>(classes.size());
  rep.extras["bm_mean_phi"] = bm_mean;
  rep.extras["argmax_index"] = static_cast<double>(arg);
  rep.notes = "argmax class: " + classes[arg].canon;
  return rep;
}

nlohmann::json StabilityReport::to_json() const {
  nlohmann::json j;
  j["psi"] = psi.to_json();
  j["pressure_term"] = pressure_term.to_json();
  j["stretch_term"] = stretch_term.to_json();
  j["rhs_pressure"] = rhs_pressure;
  j["rhs_tails"] = rhs_tails;
  j["lhs_proxy"] = lhs_proxy;
  j["band"] = band;
  nlohmann::json w = nlohmann::json::array();
  for (const auto& win : tails.windows)
    w.push_back({{"T", win.T}, {"log_max", win.log_max}, {"log_min", win.log_min},
                 {"count", win.count}});
  j["tail_windows"] = w;
  j["tail_plus"] = tails.tail_plus;
  j["tail_minus"] = tails.tail_minus;
  return j;
}

StabilityReport stability_report(const DoubleSpectrum& ds, const DoubleSpectrum& base, double T,
                                 double eps, double variance_2phi) {
  StabilityReport out;
  RigidityFunctionals rf = rigidity_functionals(ds, T, &base);
  out.psi = rf.psi;
  out.pressure_term = rf.pressure_term;
  out.stretch_term = rf.stretch_term;
  out.tails = tail_ratios(ds);
  out.rhs_pressure = rf.psi.value + rf.stretch_term.value * rf.stretch_term.value;
  out.rhs_tails = std::abs(out.tails.tail_plus) + std::abs(out.tails.tail_minus);
  out.lhs_proxy = eps * eps * variance_2phi;
  out.band = rf.psi.stat_error + rf.stretch_term.stat_error;
  return out;
}

}  // namespace mls
