#include "mls/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mls {

namespace {

// Oriented classes come in inverse pairs with equal integrands; the spectrum
// stores one representative per pair.
constexpr double kOrientationMultiplicity = 2.0;

struct WindowSum {
  double log_sum = -1e300;  // log( 2 sum_window l0 e^{int f} )
  std::size_t count = 0;
};

// log-sum-exp over the window [T, T+1) of log(l0) + int_c f.
WindowSum window_log_sum(const DoubleSpectrum& ds, const PotentialCombo& f, double T) {
  WindowSum ws;
  double mx = -1e300;
  for (const auto& e : ds.entries) {
    if (!e.ok || e.l0 < T || e.l0 >= T + 1.0) continue;
    mx = std::max(mx, f.class_integral(e.l0, e.lg));
    ++ws.count;
  }
  if (ws.count == 0) return ws;
  double s = 0.0;
  for (const auto& e : ds.entries) {
    if (!e.ok || e.l0 < T || e.l0 >= T + 1.0) continue;
    s += e.l0 * std::exp(f.class_integral(e.l0, e.lg) - mx);
  }
  ws.log_sum = mx + std::log(kOrientationMultiplicity * s);
  return ws;
}

double pressure_value(const DoubleSpectrum& ds, const PotentialCombo& f, double T) {
  WindowSum ws = window_log_sum(ds, f, T);
  if (ws.count == 0) throw std::runtime_error("pressure: empty window");
  return ws.log_sum / T;
}

uint64_t spectrum_hash(const DoubleSpectrum& ds) {
  uint64_t h = 1469598103934665603ull;
  auto mix = [&h](double x) {
    const unsigned char* p = reinterpret_cast<const unsigned char*>(&x);
    for (std::size_t i = 0; i < sizeof(x); ++i) {
      h ^= p[i];
      h *= 1099511628211ull;
    }
  };
  mix(static_cast<double>(ds.entries.size()));
  mix(ds.length_cap);
  mix(static_cast<double>(ds.metric_hash));
  return h;
}

}  // namespace

FunctionalReport pressure(const DoubleSpectrum& ds, const PotentialCombo& f, double T) {
  if (ds.max_l0() + 1e-9 < T + 1.0)
    throw std::invalid_argument("pressure: spectrum does not cover the window");
  FunctionalReport rep;
  rep.name = "pressure";
  rep.T = T;
  rep.inputs_hash = spectrum_hash(ds);
  WindowSum ws = window_log_sum(ds, f, T);
  if (ws.count == 0) throw std::runtime_error("pressure: empty window");
  rep.value = ws.log_sum / T;
  rep.n = static_cast<long>(ws.count);
  double prev = pressure_value(ds, f, T - 1.0);
  rep.extras["value_prev_window"] = prev;
  rep.extras["window_drift"] = rep.value - prev;
  rep.stat_error = std::abs(rep.value - prev);
  if (rep.value < 0 && rep.value < -1e-6)
    rep.notes = "negative-pressure regime: same weighted-sum estimator used";
  return rep;
}

FunctionalReport entropy(const DoubleSpectrum& ds, double T, double lo, double hi) {
  FunctionalReport rep;
  rep.name = "entropy";
  rep.T = T;
  rep.inputs_hash = spectrum_hash(ds);
  auto root = [&](double Tw) {
    double a = lo, b = hi;
    auto P = [&](double s) { return pressure_value(ds, PotentialCombo::reparam().scaled(-s), Tw); };
    double Pa = P(a), Pb = P(b);
    if (Pa < 0 || Pb > 0) throw std::runtime_error("entropy: bracket failure");
    for (int it = 0; it < 60; ++it) {
      double m = 0.5 * (a + b);
      if (P(m) > 0) a = m;
      else b = m;
      if (b - a < 1e-7) break;
    }
    return 0.5 * (a + b);
  };
  double h = root(T);
  double hprev = root(T - 1.0);
  rep.value = h;
  rep.extras["value_prev_window"] = hprev;
  rep.stat_error = std::max(1e-6, std::abs(h - hprev));
  return rep;
}

FunctionalReport equilibrium_average(const DoubleSpectrum& ds, const PotentialCombo& f,
                                     const std::vector<double>& u_integrals, double T) {
  if (u_integrals.size() != ds.entries.size())
    throw std::invalid_argument("equilibrium_average: per-class integrals size mismatch");
  FunctionalReport rep;
  rep.name = "equilibrium_average";
  rep.T = T;
  rep.inputs_hash = spectrum_hash(ds);
  auto value_at = [&](double Tw, std::size_t* count) {
    double mx = -1e300;
    for (const auto& e : ds.entries) {
      if (!e.ok || e.l0 < Tw || e.l0 >= Tw + 1.0) continue;
      mx = std::max(mx, f.class_integral(e.l0, e.lg));
    }
    double num = 0.0, den = 0.0;
    std::size_t cnt = 0;
    for (std::size_t i = 0; i < ds.entries.size(); ++i) {
      const auto& e = ds.entries[i];
      if (!e.ok || e.l0 < Tw || e.l0 >= Tw + 1.0) continue;
      double w = std::exp(f.class_integral(e.l0, e.lg) - mx);
      num += w * u_integrals[i];
      den += w * e.l0;
      ++cnt;
    }
    if (cnt == 0) throw std::runtime_error("equilibrium_average: empty window");
    if (count) *count = cnt;
    return num / den;
  };
  std::size_t cnt = 0;
  rep.value = value_at(T, &cnt);
  rep.n = static_cast<long>(cnt);
  double prev = value_at(T - 1.0, nullptr);
  rep.extras["value_prev_window"] = prev;
  rep.stat_error = std::abs(rep.value - prev);
  return rep;
}

FunctionalReport stretch(const DoubleSpectrum& ds, const PotentialCombo& f, double T) {
  std::vector<double> lg(ds.entries.size());
  for (std::size_t i = 0; i < ds.entries.size(); ++i) lg[i] = ds.entries[i].lg;
  FunctionalReport rep = equilibrium_average(ds, f, lg, T);
  rep.name = "stretch";
  return rep;
}

FunctionalReport stretch(const DoubleSpectrum& ds, EquilibriumMeasure mu, double T) {
  PotentialCombo f = (mu == EquilibriumMeasure::Liouville)
                         ? PotentialCombo::unstable_jacobian().scaled(-1.0)
                         : PotentialCombo{};
  FunctionalReport rep = stretch(ds, f, T);
  rep.notes = (mu == EquilibriumMeasure::Liouville) ? "measure=liouville" : "measure=bowen-margulis";
  return rep;
}

RigidityFunctionals rigidity_functionals(const DoubleSpectrum& ds, double T,
                                         const DoubleSpectrum* base) {
  RigidityFunctionals out;
  PotentialCombo neg_v = PotentialCombo::v_potential().scaled(-1.0);
  out.pressure_term = pressure(ds, neg_v, T);
  out.pressure_term.name = "pressure_term";

  out.stretch_term = stretch(ds, EquilibriumMeasure::Liouville, T);
  out.stretch_term.name = "stretch_term";
  out.stretch_term.value -= 1.0;
  out.stretch_term.extras["value_prev_window"] -= 1.0;

  double offset = 0.0, offset_prev = 0.0;
  if (base != nullptr) {
    FunctionalReport f0 = pressure(*base, neg_v, T);
    offset = f0.value;
    offset_prev = f0.extras["value_prev_window"];
  }
  out.psi.name = "rigidity_psi";
  out.psi.T = T;
  out.psi.inputs_hash = out.pressure_term.inputs_hash;
  out.psi.value = out.pressure_term.value + out.stretch_term.value - offset;
  double prev = out.pressure_term.extras["value_prev_window"] +
                out.stretch_term.extras["value_prev_window"] - offset_prev;
  out.psi.extras["value_prev_window"] = prev;
  out.psi.extras["finite_window_offset"] = offset;
  out.psi.stat_error = std::abs(out.psi.value - prev);
  if (base != nullptr) out.psi.notes = "finite-window offset at the base metric subtracted";
  return out;
}

IntersectionReport intersection(const DoubleSpectrum& ds, const PotentialCombo& f,
                                const PotentialCombo& fprime, double T) {
  for (const auto& e : ds.entries) {
    if (!e.ok) continue;
    if (f.class_integral(e.l0, e.lg) <= 0)
      throw std::invalid_argument("intersection: f must have positive class integrals");
  }
  auto root_of = [&](const PotentialCombo& pot) {
    double a = 0.25, b = 4.0;
    auto P = [&](double s) { return pressure_value(ds, pot.scaled(-s), T); };
    if (P(a) < 0 || P(b) > 0) throw std::runtime_error("intersection: root bracket failure");
    for (int it = 0; it < 60; ++it) {
      double m = 0.5 * (a + b);
      if (P(m) > 0) a = m;
      else b = m;
      if (b - a < 1e-7) break;
    }
    return 0.5 * (a + b);
  };
  IntersectionReport out;
  out.h_f = root_of(f);
  out.h_fprime = root_of(fprime);

  std::vector<double> fp_int(ds.entries.size());
  for (std::size_t i = 0; i < ds.entries.size(); ++i)
    fp_int[i] = fprime.class_integral(ds.entries[i].l0, ds.entries[i].lg);
  // weights e^{-h_f int f}; normalize by int f instead of l0
  PotentialCombo wpot = f.scaled(-out.h_f);
  auto value_at = [&](double Tw) {
    double mx = -1e300;
    for (const auto& e : ds.entries) {
      if (!e.ok || e.l0 < Tw || e.l0 >= Tw + 1.0) continue;
      mx = std::max(mx, wpot.class_integral(e.l0, e.lg));
    }
    double num = 0.0, den = 0.0;
    std::size_t cnt = 0;
    for (std::size_t i = 0; i < ds.entries.size(); ++i) {
      const auto& e = ds.entries[i];
      if (!e.ok || e.l0 < Tw || e.l0 >= Tw + 1.0) continue;
      double w = std::exp(wpot.class_integral(e.l0, e.lg) - mx);
      num += w * fp_int[i];
      den += w * f.class_integral(e.l0, e.lg);
      ++cnt;
    }
    if (cnt == 0) throw std::runtime_error("intersection: empty window");
    return num / den;
  };
  out.intersection.name = "intersection";
  out.intersection.T = T;
  out.intersection.inputs_hash = spectrum_hash(ds);
  out.intersection.value = value_at(T);
  double prev = value_at(T - 1.0);
  out.intersection.extras["value_prev_window"] = prev;
  out.intersection.stat_error = std::abs(out.intersection.value - prev);

  out.renormalized = out.intersection;
  out.renormalized.name = "renormalized_intersection";
  out.renormalized.value *= out.h_fprime / out.h_f;
  out.renormalized.extras["value_prev_window"] = prev * out.h_fprime / out.h_f;
  out.renormalized.extras["h_f"] = out.h_f;
  out.renormalized.extras["h_fprime"] = out.h_fprime;
  out.renormalized.stat_error =
      std::abs(out.renormalized.value - out.renormalized.extras["value_prev_window"]) + 2e-6;
  return out;
}

FunctionalReport pressure_metric_form(const ConformalMetric& base, const ConformalFactor& phi1,
                                      const ConformalFactor& phi2,
                                      const PressureMetricOptions& opts) {
  // center u_i = 2 phi_i to Liouville mean zero (area averages)
  double vol = metric_volume(base);
  double m1 = phi1.empty() ? 0.0
                           : domain_integral(base.group(),
                                             [&](std::complex<double> z) { return phi1(z); }) /
                                 vol;
  double m2 = phi2.empty() ? 0.0
                           : domain_integral(base.group(),
                                             [&](std::complex<double> z) { return phi2(z); }) /
                                 vol;
  Observable up = [&phi1, &phi2, m1, m2](std::complex<double> x, std::complex<double>) {
    double a = phi1.empty() ? 0.0 : phi1(x);
    double b = phi2.empty() ? 0.0 : phi2(x);
    return 2.0 * (a - m1) + 2.0 * (b - m2);
  };
  Observable um = [&phi1, &phi2, m1, m2](std::complex<double> x, std::complex<double>) {
    double a = phi1.empty() ? 0.0 : phi1(x);
    double b = phi2.empty() ? 0.0 : phi2(x);
    return 2.0 * (a - m1) - 2.0 * (b - m2);
  };
  VarianceReport vp = variance(base, up, opts.T, opts.n, opts.seed, opts.flow, opts.workers);
  VarianceReport vm = variance(base, um, opts.T, opts.n, opts.seed, opts.flow, opts.workers);
  FunctionalReport rep;
  rep.name = "pressure_metric_form";
  rep.value = 0.25 * (vp.value - vm.value);
  rep.stat_error = 0.25 * (vp.stat_error + vm.stat_error);
  rep.T = opts.T;
  rep.n = static_cast<long>(opts.n);
  rep.seed = opts.seed;
  rep.extras["var_sum"] = vp.value;
  rep.extras["var_diff"] = vm.value;
  rep.extras["var_sum_half_T"] = vp.value_half_T;
  rep.extras["var_diff_half_T"] = vm.value_half_T;
  return rep;
}

}  // namespace mls
