// Thermodynamic estimators over the double length spectrum: weighted Bowen
// window sums realize pressure, entropy, equilibrium averages, the geodesic
// stretch, the rigidity functional and intersection numbers.
#pragma once

#include <optional>

#include "mls/flow.hpp"
#include "mls/geodesics.hpp"
#include "mls/report.hpp"

namespace mls {

// Linear combination alpha * 1 + beta * a_g + gamma * J^u over the unit
// tangent bundle. On the constant-curvature base J^u = 1 identically, so the
// class integral is (alpha + gamma) * l0 + beta * lg.
struct PotentialCombo {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;

  double class_integral(double l0, double lg) const { return (alpha + gamma) * l0 + beta * lg; }
  PotentialCombo scaled(double s) const { return {s * alpha, s * beta, s * gamma}; }

  static PotentialCombo one() { return {1, 0, 0}; }
  static PotentialCombo reparam() { return {0, 1, 0}; }          // a_g
  static PotentialCombo unstable_jacobian() { return {0, 0, 1}; }  // J^u
  // V_g = J^u + a_g - 1
  static PotentialCombo v_potential() { return {-1, 1, 1}; }
};

enum class EquilibriumMeasure { Liouville, BowenMargulis };

// Pressure from the weighted orbit sum over the window l0 in [T, T+1):
//   P(f) ~ (1/T) log sum_c L0(c) e^{int_c f}
// (the L0 weight matches the normalizer of the equilibrium-state sums and
// removes the log(T)/T bias of the bare sum at P = 0). The previous window
// value is reported as a truncation diagnostic.
FunctionalReport pressure(const DoubleSpectrum& ds, const PotentialCombo& f, double T);

// Root of s -> P(-s a_g): the topological entropy of the perturbed metric.
FunctionalReport entropy(const DoubleSpectrum& ds, double T, double lo = 0.5, double hi = 2.0);

// Equilibrium-state average of u, with per-class integrals supplied by the
// caller: sum w_c u_c / sum w_c l0, w_c = e^{int_c f}.
FunctionalReport equilibrium_average(const DoubleSpectrum& ds, const PotentialCombo& f,
                                     const std::vector<double>& u_integrals, double T);

// Geodesic stretch I_mu(g0, g): equilibrium average of a_g.
FunctionalReport stretch(const DoubleSpectrum& ds, EquilibriumMeasure mu, double T);
FunctionalReport stretch(const DoubleSpectrum& ds, const PotentialCombo& f, double T);

struct RigidityFunctionals {
  FunctionalReport psi;              // pressure_term + stretch_term
  FunctionalReport pressure_term;    // F = P(-V_g)
  FunctionalReport stretch_term;     // Phi = I_Liouville - 1
};

// psi_raw uses the window sums directly; when a base spectrum is supplied the
// finite-window offset psi_hat(g0) is subtracted (it vanishes as T -> inf).
RigidityFunctionals rigidity_functionals(const DoubleSpectrum& ds, double T,
                                         const DoubleSpectrum* base = nullptr);

struct IntersectionReport {
  FunctionalReport intersection;              // I(f, f')
  FunctionalReport renormalized;              // J(f, f') = h_{f'}/h_f * I
  double h_f = 0.0, h_fprime = 0.0;
};

// Intersection numbers for positive potentials (class integrals must be > 0).
IntersectionReport intersection(const DoubleSpectrum& ds, const PotentialCombo& f,
                                const PotentialCombo& fprime, double T);

// Pressure-metric quadratic form by polarization of the flow variance:
// G(h1, h2) = 1/4 (Var(u1 + u2) - Var(u1 - u2)), u_i = 2 phi_i centered.
struct PressureMetricOptions {
  double T = 200.0;
  std::size_t n = 2000;
  uint64_t seed = 1;
  int workers = 1;
  FlowOptions flow;
};

FunctionalReport pressure_metric_form(const ConformalMetric& base, const ConformalFactor& phi1,
                                      const ConformalFactor& phi2,
                                      const PressureMetricOptions& opts);

}  // namespace mls
