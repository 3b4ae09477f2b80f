// Length-ratio tails, the marked-length distance d_L, the Thurston asymmetric
// distance d_T, the Thurston Finsler norm and the stability report.
#pragma once

#include "mls/thermo.hpp"

namespace mls {

struct RatioWindow {
  double T = 0;        // window [T, T+1)
  double log_max = 0;  // extremes of log(lg / l0) over the window
  double log_min = 0;
  std::size_t count = 0;
};

struct RatioTail {
  std::vector<RatioWindow> windows;  // consecutive unit windows, T ascending
  double tail_plus = 0;              // last-window max of lg/l0 - 1
  double tail_minus = 0;             // last-window min of lg/l0 - 1
  double drift = 0;                  // window-to-window movement of the extremes
};

RatioTail tail_ratios(const DoubleSpectrum& ds);

// Two spectra joined over the same class set.
struct SpectrumPair {
  std::vector<std::string> canon;
  std::vector<double> l0;  // base lengths (class ordering key)
  std::vector<double> len1, len2;
};

SpectrumPair join_spectra(const DoubleSpectrum& a, const DoubleSpectrum& b);

// d_L(g1, g2): windowed sup of |log L1/L2|, symmetric by construction.
FunctionalReport d_length(const SpectrumPair& p);

// d_T(g1, g2): windowed sup of log L2/L1 after normalizing both metrics to
// unit topological entropy (the length columns rescale exactly).
FunctionalReport d_thurston(const SpectrumPair& p, double entropy1, double entropy2);

// Thurston Finsler norm of the conformal direction phi (tangent h = 2 phi g):
// 1/2 max over classes of the per-length class average of the centered 2 phi.
FunctionalReport finsler_norm(const std::vector<ConjClass>& classes, const ConformalFactor& phi,
                              double T);

struct StabilityReport {
  FunctionalReport psi, pressure_term, stretch_term;
  RatioTail tails;
  double rhs_pressure = 0;   // psi + C_n stretch_term^2 (C_n = 1 at desk scale)
  double rhs_tails = 0;      // |tail_plus| + |tail_minus|
  double lhs_proxy = 0;      // eps^2 * Var(2 phi centered)
  double band = 0;           // truncation band from window drifts
  nlohmann::json to_json() const;
};

StabilityReport stability_report(const DoubleSpectrum& ds, const DoubleSpectrum& base, double T,
                                 double eps, double variance_2phi);

}  // namespace mls
