// Closed geodesics of the perturbed metric by equivariant curve shortening,
// the double length spectrum (l0, lg) and X-ray integrals along exact axes.
#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "mls/conformal.hpp"

namespace mls {

struct CurveOptions {
  int nodes = 0;                 // 0: use the node policy max(64, ceil(16 l0))
  double nodes_per_unit = 16.0;
  int min_nodes = 64;
  double grad_tol = 1e-10;       // max preconditioned gradient component
  int max_iter = 4000;
};

struct DiscreteCurve {
  std::vector<std::complex<double>> nodes;  // x_0 .. x_{N-1}; x_N = closure * x_0
  DiskMapd closure;                          // deck matrix of the class (identity for pinned)
};

struct ClosedLengthResult {
  double length = 0;
  double residual = 0;   // max gradient component at exit (hyperbolic scale)
  int iters = 0;
  bool converged = false;
  DiscreteCurve curve;
};

// Length of the closed g-geodesic in the class of c (equivariant minimization
// seeded with the axis of the deck matrix).
ClosedLengthResult closed_length(const ConformalMetric& g, const ConjClass& c,
                                 const CurveOptions& opts = {});

// g-distance between two interior points (pinned-endpoint shortening). An
// optional warm-start node array (matching endpoints loosely) skips the
// geodesic seeding.
ClosedLengthResult two_point_length(const ConformalMetric& g, std::complex<double> a,
                                    std::complex<double> b, const CurveOptions& opts = {},
                                    const std::vector<std::complex<double>>* warm = nullptr);

struct SpectrumEntry {
  std::string canon;
  double l0 = 0;
  double lg = 0;
  double residual = 0;
  bool ok = true;
};

struct DoubleSpectrum {
  std::vector<SpectrumEntry> entries;  // sorted by (l0, canon)
  double length_cap = 0;
  uint64_t metric_hash = 0;
  std::string n_policy;
  std::size_t failed = 0;

  double max_l0() const { return entries.empty() ? 0.0 : entries.back().l0; }
};

struct SpectrumOptions {
  CurveOptions curve;
  int workers = 1;
  std::string cache_dir;  // empty: no caching
};

DoubleSpectrum build_double_spectrum(const ConformalMetric& g,
                                     const std::vector<ConjClass>& classes, double length_cap,
                                     const SpectrumOptions& opts = {});

// The trivial spectrum of the base metric itself (lg = l0 exactly).
DoubleSpectrum base_spectrum(const std::vector<ConjClass>& classes, double length_cap);

void write_double_spectrum_csv(const std::string& path, const DoubleSpectrum& ds);
std::optional<DoubleSpectrum> read_double_spectrum_csv(const std::string& path);

// Integral of f along the axis of the class over one period (X-ray transform
// of a function, times l0).
double xray_integral(const ConformalFactor& phi, const ConjClass& c, double panel = 0.25);
double xray_integral(const std::function<double(std::complex<double>)>& f, const ConjClass& c,
                     double panel = 0.25);

// Point at arclength s along the axis of the class (disk coordinates).
std::complex<double> class_axis_point(const ConjClass& c, double s);

}  // namespace mls
