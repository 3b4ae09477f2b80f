// Geodesic flow on the unit tangent bundle of the (possibly perturbed) disk
// metric, with deck reduction, Liouville sampling and variance estimators.
#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "mls/conformal.hpp"
#include "mls/rng.hpp"

namespace mls {

struct PhasePoint {
  std::complex<double> x{0, 0};
  std::complex<double> v{1, 0};  // euclidean components; |v|_g = 1
};

PhasePoint make_phase_point(const ConformalMetric& g, std::complex<double> x,
                            std::complex<double> dir);
PhasePoint flip(const PhasePoint& z);

using Observable = std::function<double(std::complex<double>, std::complex<double>)>;

struct FlowOptions {
  double dt_max = 0.05;
  double rtol = 1e-9;
  double atol = 1e-9;
  double sample_stride = 0.0;  // > 0: store samples at this stride
};

struct OrbitSegment {
  PhasePoint end;
  Word word;             // original point = word * (reduced trajectory)
  double total_time = 0;
  std::vector<double> obs_integrals;           // one per observable
  std::vector<std::pair<double, PhasePoint>> samples;
  double max_speed_drift = 0;  // max ||v|_g - 1| seen before renormalization
  std::size_t steps = 0;
};

OrbitSegment integrate(const ConformalMetric& g, const PhasePoint& z, double T,
                       const FlowOptions& opts = {},
                       const std::vector<Observable>& obs = {});

std::vector<PhasePoint> sample_liouville(const SurfaceGroup& group, std::size_t n, uint64_t seed);

double birkhoff_average(const ConformalMetric& g, const Observable& u, const PhasePoint& z,
                        double T, const FlowOptions& opts = {});

struct VarianceReport {
  double value = 0;
  double stat_error = 0;
  double value_half_T = 0;  // overlapping-window estimate at T/2
  double mean = 0;          // ensemble mean of u (subtracted internally)
  double T = 0;
  std::size_t n = 0;
  uint64_t seed = 0;
};

// Asymptotic variance of the Birkhoff integral of u under the Liouville
// measure of the base metric: (1/n) sum_i S_i(T)^2 / T with centered S_i.
VarianceReport variance(const ConformalMetric& g, const Observable& u, double T, std::size_t n,
                        uint64_t seed, const FlowOptions& opts = {}, int workers = 1);

// Largest Lyapunov exponent along the orbit of z, from the Jacobi equation
// J'' + K(x(t)) J = 0 driven by the integrated flow.
double lyapunov_top(const ConformalMetric& g, const PhasePoint& z, double T,
                    const FlowOptions& opts = {});

void write_orbit_csv(const std::string& path, const OrbitSegment& seg);

}  // namespace mls
