// Conformal perturbations g = e^{2*eps*phi} g_hyp of the hyperbolic disk
// metric, with group-periodized analytic bump profiles.
#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "mls/fuchsian.hpp"

namespace mls {

struct Bump {
  std::complex<double> center;  // inside the fundamental domain
  double width = 0.4;           // in hyperbolic distance
  double amplitude = 1.0;
};

// Gamma-periodized sum of analytic bumps. A bump contributes
// amplitude * exp(-d_hyp(z, center)^2 / (2 width^2)); the sum runs over the
// orbit of word length <= periodization_depth and evaluation reduces the
// argument into the fundamental domain first, so the result is invariant on
// the nose and the truncation enters only through the profile tails.
class ConformalFactor {
 public:
  ConformalFactor() = default;
  ConformalFactor(const SurfaceGroup& group, std::vector<Bump> bumps, int periodization_depth = 2);

  double operator()(std::complex<double> z) const;
  // Euclidean gradient encoded as dx + i dy, and euclidean Laplacian.
  std::complex<double> gradient(std::complex<double> z) const;
  double laplacian(std::complex<double> z) const;
  // Hyperbolic Laplacian (base metric): (1-|z|^2)^2/4 * euclidean Laplacian.
  double hyp_laplacian(std::complex<double> z) const;

  double tail_bound() const { return tail_bound_; }
  int depth() const { return depth_; }
  const std::vector<Bump>& bumps() const { return bumps_; }
  const SurfaceGroup& group() const { return *group_; }
  bool empty() const { return bumps_.empty(); }

  // sup |phi| over a verification grid (used by conformal length bounds)
  double grid_max_abs() const { return grid_max_abs_; }

 private:
  const SurfaceGroup* group_ = nullptr;
  std::vector<Bump> bumps_;
  int depth_ = 2;
  std::vector<DiskMapd> orbit_;        // word length <= depth
  std::vector<DiskMapd> shell_;        // word length == depth + 1 (tail estimate)
  double tail_bound_ = 0.0;
  double grid_max_abs_ = 0.0;

  struct Eval {
    double value = 0;
    std::complex<double> grad{0, 0};
    double lap = 0;
  };
  Eval eval(std::complex<double> z, bool derivs) const;
};

class ConformalMetric {
 public:
  ConformalMetric(const SurfaceGroup& group, ConformalFactor phi, double eps);

  const SurfaceGroup& group() const { return *group_; }
  const ConformalFactor& phi() const { return phi_; }
  double eps() const { return eps_; }

  // ds = lambda |dz|; lambda = e^{eps phi} * 2/(1-|z|^2).
  double lambda(std::complex<double> z) const;
  // gradient of log(lambda), euclidean encoding
  std::complex<double> grad_log_lambda(std::complex<double> z) const;
  double gaussian_curvature(std::complex<double> z) const;

  double min_grid_curvature() const { return min_grid_K_; }
  double max_grid_curvature() const { return max_grid_K_; }
  // conformal scale s -> first s where the grid curvature hits 0 (inf if none)
  double curvature_breaking_eps() const { return eps_break_; }

  uint64_t hash() const { return hash_; }

 private:
  const SurfaceGroup* group_;
  ConformalFactor phi_;
  double eps_ = 0.0;
  double min_grid_K_ = -1.0, max_grid_K_ = -1.0;
  double eps_break_ = 0.0;
  uint64_t hash_ = 0;
};

// Integral of f against the hyperbolic area element over the fundamental
// octagon (per-sector Gauss-Legendre; exact area of the domain is 4*pi).
double domain_integral(const SurfaceGroup& group, const std::function<double(std::complex<double>)>& f,
                       int n_radial = 48, int n_angular = 48);

// Riemannian volume of the quotient surface for the perturbed metric.
double metric_volume(const ConformalMetric& g, int n_radial = 48, int n_angular = 48);

}  // namespace mls
