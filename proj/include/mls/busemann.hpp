// Numerical Busemann functions of the perturbed metric and the time
// reparametrization relating the base and perturbed geodesic flows.
#pragma once

#include "mls/flow.hpp"
#include "mls/geodesics.hpp"

namespace mls {

struct BoundaryPoint {
  double angle = 0.0;  // ideal boundary point e^{i angle}

  std::complex<double> point() const { return std::polar(1.0, angle); }
  static BoundaryPoint from_point(std::complex<double> xi) {
    double a = std::arg(xi);
    if (a < 0) a += 2.0 * 3.14159265358979323846;
    return {a};
  }
};

struct BusemannOptions {
  double t_trunc = 20.0;
  CurveOptions curve;  // two-point solver controls
};

struct BusemannValue {
  double value = 0;       // b_xi(x0, x) at the truncation
  double value_half = 0;  // same at t_trunc / 2 (convergence diagnostic)
};

// b_xi(x0, x) = d_g(x0, z_T) - d_g(x, z_T), z_T on the base-metric ray from x0
// toward xi at distance t_trunc.
BusemannValue busemann(const ConformalMetric& g, std::complex<double> x0, std::complex<double> x,
                       const BoundaryPoint& xi, const BusemannOptions& opts = {});

// Closed form for the unperturbed disk metric (test oracle lives here so both
// sides of the comparison are visible together).
double busemann_hyperbolic(std::complex<double> x0, std::complex<double> x,
                           const BoundaryPoint& xi);

// Time-reparametrization coefficient a_g(z) = g(grad_g b_{z+}, v): the
// Busemann gradient is taken by central differences in normal coordinates.
double reparam_a(const ConformalMetric& g, const PhasePoint& z, const BusemannOptions& opts = {});

// Quadrature of reparam_a along the base axis of a class over one period;
// cross-validates the optimizer length lg of the class.
double reparam_class_integral(const ConformalMetric& g, const ConjClass& c, int n_points = 16,
                              const BusemannOptions& opts = {});

}  // namespace mls
