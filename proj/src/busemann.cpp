#include "mls/busemann.hpp"

#include <cmath>
#include <stdexcept>

namespace mls {

namespace {

// Base-metric ray point at hyperbolic distance t from x toward the ideal
// point xi.
std::complex<double> ray_point(std::complex<double> x, std::complex<double> xi, double t) {
  DiskMapd tx = translate_to_origin(x);
  std::complex<double> dir = tx.apply(xi);
  dir /= std::abs(dir);
  return tx.inverse().apply(std::tanh(0.5 * t) * dir);
}

double distance_g(const ConformalMetric& g, std::complex<double> a, std::complex<double> b,
                  const CurveOptions& opts, std::vector<std::complex<double>>* warm) {
  ClosedLengthResult r = two_point_length(g, a, b, opts, warm);
  if (!r.converged && r.residual > 1e-5)
    throw std::runtime_error("busemann: two-point solver did not converge");
  if (warm) *warm = r.curve.nodes;
  return r.length;
}

}  // namespace

double busemann_hyperbolic(std::complex<double> x0, std::complex<double> x,
                           const BoundaryPoint& xi) {
  std::complex<double> p = xi.point();
  auto B = [&p](std::complex<double> y) {
    return std::log((1.0 - std::norm(y)) / std::norm(y - p));
  };
  return B(x) - B(x0);
}

BusemannValue busemann(const ConformalMetric& g, std::complex<double> x0, std::complex<double> x,
                       const BoundaryPoint& xi, const BusemannOptions& opts) {
  if (std::abs(x0) >= 1.0 || std::abs(x) >= 1.0)
    throw std::invalid_argument("busemann: base points must be interior");
  if (!(opts.t_trunc > 0)) throw std::invalid_argument("busemann: t_trunc must be > 0");
  BusemannValue out;
  for (int half = 0; half < 2; ++half) {
    double t = half ? 0.5 * opts.t_trunc : opts.t_trunc;
    std::complex<double> zt = ray_point(x0, xi.point(), t);
    double d0 = distance_g(g, x0, zt, opts.curve, nullptr);
    double d1 = distance_g(g, x, zt, opts.curve, nullptr);
    (half ? out.value_half : out.value) = d0 - d1;
  }
  return out;
}

double reparam_a(const ConformalMetric& g, const PhasePoint& z, const BusemannOptions& opts) {
  // forward ideal endpoint of the base geodesic through z (exact)
  std::complex<double> xi = geodesic_forward_endpoint(z.x, z.v);
  std::complex<double> zt = ray_point(z.x, xi, opts.t_trunc);

  // b(y) = -d_g(y, z_T) + const; central differences with hyperbolic step 1e-4
  const double hstep = 1e-4;
  const double he = hstep * (1.0 - std::norm(z.x)) / 2.0;
  std::vector<std::complex<double>> warm;
  distance_g(g, z.x, zt, opts.curve, &warm);  // seeds the stencil solves

  auto d_at = [&](std::complex<double> y) {
    std::vector<std::complex<double>> w = warm;
    if (!w.empty()) w[0] = y;
    return distance_g(g, y, zt, opts.curve, &w);
  };
  double dxp = d_at(z.x + he);
  double dxm = d_at(z.x - he);
  double dyp = d_at(z.x + std::complex<double>(0, he));
  double dym = d_at(z.x - std::complex<double>(0, he));
  double bx = -(dxp - dxm) / (2.0 * he);
  double by = -(dyp - dym) / (2.0 * he);
  return bx * z.v.real() + by * z.v.imag();
}

double reparam_class_integral(const ConformalMetric& g, const ConjClass& c, int n_points,
                              const BusemannOptions& opts) {
  if (n_points < 2) throw std::invalid_argument("reparam_class_integral: need >= 2 points");
  DiskMapd m = disk_map_from_sl2<double>(c.rep.m);
  AxisFrame fr = axis_frame(m);
  const double l0 = c.l0;
  // composite trapezoid over one period (the integrand is periodic, so the
  // trapezoid rule converges spectrally in the number of points)
  double sum = 0.0;
  for (int i = 0; i < n_points; ++i) {
    double s = l0 * i / n_points;
    std::complex<double> x = axis_point(fr, s);
    // unit tangent of the axis at s (hyperbolic arclength parametrization)
    double ds = 1e-6;
    std::complex<double> v =
        (axis_point(fr, s + ds) - axis_point(fr, s - ds)) / (2.0 * ds);
    PhasePoint z{x, v};
    sum += reparam_a(g, z, opts);
  }
  return sum * l0 / n_points;
}

}  // namespace mls
