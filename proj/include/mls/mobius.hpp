// Poincare disk model primitives: SU(1,1) Mobius maps, hyperbolic distances,
// geodesic interpolation. Header-only, templated on the scalar type so the
// group arithmetic can run in long double while everything else stays double.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace mls {

template <class S> using Complex = std::complex<S>;
using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

// Disk isometry w -> (a*w + b) / (conj(b)*w + conj(a)), |a|^2 - |b|^2 = 1.
template <class S>
struct DiskMap {
  Complex<S> a{1, 0};
  Complex<S> b{0, 0};

  Complex<S> apply(Complex<S> w) const { return (a * w + b) / (std::conj(b) * w + std::conj(a)); }

  // Complex derivative d(apply)/dw = 1 / (conj(b) w + conj(a))^2.
  Complex<S> deriv(Complex<S> w) const {
    Complex<S> d = std::conj(b) * w + std::conj(a);
    return S(1) / (d * d);
  }

  DiskMap inverse() const { return {std::conj(a), -b}; }

  DiskMap operator*(const DiskMap& o) const {
    return {a * o.a + b * std::conj(o.b), a * o.b + b * std::conj(o.a)};
  }

  S det() const { return std::norm(a) - std::norm(b); }

  void renormalize() {
    S d = std::sqrt(det());
    a /= d;
    b /= d;
  }

  S trace_abs() const { return std::abs(S(2) * a.real()); }

  static DiskMap identity() { return {Complex<S>(1, 0), Complex<S>(0, 0)}; }
};

using DiskMapd = DiskMap<double>;

// Conversions between the SL(2,R) matrix (upper half-plane action) and the
// SU(1,1) pair (disk action); both describe the same isometry through the
// Cayley transform z -> (z - i)/(z + i).
template <class S>
DiskMap<S> disk_map_from_sl2(const Eigen::Matrix<S, 2, 2>& m) {
  S a = m(0, 0), b = m(0, 1), c = m(1, 0), d = m(1, 1);
  return {Complex<S>((a + d) / 2, (b - c) / 2), Complex<S>((a - d) / 2, -(b + c) / 2)};
}

template <class S>
Eigen::Matrix<S, 2, 2> sl2_from_disk_map(const DiskMap<S>& g) {
  Eigen::Matrix<S, 2, 2> m;
  m(0, 0) = g.a.real() + g.b.real();
  m(1, 1) = g.a.real() - g.b.real();
  m(0, 1) = g.a.imag() - g.b.imag();
  m(1, 0) = -g.a.imag() - g.b.imag();
  return m;
}

inline std::complex<double> to_c(const Vec2& x) { return {x.x(), x.y()}; }
inline Vec2 to_v(std::complex<double> z) { return {z.real(), z.imag()}; }

inline double acosh_safe(double x) { return std::acosh(std::max(1.0, x)); }

// Hyperbolic distance in the disk (curvature -1, metric 4|dz|^2/(1-|z|^2)^2).
inline double hyp_dist(std::complex<double> z1, std::complex<double> z2) {
  double num = 2.0 * std::norm(z1 - z2);
  double den = (1.0 - std::norm(z1)) * (1.0 - std::norm(z2));
  return acosh_safe(1.0 + num / den);
}

inline double hyp_dist0(std::complex<double> z) {
  double r2 = std::norm(z);
  return acosh_safe(1.0 + 2.0 * r2 / (1.0 - r2));
}

// d(0, g*0) = arccosh(1 + 2|b|^2).
inline double displacement0(const DiskMapd& g) { return acosh_safe(1.0 + 2.0 * std::norm(g.b)); }

// Mobius map sending p to 0: w -> (w - p) / (1 - conj(p) w), as a DiskMap.
inline DiskMapd translate_to_origin(std::complex<double> p) {
  double s = 1.0 / std::sqrt(1.0 - std::norm(p));
  return {s * std::complex<double>(1, 0), -s * p};
}

// Point at hyperbolic arclength s from a along the geodesic toward b.
inline std::complex<double> geodesic_point(std::complex<double> a, std::complex<double> b,
                                           double s) {
  DiskMapd ta = translate_to_origin(a);
  std::complex<double> bp = ta.apply(b);
  double r = std::abs(bp);
  if (r < 1e-300) return a;
  std::complex<double> dir = bp / r;
  return ta.inverse().apply(std::tanh(0.5 * s) * dir);
}

// Forward ideal endpoint of the hyperbolic geodesic with initial data (x, v).
inline std::complex<double> geodesic_forward_endpoint(std::complex<double> x,
                                                      std::complex<double> v) {
  DiskMapd tx = translate_to_origin(x);
  std::complex<double> vp = tx.deriv(x) * v;
  std::complex<double> xi = vp / std::abs(vp);
  return tx.inverse().apply(xi);
}

// Axis (fixed points on the unit circle) of a hyperbolic disk isometry.
// Returns {attracting, repelling}.
inline std::pair<std::complex<double>, std::complex<double>> axis_fixed_points(const DiskMapd& g) {
  if (g.trace_abs() <= 2.0) throw std::domain_error("axis_fixed_points: element is not hyperbolic");
  double re = g.a.real(), im = g.a.imag();
  double disc = std::sqrt(re * re - 1.0);
  std::complex<double> bb = std::conj(g.b);
  std::complex<double> w1 = (std::complex<double>(0, im) + disc) / bb;
  std::complex<double> w2 = (std::complex<double>(0, im) - disc) / bb;
  // attracting fixed point has |derivative| < 1
  if (std::abs(g.deriv(w1)) < 1.0) return {w1, w2};
  return {w2, w1};
}

// Foot point: the point of the axis of g closest to the origin, plus the
// unit (euclidean-normalized) direction of the oriented axis there.
struct AxisFrame {
  std::complex<double> foot;     // closest axis point to 0
  std::complex<double> dir;      // forward direction at foot (euclidean unit)
  double dist0 = 0.0;            // hyperbolic distance from 0 to the axis
};

inline AxisFrame axis_frame(const DiskMapd& g) {
  auto [zp, zm] = axis_fixed_points(g);
  // The geodesic with ideal endpoints zm -> zp: either a diameter (zm = -zp)
  // or an arc of the circle orthogonal to the unit circle through zm, zp.
  std::complex<double> sum = zm + zp;
  AxisFrame f;
  if (std::abs(sum) < 1e-12) {
    f.foot = 0.0;
    f.dir = zp;
    f.dist0 = 0.0;
    return f;
  }
  // Orthogonal circle: center c = 2(zm+zp)/|zm+zp|^2 ... derive via c*conj(z)+conj(c)*z = 1+|z|^2
  // For two unit endpoints: center c = (zm + zp) / (1 + Re(zm conj(zp))).
  std::complex<double> c = (zm + zp) / (1.0 + (zm * std::conj(zp)).real());
  double rad = std::sqrt(std::norm(c) - 1.0);
  double ac = std::abs(c);
  f.foot = c * (1.0 - rad / ac);
  f.dist0 = hyp_dist0(f.foot);
  // tangent of the circle at foot, oriented from zm to zp
  std::complex<double> t = std::complex<double>(0, 1) * (f.foot - c);
  t /= std::abs(t);
  if ((std::conj(t) * (zp - f.foot)).real() < 0) t = -t;
  f.dir = t;
  return f;
}

// Point at signed arclength s along the oriented axis of g, s = 0 at the foot.
inline std::complex<double> axis_point(const AxisFrame& f, double s) {
  DiskMapd tf = translate_to_origin(f.foot);
  std::complex<double> d0 = tf.deriv(f.foot) * f.dir;
  d0 /= std::abs(d0);
  return tf.inverse().apply(std::tanh(0.5 * s) * d0);
}

}  // namespace mls
