#include "mls/conformal.hpp"

#include <cmath>
#include <stdexcept>

namespace mls {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Squared hyperbolic distance as a function of u = |z-c|^2 / ((1-|z|^2)(1-|c|^2)):
// d = 2 asinh(sqrt(u)), F(u) = d^2 = 4 asinh(sqrt u)^2. Series used near u = 0.
struct Profile {
  double F, dF, d2F;
};

Profile profile(double u) {
  Profile p;
  if (u < 1e-5) {
    p.F = u * (4.0 - u * (4.0 / 3.0 - u * 32.0 / 45.0));
    p.dF = 4.0 - u * (8.0 / 3.0 - u * 32.0 / 15.0);
    p.d2F = -8.0 / 3.0 + u * 64.0 / 15.0;
    return p;
  }
  double t = std::sqrt(u);
  double as = std::asinh(t);
  double w = std::sqrt(u * (1.0 + u));
  p.F = 4.0 * as * as;
  p.dF = 4.0 * as / w;
  // F'' = 2/(u(1+u)) - 2 asinh(sqrt u) (1+2u) / (u(1+u))^{3/2}
  p.d2F = 2.0 / (u * (1.0 + u)) - 2.0 * as * (1.0 + 2.0 * u) / (w * w * w);
  return p;
}

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double t = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double p0 = 0, p1 = 0;
    for (int it = 0; it < 100; ++it) {
      p0 = 1.0;
      p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * t * p1 - j * p2) / (j + 1.0);
      }
      double dp = n * (t * p0 - p1) / (t * t - 1.0);
      double dt = p0 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    p0 = 1.0;
    p1 = 0.0;
    for (int j = 0; j < n; ++j) {
      double p2 = p1;
      p1 = p0;
      p0 = ((2.0 * j + 1.0) * t * p1 - j * p2) / (j + 1.0);
    }
    double dp = n * (t * p0 - p1) / (t * t - 1.0);
    x[i] = -t;
    x[n - 1 - i] = t;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - t * t) * dp * dp);
  }
}

uint64_t fnv64(const void* data, std::size_t n, uint64_t h = 1469598103934665603ull) {
  const unsigned char* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

ConformalFactor::ConformalFactor(const SurfaceGroup& group, std::vector<Bump> bumps,
                                 int periodization_depth)
    : group_(&group), bumps_(std::move(bumps)), depth_(periodization_depth) {
  for (const auto& b : bumps_) {
    if (!(b.width > 0)) throw std::invalid_argument("bump width must be > 0");
    if (std::abs(b.center) >= 1.0) throw std::invalid_argument("bump center must be in the disk");
  }
  // orbit of tiles with word length <= depth, one extra shell for the tail bound
  struct Node {
    DiskMapd g;
    int len;
  };
  std::vector<Node> nodes{{DiskMapd::identity(), 0}};
  std::vector<std::array<int64_t, 4>> keys;
  auto key4 = [](const DiskMapd& g) {
    std::array<double, 4> v = {g.a.real(), g.a.imag(), g.b.real(), g.b.imag()};
    double sgn = 1.0;
    for (double x : v)
      if (std::abs(x) > 1e-7) {
        sgn = x > 0 ? 1.0 : -1.0;
        break;
      }
    std::array<int64_t, 4> k;
    for (int i = 0; i < 4; ++i) k[i] = llround(sgn * v[i] * 1e6);
    return k;
  };
  auto contains = [&keys](const std::array<int64_t, 4>& k) {
    for (const auto& q : keys)
      if (q == k) return true;
    return false;
  };
  keys.push_back(key4(nodes[0].g));
  for (std::size_t h = 0; h < nodes.size(); ++h) {
    if (nodes[h].len > depth_) continue;
    for (int k = 0; k < 8; ++k) {
      DiskMapd g2 = nodes[h].g * group.side_map(k);
      g2.renormalize();
      auto kk = key4(g2);
      if (contains(kk)) continue;
      keys.push_back(kk);
      nodes.push_back({g2, nodes[h].len + 1});
    }
  }
  for (const auto& n : nodes) {
    if (n.len <= depth_) orbit_.push_back(n.g);
    else if (n.len == depth_ + 1) shell_.push_back(n.g);
  }

  // tail bound: largest one-extra-shell contribution over a boundary grid
  double tb = 0.0, mx = 0.0;
  for (int i = 0; i < 64; ++i) {
    double th = 2.0 * kPi * i / 64.0;
    for (double rfrac : {0.0, 0.35, 0.7, 0.95}) {
      std::complex<double> z = std::polar(rfrac * std::pow(2.0, -0.25), th);
      if (!group.in_domain(z) && rfrac > 0) continue;
      double s = 0.0;
      for (const auto& g : shell_) {
        std::complex<double> w = g.apply(z);
        for (const auto& b : bumps_) {
          double u = std::norm(w - b.center) /
                     ((1.0 - std::norm(w)) * (1.0 - std::norm(b.center)));
          s += std::abs(b.amplitude) * std::exp(-profile(u).F / (2.0 * b.width * b.width));
        }
      }
      tb = std::max(tb, s);
      mx = std::max(mx, std::abs(eval(z, false).value));
    }
  }
  tail_bound_ = tb;
  grid_max_abs_ = mx;
}

ConformalFactor::Eval ConformalFactor::eval(std::complex<double> z, bool derivs) const {
  Eval out;
  if (bumps_.empty() || group_ == nullptr) return out;
  z = group_->reduce(z);
  const double r2z = std::norm(z);
  for (const auto& g : orbit_) {
    std::complex<double> w = g.apply(z);
    // derivative of the isometry (holomorphic): tangent factor
    std::complex<double> dg;
    double adg2 = 0.0;
    if (derivs) {
      dg = g.deriv(z);
      adg2 = std::norm(dg);
    }
    const double r2w = std::norm(w);
    const double hw = 1.0 / (1.0 - r2w);
    for (const auto& b : bumps_) {
      const double kc = 1.0 / (1.0 - std::norm(b.center));
      std::complex<double> d = w - b.center;
      double n = std::norm(d);
      double u = n * hw * kc;
      Profile p = profile(u);
      double inv2s2 = 1.0 / (2.0 * b.width * b.width);
      double val = b.amplitude * std::exp(-p.F * inv2s2);
      out.value += val;
      if (!derivs || std::abs(val) < 1e-18 * std::abs(b.amplitude)) continue;
      // grad u and laplacian u at w
      std::complex<double> grad_u = 2.0 * hw * kc * (d + n * hw * w);
      double lap_u = 4.0 * kc * hw + 8.0 * kc * hw * hw * (std::conj(d) * w).real() +
                     n * kc * (4.0 * hw * hw + 8.0 * r2w * hw * hw * hw);
      double gu2 = std::norm(grad_u);
      // grad/lap of the bump at w
      std::complex<double> grad_b = val * (-p.dF * inv2s2) * grad_u;
      double lap_b = val * ((p.dF * inv2s2) * (p.dF * inv2s2) * gu2 -
                            inv2s2 * (p.d2F * gu2 + p.dF * lap_u));
      // pull back through the isometry
      out.grad += std::conj(dg) * grad_b;
      out.lap += adg2 * lap_b;
    }
  }
  (void)r2z;
  return out;
}

double ConformalFactor::operator()(std::complex<double> z) const { return eval(z, false).value; }

std::complex<double> ConformalFactor::gradient(std::complex<double> z) const {
  return eval(z, true).grad;
}

double ConformalFactor::laplacian(std::complex<double> z) const { return eval(z, true).lap; }

double ConformalFactor::hyp_laplacian(std::complex<double> z) const {
  double f = 1.0 - std::norm(group_->reduce(z));
  return 0.25 * f * f * laplacian(z);
}

ConformalMetric::ConformalMetric(const SurfaceGroup& group, ConformalFactor phi, double eps)
    : group_(&group), phi_(std::move(phi)), eps_(eps) {
  // curvature gate on a polar grid over the domain
  double minK = 1e300, maxK = -1e300;
  double max_neg_lap = 0.0;  // max of -hyp_laplacian(phi)
  const int NT = 64, NR = 24;
  for (int i = 0; i < NT; ++i) {
    double th = 2.0 * kPi * (i + 0.5) / NT;
    for (int j = 0; j < NR; ++j) {
      double r = (j + 0.5) / NR * std::pow(2.0, -0.25);
      std::complex<double> z = std::polar(r, th);
      if (!group.in_domain(z)) continue;
      double K = gaussian_curvature(z);
      minK = std::min(minK, K);
      maxK = std::max(maxK, K);
      if (!phi_.empty()) max_neg_lap = std::max(max_neg_lap, -phi_.hyp_laplacian(z));
    }
  }
  min_grid_K_ = minK;
  max_grid_K_ = maxK;
  eps_break_ = max_neg_lap > 0 ? 1.0 / max_neg_lap : 1e300;
  if (maxK >= 0.0)
    throw std::runtime_error("ConformalMetric: curvature gate failed (K >= 0 on grid)");

  uint64_t h = 1469598103934665603ull;
  auto mix = [&h](double x) { h = fnv64(&x, sizeof(x), h); };
  mix(eps_);
  mix(static_cast<double>(phi_.depth()));
  for (const auto& b : phi_.bumps()) {
    mix(b.center.real());
    mix(b.center.imag());
    mix(b.width);
    mix(b.amplitude);
  }
  hash_ = h;
}

double ConformalMetric::lambda(std::complex<double> z) const {
  double base = 2.0 / (1.0 - std::norm(z));
  if (eps_ == 0.0 || phi_.empty()) return base;
  return std::exp(eps_ * phi_(z)) * base;
}

std::complex<double> ConformalMetric::grad_log_lambda(std::complex<double> z) const {
  std::complex<double> g = 2.0 * z / (1.0 - std::norm(z));
  if (eps_ != 0.0 && !phi_.empty()) g += eps_ * phi_.gradient(z);
  return g;
}

double ConformalMetric::gaussian_curvature(std::complex<double> z) const {
  if (eps_ == 0.0 || phi_.empty()) return -1.0;
  double p = phi_(z);
  double lap = phi_.hyp_laplacian(z);
  return std::exp(-2.0 * eps_ * p) * (-1.0 - eps_ * lap);
}

double domain_integral(const SurfaceGroup& group,
                       const std::function<double(std::complex<double>)>& f, int n_radial,
                       int n_angular) {
  std::vector<double> xr, wr, xt, wt;
  gauss_legendre(n_radial, xr, wr);
  gauss_legendre(n_angular, xt, wt);
  const double m = group.side_circle_center();
  const double rr = group.side_circle_radius();
  double total = 0.0;
  for (int k = 0; k < 8; ++k) {
    double th0 = k * kPi / 4.0;
    for (int it = 0; it < n_angular; ++it) {
      double dth = xt[it] * kPi / 8.0;  // sector [-pi/8, pi/8] around the side normal
      double th = th0 + dth;
      double rb = m * std::cos(dth) - std::sqrt(rr * rr - m * m * std::sin(dth) * std::sin(dth));
      for (int ir = 0; ir < n_radial; ++ir) {
        double r = 0.5 * (xr[ir] + 1.0) * rb;
        double jac = 0.5 * rb * (kPi / 8.0) * wt[it] * wr[ir];
        double lam = 2.0 / (1.0 - r * r);
        total += f(std::polar(r, th)) * lam * lam * r * jac;
      }
    }
  }
  return total;
}

double metric_volume(const ConformalMetric& g, int n_radial, int n_angular) {
  const double eps = g.eps();
  const ConformalFactor& phi = g.phi();
  return domain_integral(
      g.group(),
      [&](std::complex<double> z) {
        return (eps == 0.0 || phi.empty()) ? 1.0 : std::exp(2.0 * eps * phi(z));
      },
      n_radial, n_angular);
}

}  // namespace mls
