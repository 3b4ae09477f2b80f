#include "mls/flow.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "mls/parallel.hpp"

namespace mls {

namespace {

// State layout: x, v (complex) plus k running observable integrals.
struct State {
  std::complex<double> x, v;
  double obs[4] = {0, 0, 0, 0};
};

State axpy(const State& a, double h, const State& d, int k) {
  State r = a;
  r.x += h * d.x;
  r.v += h * d.v;
  for (int i = 0; i < k; ++i) r.obs[i] += h * d.obs[i];
  return r;
}

// Geodesic equation of a conformal metric in complex form:
//   x' = v,  v' = -v^2 conj(grad log lambda)
State rhs(const ConformalMetric& g, const State& s, const std::vector<Observable>& obs) {
  State d;
  d.x = s.v;
  std::complex<double> G = g.grad_log_lambda(s.x);
  d.v = -s.v * s.v * std::conj(G);
  for (std::size_t i = 0; i < obs.size(); ++i) d.obs[i] = obs[i](s.x, s.v);
  return d;
}

// Dormand-Prince 5(4) step; returns the error estimate norm.
double dopri_step(const ConformalMetric& g, const State& y, double h,
                  const std::vector<Observable>& obs, State& out, double atol, double rtol) {
  static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static const double a21 = 1.0 / 5;
  static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                      a54 = -212.0 / 729;
  static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                      a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                      b6 = 11.0 / 84;
  static const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                      e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
  (void)c2;
  (void)c3;
  (void)c4;
  (void)c5;
  const int k = static_cast<int>(obs.size());
  State k1 = rhs(g, y, obs);
  State k2 = rhs(g, axpy(y, h * a21, k1, k), obs);
  State t3 = axpy(axpy(y, h * a31, k1, k), h * a32, k2, k);
  State k3 = rhs(g, t3, obs);
  State t4 = axpy(axpy(axpy(y, h * a41, k1, k), h * a42, k2, k), h * a43, k3, k);
  State k4 = rhs(g, t4, obs);
  State t5 = axpy(axpy(axpy(axpy(y, h * a51, k1, k), h * a52, k2, k), h * a53, k3, k), h * a54, k4, k);
  State k5 = rhs(g, t5, obs);
  State t6 = axpy(axpy(axpy(axpy(axpy(y, h * a61, k1, k), h * a62, k2, k), h * a63, k3, k),
                       h * a64, k4, k),
                  h * a65, k5, k);
  State k6 = rhs(g, t6, obs);
  out = y;
  out.x += h * (b1 * k1.x + b3 * k3.x + b4 * k4.x + b5 * k5.x + b6 * k6.x);
  out.v += h * (b1 * k1.v + b3 * k3.v + b4 * k4.v + b5 * k5.v + b6 * k6.v);
  for (int i = 0; i < k; ++i)
    out.obs[i] += h * (b1 * k1.obs[i] + b3 * k3.obs[i] + b4 * k4.obs[i] + b5 * k5.obs[i] +
                       b6 * k6.obs[i]);
  State k7 = rhs(g, out, obs);
  // scaled error norm
  auto comp_err = [&](double e, double yv, double ynv) {
    double sc = atol + rtol * std::max(std::abs(yv), std::abs(ynv));
    return (e / sc) * (e / sc);
  };
  std::complex<double> ex =
      h * (e1 * k1.x + e3 * k3.x + e4 * k4.x + e5 * k5.x + e6 * k6.x + e7 * k7.x);
  std::complex<double> ev =
      h * (e1 * k1.v + e3 * k3.v + e4 * k4.v + e5 * k5.v + e6 * k6.v + e7 * k7.v);
  double s = 0;
  s += comp_err(ex.real(), y.x.real(), out.x.real());
  s += comp_err(ex.imag(), y.x.imag(), out.x.imag());
  s += comp_err(ev.real(), y.v.real(), out.v.real());
  s += comp_err(ev.imag(), y.v.imag(), out.v.imag());
  return std::sqrt(s / 4.0);
}

}  // namespace

PhasePoint make_phase_point(const ConformalMetric& g, std::complex<double> x,
                            std::complex<double> dir) {
  double n = std::abs(dir);
  if (n == 0) throw std::invalid_argument("make_phase_point: zero direction");
  PhasePoint z;
  z.x = x;
  z.v = dir / (n * g.lambda(x));
  return z;
}

PhasePoint flip(const PhasePoint& z) { return {z.x, -z.v}; }

OrbitSegment integrate(const ConformalMetric& g, const PhasePoint& z0, double T,
                       const FlowOptions& opts, const std::vector<Observable>& obs) {
  if (T < 0) throw std::invalid_argument("integrate: T must be >= 0");
  if (obs.size() > 4) throw std::invalid_argument("integrate: at most 4 observables");
  const SurfaceGroup& G = g.group();
  OrbitSegment seg;
  seg.obs_integrals.assign(obs.size(), 0.0);

  State y;
  y.x = z0.x;
  y.v = z0.v;
  double t = 0.0;
  double h = std::min(opts.dt_max, 1e-2);
  double next_sample = 0.0;
  if (opts.sample_stride > 0) {
    seg.samples.push_back({0.0, z0});
    next_sample = opts.sample_stride;
  }
  Word word;

  int guard = 0;
  while (t < T - 1e-13) {
    if (++guard > 50000000) throw std::runtime_error("integrate: step guard exceeded");
    double h_try = std::min({h, opts.dt_max, T - t});
    bool sample_hit = false;
    if (opts.sample_stride > 0 && t + h_try >= next_sample - 1e-13) {
      h_try = next_sample - t;
      sample_hit = true;
    }
    State ynew;
    double err = dopri_step(g, y, h_try, obs, ynew, opts.atol, opts.rtol);
    if (err > 1.0 && h_try > 1e-12) {
      h = std::max(1e-12, 0.9 * h_try * std::pow(err, -0.2));
      continue;
    }
    // accept
    t += h_try;
    y = ynew;
    double fac = err > 1e-300 ? 0.9 * std::pow(err, -0.2) : 5.0;
    h = h_try * std::clamp(fac, 0.2, 5.0);

    // unit-speed renormalization
    double sp = g.lambda(y.x) * std::abs(y.v);
    seg.max_speed_drift = std::max(seg.max_speed_drift, std::abs(sp - 1.0));
    y.v /= sp;

    // deck reduction
    if (!G.in_domain(y.x)) {
      Word letters;
      std::complex<double> xr = G.reduce(y.x, &letters);
      DiskMapd W = G.disk_map(letters);
      DiskMapd Wi = W.inverse();
      y.v = Wi.deriv(y.x) * y.v;
      y.x = xr;
      word.insert(word.end(), letters.begin(), letters.end());
      double sp2 = g.lambda(y.x) * std::abs(y.v);
      y.v /= sp2;
    }
    ++seg.steps;
    if (sample_hit && opts.sample_stride > 0) {
      seg.samples.push_back({t, PhasePoint{y.x, y.v}});
      next_sample += opts.sample_stride;
    }
  }
  seg.end = PhasePoint{y.x, y.v};
  seg.word = word_free_reduce(word);
  seg.total_time = T;
  for (std::size_t i = 0; i < obs.size(); ++i) seg.obs_integrals[i] = y.obs[i];
  return seg;
}

std::vector<PhasePoint> sample_liouville(const SurfaceGroup& group, std::size_t n, uint64_t seed) {
  // Positions w.r.t. hyperbolic area on the fundamental octagon, directions
  // uniform on the circle, unit speed for the base metric.
  CounterRng rng(seed, /*stream=*/0x11eu);
  std::vector<PhasePoint> out(n);
  const double R = std::pow(2.0, -0.25);
  const double R2 = R * R;
  for (std::size_t i = 0; i < n; ++i) {
    uint64_t base = static_cast<uint64_t>(i) * 8192ull;
    bool done = false;
    for (int attempt = 0; attempt < 2048 && !done; ++attempt) {
      uint64_t c = base + 4ull * attempt;
      double x = R * (2.0 * rng.u01(c) - 1.0);
      double y = R * (2.0 * rng.u01(c + 1) - 1.0);
      std::complex<double> z(x, y);
      double r2 = std::norm(z);
      if (r2 >= R2) continue;
      double acc = (1.0 - R2) / (1.0 - r2);
      if (rng.u01(c + 2) >= acc * acc) continue;
      if (!group.in_domain(z)) continue;
      double th = 2.0 * 3.14159265358979323846 * rng.u01(c + 3);
      std::complex<double> v = std::polar(1.0, th) * (1.0 - r2) / 2.0;
      out[i] = PhasePoint{z, v};
      done = true;
    }
    if (!done) throw std::runtime_error("sample_liouville: rejection sampling stalled");
  }
  return out;
}

double birkhoff_average(const ConformalMetric& g, const Observable& u, const PhasePoint& z,
                        double T, const FlowOptions& opts) {
  if (!(T > 0)) throw std::invalid_argument("birkhoff_average: T must be > 0");
  OrbitSegment seg = integrate(g, z, T, opts, {u});
  return seg.obs_integrals[0] / T;
}

VarianceReport variance(const ConformalMetric& g, const Observable& u, double T, std::size_t n,
                        uint64_t seed, const FlowOptions& opts, int workers) {
  if (n < 2) throw std::invalid_argument("variance: need n >= 2 orbits");
  if (!(T > 0)) throw std::invalid_argument("variance: T must be > 0");
  auto starts = sample_liouville(g.group(), n, seed);

  // cumulative integrals at quarter checkpoints of each orbit
  std::vector<std::array<double, 4>> cum(n);
  parallel_for(n, workers, [&](std::size_t i) {
    PhasePoint z = starts[i];
    double acc = 0.0;
    for (int q = 0; q < 4; ++q) {
      OrbitSegment seg = integrate(g, z, T / 4.0, opts, {u});
      acc += seg.obs_integrals[0];
      cum[i][q] = acc;
      z = seg.end;
    }
  });

  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += cum[i][3];
  mean /= (n * T);

  double s1 = 0.0, s2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double S = cum[i][3] - mean * T;
    double q = S * S / T;
    s1 += q;
    s2 += q * q;
  }
  VarianceReport rep;
  rep.value = s1 / n;
  rep.stat_error = std::sqrt(std::max(0.0, s2 / n - (s1 / n) * (s1 / n)) / n);
  rep.mean = mean;
  rep.T = T;
  rep.n = n;
  rep.seed = seed;

  // overlapping windows of length T/2 (three per orbit)
  double h1 = 0.0;
  std::size_t m = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double w[3] = {cum[i][1], cum[i][2] - cum[i][0], cum[i][3] - cum[i][1]};
    for (double Sw : w) {
      double S = Sw - mean * T / 2.0;
      h1 += S * S / (T / 2.0);
      ++m;
    }
  }
  rep.value_half_T = h1 / m;
  return rep;
}

double lyapunov_top(const ConformalMetric& g, const PhasePoint& z, double T,
                    const FlowOptions& opts) {
  // Jacobi field along the orbit: J'' = -K J, renormalized every unit of time.
  double logsum = 0.0;
  double J = 1.0, Jp = 0.0;
  PhasePoint cur = z;
  double t = 0.0;
  const double chunk = 1.0;
  J = 1.0 / std::sqrt(2.0);
  Jp = 1.0 / std::sqrt(2.0);
  while (t < T - 1e-9) {
    double dt = std::min(chunk, T - t);
    // integrate flow and Jacobi jointly with small fixed steps (RK4)
    int nsub = static_cast<int>(std::ceil(dt / 0.01));
    double h = dt / nsub;
    for (int i = 0; i < nsub; ++i) {
      // flow advance by dopri on the sub-step for accuracy
      OrbitSegment seg = integrate(g, cur, h, opts, {});
      double K0 = g.gaussian_curvature(cur.x);
      double K1 = g.gaussian_curvature(seg.end.x);
      // RK2 (midpoint via average curvature) for the 2x2 Jacobi system
      double Km = 0.5 * (K0 + K1);
      double k1J = Jp, k1P = -K0 * J;
      double J2 = J + 0.5 * h * k1J, P2 = Jp + 0.5 * h * k1P;
      double k2J = P2, k2P = -Km * J2;
      double J3 = J + 0.5 * h * k2J, P3 = Jp + 0.5 * h * k2P;
      double k3J = P3, k3P = -Km * J3;
      double J4 = J + h * k3J, P4 = Jp + h * k3P;
      double k4J = P4, k4P = -K1 * J4;
      J += h / 6.0 * (k1J + 2 * k2J + 2 * k3J + k4J);
      Jp += h / 6.0 * (k1P + 2 * k2P + 2 * k3P + k4P);
      cur = seg.end;
    }
    t += dt;
    double nrm = std::sqrt(J * J + Jp * Jp);
    logsum += std::log(nrm);
    J /= nrm;
    Jp /= nrm;
  }
  return logsum / T;
}

void write_orbit_csv(const std::string& path, const OrbitSegment& seg) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_orbit_csv: cannot open " + path);
  f << "t,x,y,vx,vy\n";
  char buf[160];
  for (const auto& [t, p] : seg.samples) {
    std::snprintf(buf, sizeof(buf), "%.12g,%.17g,%.17g,%.17g,%.17g\n", t, p.x.real(), p.x.imag(),
                  p.v.real(), p.v.imag());
    f << buf;
  }
}

}  // namespace mls
