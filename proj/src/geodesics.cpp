#include "mls/geodesics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mls/parallel.hpp"

namespace mls {

namespace {

// Edge model: hyperbolic geodesic segment between consecutive nodes, weighted
// by e^{eps phi} at two Gauss points in arclength. Exact at eps = 0.
struct EdgeEval {
  double len;
};

constexpr double kGauss = 0.28867513459481287;  // 1/(2 sqrt 3)

double edge_weight(const ConformalMetric& g, std::complex<double> a, std::complex<double> b,
                   double d0) {
  if (g.eps() == 0.0 || g.phi().empty()) return 1.0;
  std::complex<double> p1 = geodesic_point(a, b, d0 * (0.5 - kGauss));
  std::complex<double> p2 = geodesic_point(a, b, d0 * (0.5 + kGauss));
  const ConformalFactor& phi = g.phi();
  return 0.5 * (std::exp(g.eps() * phi(p1)) + std::exp(g.eps() * phi(p2)));
}

double edge_length(const ConformalMetric& g, std::complex<double> a, std::complex<double> b) {
  double d0 = hyp_dist(a, b);
  return d0 * edge_weight(g, a, b, d0);
}

// Euclidean gradient of d0(a, b) with respect to a, complex encoding.
std::complex<double> grad_d0_a(std::complex<double> a, std::complex<double> b) {
  double ha = 1.0 / (1.0 - std::norm(a));
  double hb = 1.0 / (1.0 - std::norm(b));
  double n = std::norm(a - b);
  double D = n * ha * hb;
  std::complex<double> gD = 2.0 * ha * hb * ((a - b) + n * ha * a);
  double w = std::sqrt(std::max(D * (1.0 + D), 1e-300));
  return gD / w;
}

class CurveProblem {
 public:
  CurveProblem(const ConformalMetric& g, std::vector<std::complex<double>> nodes, DiskMapd closure,
               bool pinned, std::complex<double> endpoint)
      : g_(g), x_(std::move(nodes)), closure_(closure), pinned_(pinned), endpoint_(endpoint) {}

  // Endpoint of edge i (i = 0..N-1): (x_i, x_{i+1}) with x_N the closure image
  // of x_0 (equivariant) or the pinned endpoint.
  std::complex<double> node_after(std::size_t i) const {
    if (i + 1 < x_.size()) return x_[i + 1];
    return pinned_ ? endpoint_ : closure_.apply(x_[0]);
  }

  double total_length() const {
    double L = 0;
    for (std::size_t i = 0; i < x_.size(); ++i) L += edge_length(g_, x_[i], node_after(i));
    return L;
  }

  // Euclidean gradient w.r.t. the free nodes. Free nodes are x_0..x_{N-1}
  // (equivariant) or x_1..x_{N-1} (pinned; x_0 fixed).
  void gradient(std::vector<std::complex<double>>& grad) const {
    const std::size_t N = x_.size();
    grad.assign(N, {0.0, 0.0});
    const double eta = 1e-6;
    const bool weighted = (g_.eps() != 0.0 && !g_.phi().empty());
    auto add_edge_grads = [&](std::size_t i) {
      std::complex<double> a = x_[i];
      std::complex<double> b = node_after(i);
      double d0 = hyp_dist(a, b);
      double w = weighted ? edge_weight(g_, a, b, d0) : 1.0;
      // d(d0 w) = (grad d0) w + d0 (grad w); the transport part is analytic,
      // the conformal weight is differenced (it is O(1) so the step noise is
      // far below the transport scale).
      std::complex<double> ga = w * grad_d0_a(a, b);
      std::complex<double> gb = w * grad_d0_a(b, a);
      if (weighted) {
        auto wfun = [&](std::complex<double> aa, std::complex<double> bb) {
          return edge_weight(g_, aa, bb, hyp_dist(aa, bb));
        };
        double sa = eta * (1.0 - std::norm(a)) / 2.0;
        std::complex<double> gwa(
            (wfun(a + sa, b) - wfun(a - sa, b)) / (2.0 * sa),
            (wfun(a + std::complex<double>(0, sa), b) - wfun(a - std::complex<double>(0, sa), b)) /
                (2.0 * sa));
        double sb = eta * (1.0 - std::norm(b)) / 2.0;
        std::complex<double> gwb(
            (wfun(a, b + sb) - wfun(a, b - sb)) / (2.0 * sb),
            (wfun(a, b + std::complex<double>(0, sb)) - wfun(a, b - std::complex<double>(0, sb))) /
                (2.0 * sb));
        ga += d0 * gwa;
        gb += d0 * gwb;
      }
      grad[i] += ga;
      if (i + 1 < N) {
        grad[i + 1] += gb;
      } else if (!pinned_) {
        // b = closure(x_0): pull back through the deck map
        grad[0] += std::conj(closure_.deriv(x_[0])) * gb;
      }
    };
    for (std::size_t i = 0; i < N; ++i) add_edge_grads(i);
    if (pinned_) grad[0] = {0.0, 0.0};
  }

  std::vector<std::complex<double>>& nodes() { return x_; }
  const std::vector<std::complex<double>>& nodes() const { return x_; }
  bool pinned() const { return pinned_; }

 private:
  const ConformalMetric& g_;
  std::vector<std::complex<double>> x_;
  DiskMapd closure_;
  bool pinned_;
  std::complex<double> endpoint_;
};

ClosedLengthResult minimize(CurveProblem& prob, const CurveOptions& opts) {
  ClosedLengthResult res;
  const std::size_t N = prob.nodes().size();
  std::vector<std::complex<double>> grad, pgrad, dir, prev_pgrad, prev_grad;
  auto precond = [&](const std::vector<std::complex<double>>& gr,
                     std::vector<std::complex<double>>& out) {
    out.resize(N);
    for (std::size_t i = 0; i < N; ++i) {
      double s = (1.0 - std::norm(prob.nodes()[i])) / 2.0;
      out[i] = gr[i] * (s * s);
    }
  };
  auto dot = [&](const std::vector<std::complex<double>>& a,
                 const std::vector<std::complex<double>>& b) {
    double s = 0;
    for (std::size_t i = 0; i < N; ++i) s += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
    return s;
  };

  double L = prob.total_length();
  prob.gradient(grad);
  precond(grad, pgrad);
  dir = pgrad;
  for (auto& d : dir) d = -d;
  double gg = dot(pgrad, grad);
  double alpha = 1.0;
  int it = 0;
  for (; it < opts.max_iter; ++it) {
    // residual in hyperbolic units
    double rmax = 0;
    for (std::size_t i = 0; i < N; ++i) {
      double s = (1.0 - std::norm(prob.nodes()[i])) / 2.0;
      rmax = std::max(rmax, std::abs(grad[i]) * s);
    }
    res.residual = rmax;
    if (rmax < opts.grad_tol) {
      res.converged = true;
      break;
    }
    double slope = dot(grad, dir);
    if (slope >= 0) {  // reset to steepest descent
      dir = pgrad;
      for (auto& d : dir) d = -d;
      slope = dot(grad, dir);
      if (slope >= 0) break;
    }
    // backtracking Armijo
    std::vector<std::complex<double>> saved = prob.nodes();
    double step = alpha;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      for (std::size_t i = 0; i < N; ++i) prob.nodes()[i] = saved[i] + step * dir[i];
      double Lnew = prob.total_length();
      if (Lnew <= L + 1e-4 * step * slope) {
        accepted = true;
        if (std::abs(L - Lnew) < 1e-15 * std::max(1.0, L) && rmax < 1e-6) {
          L = Lnew;
          res.converged = true;
        }
        L = Lnew;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      prob.nodes() = saved;
      res.converged = res.residual < 1e-6;
      break;
    }
    if (res.converged) break;
    alpha = std::min(1.0, step * 2.0);
    prev_grad = grad;
    prev_pgrad = pgrad;
    prob.gradient(grad);
    precond(grad, pgrad);
    double gg_new = dot(pgrad, grad);
    // Polak-Ribiere+ with preconditioned inner products
    double num = gg_new - dot(pgrad, prev_grad);
    double beta = std::max(0.0, num / gg);
    if ((it + 1) % static_cast<int>(std::max<std::size_t>(8, N / 4)) == 0) beta = 0.0;
    for (std::size_t i = 0; i < N; ++i) dir[i] = -pgrad[i] + beta * dir[i];
    gg = gg_new;
  }
  res.length = L;
  res.iters = it;
  res.curve.nodes = prob.nodes();
  return res;
}

int node_count(const CurveOptions& opts, double approx_len) {
  if (opts.nodes > 0) return opts.nodes;
  return std::max<int>(opts.min_nodes,
                       static_cast<int>(std::ceil(opts.nodes_per_unit * approx_len)));
}

}  // namespace

std::complex<double> class_axis_point(const ConjClass& c, double s) {
  DiskMapd m = disk_map_from_sl2<double>(c.rep.m);
  AxisFrame fr = axis_frame(m);
  return axis_point(fr, s);
}

ClosedLengthResult closed_length(const ConformalMetric& g, const ConjClass& c,
                                 const CurveOptions& opts) {
  if (std::abs(c.rep.m(0, 0) + c.rep.m(1, 1)) <= 2.0)
    throw std::domain_error("closed_length: degenerate (non-hyperbolic) class");
  const double l0 = c.l0;
  const int N = node_count(opts, l0);
  DiskMapd M = disk_map_from_sl2<double>(c.rep.m);
  AxisFrame fr = axis_frame(M);
  std::vector<std::complex<double>> nodes(N);
  for (int i = 0; i < N; ++i) nodes[i] = axis_point(fr, l0 * i / N);
  CurveProblem prob(g, std::move(nodes), M, /*pinned=*/false, {0, 0});
  ClosedLengthResult res = minimize(prob, opts);
  res.curve.closure = M;
  return res;
}

ClosedLengthResult two_point_length(const ConformalMetric& g, std::complex<double> a,
                                    std::complex<double> b, const CurveOptions& opts,
                                    const std::vector<std::complex<double>>* warm) {
  double d0 = hyp_dist(a, b);
  CurveOptions o = opts;
  if (o.nodes == 0) {
    o.min_nodes = 32;
    o.nodes_per_unit = opts.nodes_per_unit;
  }
  const int N = std::max(2, node_count(o, d0));
  std::vector<std::complex<double>> nodes;
  if (warm != nullptr && static_cast<int>(warm->size()) == N) {
    nodes = *warm;
    nodes[0] = a;
  } else {
    nodes.resize(N);
    for (int i = 0; i < N; ++i) nodes[i] = geodesic_point(a, b, d0 * i / N);
  }
  CurveProblem prob(g, std::move(nodes), DiskMapd::identity(), /*pinned=*/true, b);
  ClosedLengthResult res = minimize(prob, o);
  res.curve.closure = DiskMapd::identity();
  return res;
}

DoubleSpectrum build_double_spectrum(const ConformalMetric& g,
                                     const std::vector<ConjClass>& classes, double length_cap,
                                     const SpectrumOptions& opts) {
  char policy[64];
  std::snprintf(policy, sizeof(policy), "N=max(%d,ceil(%g*l0))", opts.curve.min_nodes,
                opts.curve.nodes_per_unit);

  std::string cache_path;
  if (!opts.cache_dir.empty()) {
    char name[128];
    std::snprintf(name, sizeof(name), "spectrum_%016llx_cap%.3f_%s.csv",
                  static_cast<unsigned long long>(g.hash()), length_cap, policy);
    cache_path = opts.cache_dir + "/" + name;
    if (auto cached = read_double_spectrum_csv(cache_path)) {
      if (cached->entries.size() == classes.size()) return *cached;
    }
  }

  DoubleSpectrum ds;
  ds.length_cap = length_cap;
  ds.metric_hash = g.hash();
  ds.n_policy = policy;
  ds.entries.resize(classes.size());
  parallel_for(classes.size(), opts.workers, [&](std::size_t i) {
    const ConjClass& c = classes[i];
    SpectrumEntry e;
    e.canon = c.canon;
    e.l0 = c.l0;
    if (g.eps() == 0.0 || g.phi().empty()) {
      e.lg = c.l0;
      e.residual = 0.0;
      e.ok = true;
    } else {
      try {
        ClosedLengthResult r = closed_length(g, c, opts.curve);
        e.lg = r.length;
        e.residual = r.residual;
        e.ok = r.converged || r.residual < 1e-6;
      } catch (const std::exception&) {
        e.ok = false;
        e.lg = c.l0;
        e.residual = 1e300;
      }
    }
    ds.entries[i] = std::move(e);
  });
  for (const auto& e : ds.entries)
    if (!e.ok) ++ds.failed;

  std::sort(ds.entries.begin(), ds.entries.end(), [](const SpectrumEntry& a, const SpectrumEntry& b) {
    if (a.l0 != b.l0) return a.l0 < b.l0;
    return a.canon < b.canon;
  });

  if (!cache_path.empty()) {
    std::filesystem::create_directories(opts.cache_dir);
    write_double_spectrum_csv(cache_path, ds);
  }
  return ds;
}

DoubleSpectrum base_spectrum(const std::vector<ConjClass>& classes, double length_cap) {
  DoubleSpectrum ds;
  ds.length_cap = length_cap;
  ds.metric_hash = 0;
  ds.n_policy = "exact";
  ds.entries.reserve(classes.size());
  for (const auto& c : classes) ds.entries.push_back({c.canon, c.l0, c.l0, 0.0, true});
  return ds;
}

void write_double_spectrum_csv(const std::string& path, const DoubleSpectrum& ds) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_double_spectrum_csv: cannot open " + path);
  f << "canonical_word,l0,lg,residual\n";
  char buf[64];
  for (const auto& e : ds.entries) {
    f << e.canon << ',';
    std::snprintf(buf, sizeof(buf), "%.17g", e.l0);
    f << buf << ',';
    std::snprintf(buf, sizeof(buf), "%.17g", e.lg);
    f << buf << ',';
    std::snprintf(buf, sizeof(buf), "%.6g", e.residual);
    f << buf << (e.ok ? "" : ",failed") << '\n';
  }
}

std::optional<DoubleSpectrum> read_double_spectrum_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) return std::nullopt;
  std::string line;
  if (!std::getline(f, line)) return std::nullopt;
  DoubleSpectrum ds;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    SpectrumEntry e;
    std::string tok;
    if (!std::getline(ss, e.canon, ',')) return std::nullopt;
    if (!std::getline(ss, tok, ',')) return std::nullopt;
    e.l0 = std::stod(tok);
    if (!std::getline(ss, tok, ',')) return std::nullopt;
    e.lg = std::stod(tok);
    if (!std::getline(ss, tok, ',')) return std::nullopt;
    e.residual = std::stod(tok);
    if (std::getline(ss, tok, ',')) e.ok = (tok != "failed");
    ds.entries.push_back(std::move(e));
  }
  for (const auto& e : ds.entries)
    if (!e.ok) ++ds.failed;
  return ds;
}

double xray_integral(const std::function<double(std::complex<double>)>& f, const ConjClass& c,
                     double panel) {
  const double l0 = c.l0;
  DiskMapd m = disk_map_from_sl2<double>(c.rep.m);
  AxisFrame fr = axis_frame(m);
  // composite 8-point Gauss-Legendre in arclength
  static const double gx[8] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                               -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                               0.7966664774136267,  0.9602898564975363};
  static const double gw[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                               0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                               0.2223810344533745, 0.1012285362903763};
  int np = std::max(1, static_cast<int>(std::ceil(l0 / panel)));
  double h = l0 / np;
  double total = 0;
  for (int p = 0; p < np; ++p) {
    double s0 = p * h;
    for (int q = 0; q < 8; ++q) {
      double s = s0 + 0.5 * h * (1.0 + gx[q]);
      total += 0.5 * h * gw[q] * f(axis_point(fr, s));
    }
  }
  return total;
}

double xray_integral(const ConformalFactor& phi, const ConjClass& c, double panel) {
  return xray_integral([&phi](std::complex<double> z) { return phi(z); }, c, panel);
}

}  // namespace mls
