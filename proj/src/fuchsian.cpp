#include "mls/fuchsian.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <unordered_map>

namespace mls {

namespace {

constexpr double kPi = 3.14159265358979323846;

int8_t letter_inv(int8_t l) { return static_cast<int8_t>(-l); }

char letter_char(int8_t l) {
  static const char pos[] = {'a', 'b', 'c', 'd'};
  static const char neg[] = {'A', 'B', 'C', 'D'};
  return l > 0 ? pos[l - 1] : neg[-l - 1];
}

int letter_rank(int8_t l) { return (std::abs(l) - 1) * 2 + (l > 0 ? 0 : 1); }

bool word_lex_less(const Word& a, const Word& b) {
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    int ra = letter_rank(a[i]), rb = letter_rank(b[i]);
    if (ra != rb) return ra < rb;
  }
  return a.size() < b.size();
}

}  // namespace

std::string word_string(const Word& w) {
  std::string s;
  s.reserve(w.size());
  for (int8_t l : w) s.push_back(letter_char(l));
  return s;
}

Word word_from_string(const std::string& s) {
  Word w;
  w.reserve(s.size());
  for (char c : s) {
    if (c >= 'a' && c <= 'd') w.push_back(static_cast<int8_t>(c - 'a' + 1));
    else if (c >= 'A' && c <= 'D') w.push_back(static_cast<int8_t>(-(c - 'A' + 1)));
    else throw std::invalid_argument("word_from_string: bad letter");
  }
  return w;
}

Word word_inverse(const Word& w) {
  Word r(w.rbegin(), w.rend());
  for (auto& l : r) l = letter_inv(l);
  return r;
}

Word word_free_reduce(const Word& w) {
  Word out;
  out.reserve(w.size());
  for (int8_t l : w) {
    if (!out.empty() && out.back() == letter_inv(l)) out.pop_back();
    else out.push_back(l);
  }
  return out;
}

Word word_cyclic_reduce(Word w) {
  w = word_free_reduce(w);
  while (w.size() >= 2 && w.front() == letter_inv(w.back())) {
    w.erase(w.begin());
    w.pop_back();
    w = word_free_reduce(w);
  }
  return w;
}

bool word_is_power(const Word& w) {
  const std::size_t n = w.size();
  for (std::size_t d = 1; d < n; ++d) {
    if (n % d != 0) continue;
    bool rep = true;
    for (std::size_t i = d; i < n && rep; ++i) rep = (w[i] == w[i % d]);
    if (rep) return true;
  }
  return false;
}

Mat2 mul_renorm(const Mat2& a, const Mat2& b) {
  // long double accumulation keeps products of thousands of generators tight
  long double r[4];
  r[0] = (long double)a(0, 0) * b(0, 0) + (long double)a(0, 1) * b(1, 0);
  r[1] = (long double)a(0, 0) * b(0, 1) + (long double)a(0, 1) * b(1, 1);
  r[2] = (long double)a(1, 0) * b(0, 0) + (long double)a(1, 1) * b(1, 0);
  r[3] = (long double)a(1, 0) * b(0, 1) + (long double)a(1, 1) * b(1, 1);
  long double det = r[0] * r[3] - r[1] * r[2];
  long double s = 1.0L / std::sqrt(det);
  Mat2 m;
  m(0, 0) = static_cast<double>(r[0] * s);
  m(0, 1) = static_cast<double>(r[1] * s);
  m(1, 0) = static_cast<double>(r[2] * s);
  m(1, 1) = static_cast<double>(r[3] * s);
  return m;
}

GroupElement group_mul(const GroupElement& a, const GroupElement& b) {
  GroupElement r;
  r.m = mul_renorm(a.m, b.m);
  r.word = a.word;
  r.word.insert(r.word.end(), b.word.begin(), b.word.end());
  r.word = word_free_reduce(r.word);
  return r;
}

GroupElement group_inv(const GroupElement& a) {
  GroupElement r;
  r.m << a.m(1, 1), -a.m(0, 1), -a.m(1, 0), a.m(0, 0);
  r.word = word_inverse(a.word);
  return r;
}

double translation_length(const DiskMapd& g) {
  double t = g.trace_abs();
  if (t <= 2.0) throw std::domain_error("translation_length: not a hyperbolic element");
  return 2.0 * std::acosh(0.5 * t);
}

double translation_length(const GroupElement& g) {
  double t = std::abs(g.m(0, 0) + g.m(1, 1));
  if (t <= 2.0) throw std::domain_error("translation_length: not a hyperbolic element");
  return 2.0 * std::acosh(0.5 * t);
}

std::pair<std::complex<double>, std::complex<double>> axis_endpoints(const GroupElement& g) {
  return axis_fixed_points(disk_map_from_sl2<double>(g.m));
}

// ---------------------------------------------------------------------------
// SurfaceGroup
// ---------------------------------------------------------------------------

SurfaceGroup SurfaceGroup::bolza() {
  SurfaceGroup G;
  const double ch = 1.0 + std::sqrt(2.0);             // cosh(L/2)
  const double sh = std::sqrt(2.0 + 2.0 * std::sqrt(2.0));  // sinh(L/2)
  for (int k = 0; k < 4; ++k) {
    double th = k * kPi / 4.0;
    DiskMapd t{std::complex<double>(ch, 0.0),
               std::complex<double>(sh * std::cos(th), sh * std::sin(th))};
    G.trans_disk_[k] = t;
    G.trans_[k].m = sl2_from_disk_map(t);
    G.trans_[k].word = {static_cast<int8_t>(k + 1)};
  }

  // Side maps: across side k (outward normal at angle k*pi/4) lies t_k * domain
  // for k < 4 and t_{k-4}^{-1} * domain for k >= 4.
  for (int k = 0; k < 8; ++k) {
    if (k < 4) {
      G.sides_[k] = G.trans_disk_[k];
      G.side_letter_[k] = static_cast<int8_t>(k + 1);
    } else {
      G.sides_[k] = G.trans_disk_[k - 4].inverse();
      G.side_letter_[k] = static_cast<int8_t>(-(k - 3));
    }
  }

  const double rho = std::sqrt(std::sqrt(2.0) - 1.0);  // euclid foot radius of the sides
  G.side_m_ = (1.0 + rho * rho) / (2.0 * rho);
  G.side_r_ = (1.0 - rho * rho) / (2.0 * rho);
  G.inradius_ = 2.0 * std::atanh(rho);
  G.circumradius_ = 2.0 * std::atanh(std::pow(2.0, -0.25));
  for (int k = 0; k < 8; ++k) {
    double a = (2 * k + 1) * kPi / 8.0;
    G.vertices_[k] = std::polar(std::pow(2.0, -0.25), a);
  }

  // Symplectic generators: a1 = t3^{-1}, b1 = t0^{-1}, a2 = t1^{-1} t2,
  // b2 = t3^{-1} t0^{-1} t1; then [a1,b1][a2,b2] = +-identity.
  auto from_word = [&G](const Word& w) {
    GroupElement e = GroupElement::identity();
    for (int8_t l : w) {
      const GroupElement& t = G.trans_[std::abs(l) - 1];
      e = group_mul(e, l > 0 ? t : group_inv(t));
    }
    return e;
  };
  GroupElement a1 = from_word({-4});
  GroupElement b1 = from_word({-1});
  GroupElement a2 = from_word({-2, 3});
  GroupElement b2 = from_word({-4, -1, 2});
  G.sympl_ = {a1, b1, a2, b2, group_inv(a1), group_inv(b1), group_inv(a2), group_inv(b2)};

  auto comm = [](const GroupElement& x, const GroupElement& y) {
    return group_mul(group_mul(x, y), group_mul(group_inv(x), group_inv(y)));
  };
  GroupElement rel = group_mul(comm(a1, b1), comm(a2, b2));
  Mat2 rp = rel.m - Mat2::Identity();
  Mat2 rm = rel.m + Mat2::Identity();
  G.relator_residual_ = std::min(rp.cwiseAbs().maxCoeff(), rm.cwiseAbs().maxCoeff());
  if (G.relator_residual_ > 1e-10)
    throw std::runtime_error("bolza(): genus-2 relator residual too large");

  G.build_star();
  return G;
}

// Boundary hysteresis: points within kEdgeTol of a side are treated as inside,
// so a reduction step cannot ping-pong across a side pair through roundoff.
static constexpr double kEdgeTol = 1e-12;

bool SurfaceGroup::in_domain(std::complex<double> z) const {
  if (std::norm(z) >= 1.0) return false;
  for (int k = 0; k < 8; ++k) {
    std::complex<double> c = std::polar(side_m_, k * kPi / 4.0);
    if (std::abs(z - c) < side_r_ - kEdgeTol) return false;
  }
  return true;
}

int SurfaceGroup::exit_side(std::complex<double> z) const {
  for (int k = 0; k < 8; ++k) {
    std::complex<double> c = std::polar(side_m_, k * kPi / 4.0);
    if (std::abs(z - c) < side_r_ - kEdgeTol) return k;
  }
  return -1;
}

std::complex<double> SurfaceGroup::reduce(std::complex<double> z, Word* letters) const {
  for (int guard = 0; guard < 4096; ++guard) {
    int k = exit_side(z);
    if (k < 0) return z;
    z = sides_[k].inverse().apply(z);
    if (letters) letters->push_back(side_letter_[k]);
  }
  throw std::runtime_error("SurfaceGroup::reduce failed to terminate");
}

DiskMapd SurfaceGroup::disk_map(const Word& w) const {
  DiskMapd m = DiskMapd::identity();
  for (int8_t l : w) {
    const DiskMapd& t = trans_disk_[std::abs(l) - 1];
    m = m * (l > 0 ? t : t.inverse());
    m.renormalize();
  }
  return m;
}

Mat2 SurfaceGroup::sl2(const Word& w) const {
  Mat2 m = Mat2::Identity();
  for (int8_t l : w) {
    const Mat2& t = trans_[std::abs(l) - 1].m;
    if (l > 0) m = mul_renorm(m, t);
    else m = mul_renorm(m, group_inv(trans_[std::abs(l) - 1]).m);
  }
  return m;
}

namespace {

// Sign-normalized quantized key of a disk map (g and -g identified).
std::array<int64_t, 4> qkey(const DiskMapd& g, double scale) {
  std::array<double, 4> v = {g.a.real(), g.a.imag(), g.b.real(), g.b.imag()};
  double sgn = 1.0;
  for (double x : v) {
    if (std::abs(x) > 1e-7) {
      sgn = x > 0 ? 1.0 : -1.0;
      break;
    }
  }
  std::array<int64_t, 4> k;
  for (int i = 0; i < 4; ++i) k[i] = llround(sgn * v[i] * scale);
  return k;
}

uint64_t mix_key(const std::array<int64_t, 4>& k) {
  uint64_t h = 1469598103934665603ull;
  for (int64_t x : k) {
    h ^= static_cast<uint64_t>(x);
    h *= 1099511628211ull;
  }
  return h;
}

bool same_isometry(const DiskMapd& x, const DiskMapd& y, double tol) {
  double dp = std::abs(x.a - y.a) + std::abs(x.b - y.b);
  double dm = std::abs(x.a + y.a) + std::abs(x.b + y.b);
  return std::min(dp, dm) < tol;
}

// Hash set of disk maps with tolerance-aware bucket probing.
class MapSet {
 public:
  explicit MapSet(double cell = 1e-4) : cell_(cell) {}

  // Returns true if inserted (i.e. not seen before).
  bool insert(const DiskMapd& g, std::vector<DiskMapd>& store) {
    std::array<double, 4> v = {g.a.real(), g.a.imag(), g.b.real(), g.b.imag()};
    double sgn = 1.0;
    for (double x : v)
      if (std::abs(x) > 1e-7) {
        sgn = x > 0 ? 1.0 : -1.0;
        break;
      }
    std::array<double, 4> w;
    for (int i = 0; i < 4; ++i) w[i] = sgn * v[i] / cell_;
    // probe all cells the point could fall in after tiny perturbations
    std::array<int64_t, 4> base;
    std::array<bool, 4> low, high;
    for (int i = 0; i < 4; ++i) {
      base[i] = static_cast<int64_t>(std::floor(w[i]));
      double frac = w[i] - std::floor(w[i]);
      low[i] = frac < 1e-3;
      high[i] = frac > 1.0 - 1e-3;
    }
    for (int mask = 0; mask < 16; ++mask) {
      std::array<int64_t, 4> cellk = base;
      bool valid = true;
      for (int i = 0; i < 4; ++i) {
        if (mask & (1 << i)) {
          if (low[i]) cellk[i] -= 1;
          else if (high[i]) cellk[i] += 1;
          else valid = false;
        }
      }
      if (!valid) continue;
      auto it = buckets_.find(mix_key(cellk));
      if (it == buckets_.end()) continue;
      for (uint32_t idx : it->second)
        if (same_isometry(store[idx], g, 1e-7)) return false;
    }
    store.push_back(g);
    buckets_[mix_key(base)].push_back(static_cast<uint32_t>(store.size() - 1));
    return true;
  }

 private:
  double cell_;
  std::unordered_map<uint64_t, std::vector<uint32_t>> buckets_;
};

}  // namespace

void SurfaceGroup::build_star() {
  // star1: tiles sharing at least one boundary point with the domain.
  // Collected by a small BFS over words, testing vertex/side contact.
  auto touches = [this](const DiskMapd& g) {
    for (int i = 0; i < 8; ++i) {
      std::complex<double> vi = g.apply(vertices_[i]);
      for (int j = 0; j < 8; ++j)
        if (std::abs(vi - vertices_[j]) < 1e-9) return true;
    }
    return false;
  };

  std::vector<DiskMapd> store;
  MapSet seen;
  std::vector<Word> words;
  seen.insert(DiskMapd::identity(), store);
  words.push_back({});
  std::size_t head = 0;
  while (head < store.size()) {
    DiskMapd g = store[head];
    Word w = words[head];
    ++head;
    if (w.size() >= 4) continue;
    for (int k = 0; k < 8; ++k) {
      DiskMapd g2 = g * sides_[k];
      g2.renormalize();
      if (displacement0(g2) > 4.0 * circumradius_) continue;
      if (seen.insert(g2, store)) {
        Word w2 = w;
        w2.push_back(side_letter_[k]);
        words.push_back(word_free_reduce(w2));
      }
    }
  }
  star1_.clear();
  for (std::size_t i = 0; i < store.size(); ++i)
    if (touches(store[i])) star1_.push_back(words[i]);

  // star2: products of two star1 words, deduplicated by tile.
  std::vector<DiskMapd> s2store;
  MapSet s2seen;
  star2_.clear();
  star2_disk_.clear();
  for (const Word& u : star1_) {
    DiskMapd gu = disk_map(u);
    for (const Word& v : star1_) {
      Word uv = u;
      uv.insert(uv.end(), v.begin(), v.end());
      uv = word_free_reduce(uv);
      DiskMapd g = gu * disk_map(v);
      g.renormalize();
      if (s2seen.insert(g, s2store)) {
        star2_.push_back(uv);
        star2_disk_.push_back(g);
      }
    }
  }
}

SurfaceGroup::Canonical SurfaceGroup::canonicalize(const Word& w) const {
  return canonicalize(disk_map(word_cyclic_reduce(w)));
}

SurfaceGroup::Canonical SurfaceGroup::canonicalize(const DiskMapd& g_in) const {
  if (g_in.trace_abs() <= 2.0 + 1e-12)
    throw std::domain_error("canonicalize: not a hyperbolic element");
  const double l0 = translation_length(g_in);

  // Step 1: conjugate until the axis passes through the (closed) domain.
  AxisFrame fr = axis_frame(g_in);
  Word red;
  reduce(fr.foot, &red);
  DiskMapd W = disk_map(red);
  DiskMapd g = W.inverse() * g_in * W;
  g.renormalize();
  fr = axis_frame(g);

  // Step 2: scan one period of the axis; candidate conjugators are the deck
  // words of the visited tiles extended by the two-step touching closure.
  struct Key {
    int64_t d;
    std::array<int64_t, 4> m;
    bool operator<(const Key& o) const {
      if (d != o.d) return d < o.d;
      return m < o.m;
    }
  };
  auto key_of = [](const DiskMapd& c) {
    AxisFrame f = axis_frame(c);
    return Key{llround(f.dist0 * 1e7), qkey(c, 1e6)};
  };

  bool have = false;
  Key best{};
  DiskMapd winner = g;
  auto consider = [&](const DiskMapd& c) {
    Key k = key_of(c);
    if (!have || k < best) {
      have = true;
      best = k;
      winner = c;
    }
  };

  const double step = 0.25;
  for (double s = 0.0; s < l0; s += step) {
    std::complex<double> p = axis_point(fr, s);
    Word rw;
    reduce(p, &rw);
    DiskMapd R = disk_map(rw);
    for (const DiskMapd& S : star2_disk_) {
      DiskMapd C = R * S;
      DiskMapd cand = C.inverse() * g * C;
      cand.renormalize();
      consider(cand);
      consider(cand.inverse());
    }
  }

  // Step 3: cutting sequence of the winner over one period. Crossings of the
  // reduced axis with the octagon sides are located analytically: the image
  // of the axis under a Mobius map Q crosses the side circle (c, r) at the
  // real roots of  |Q(t u) - c|^2 - r^2 |denominator|^2 = 0, a quadratic in
  // the diameter parameter t = tanh(s/2).
  Canonical out;
  out.l0 = l0;
  AxisFrame wf = axis_frame(winner);
  DiskMapd tf = translate_to_origin(wf.foot);
  std::complex<double> u0 = tf.deriv(wf.foot) * wf.dir;
  u0 /= std::abs(u0);
  DiskMapd rot{std::sqrt(u0), std::complex<double>(0, 0)};
  const DiskMapd axis_map = tf.inverse() * rot;  // t in (-1,1) -> axis point

  auto next_crossing = [this](const DiskMapd& q, double t_from, double t_to, int& side) {
    double best_t = 1e300;
    side = -1;
    for (int k = 0; k < 8; ++k) {
      std::complex<double> c = std::polar(side_m_, k * kPi / 4.0);
      std::complex<double> alpha = q.a - c * std::conj(q.b);
      std::complex<double> beta = q.b - c * std::conj(q.a);
      // f(t) = |alpha t + beta|^2 - r^2 |conj(b) t + conj(a)|^2
      double A = std::norm(alpha) - side_r_ * side_r_ * std::norm(q.b);
      double B = 2.0 * ((std::conj(alpha) * beta).real() -
                        side_r_ * side_r_ * (q.b * std::conj(q.a)).real());
      double C = std::norm(beta) - side_r_ * side_r_ * std::norm(q.a);
      double roots[2];
      int nr = 0;
      if (std::abs(A) < 1e-14 * (std::abs(B) + std::abs(C))) {
        if (B != 0.0) roots[nr++] = -C / B;
      } else {
        double disc = B * B - 4.0 * A * C;
        if (disc <= 0) continue;  // tangent or disjoint: no transversal crossing
        double sq = std::sqrt(disc);
        double q1 = -0.5 * (B + (B >= 0 ? sq : -sq));
        roots[nr++] = q1 / A;
        if (q1 != 0.0) roots[nr++] = C / q1;
      }
      for (int i = 0; i < nr; ++i) {
        double t = roots[i];
        if (t > t_from && t < t_to && t < best_t) {
          best_t = t;
          side = k;
        }
      }
    }
    return best_t;
  };

  Word cut;
  bool closed = false;
  for (double s0 : {1e-4, 1.37e-2, 7.89e-2}) {
    std::complex<double> p0 = axis_map.apply(std::tanh(0.5 * s0));
    Word vw;
    reduce(p0, &vw);
    DiskMapd Q = disk_map(vw).inverse() * axis_map;
    Q.renormalize();

    const double t_guard = 1e-13;
    double t_cur = std::tanh(0.5 * s0);
    const double t_end = std::tanh(0.5 * (s0 + l0));
    cut.clear();
    int guard = 0;
    bool stalled = false;
    while (true) {
      if (++guard > 10000) {
        stalled = true;
        break;
      }
      int side = -1;
      double t_hit = next_crossing(Q, t_cur + t_guard, t_end, side);
      if (side < 0) break;
      cut.push_back(side_letter_[side]);
      Q = sides_[side].inverse() * Q;
      Q.renormalize();
      t_cur = t_hit;
    }
    if (stalled) continue;
    cut = word_cyclic_reduce(cut);
    if (cut.empty()) continue;
    DiskMapd chk = disk_map(cut);
    if (std::abs(chk.trace_abs() - winner.trace_abs()) <
        1e-7 * std::max(1.0, winner.trace_abs())) {
      closed = true;
      break;
    }
  }
  if (!closed) throw std::runtime_error("canonicalize: cutting word does not close");

  // lex-min rotation over the word and its inverse
  Word bestw = cut;
  Word inv = word_cyclic_reduce(word_inverse(cut));
  for (const Word* cand : {const_cast<const Word*>(&cut), const_cast<const Word*>(&inv)}) {
    const std::size_t n = cand->size();
    for (std::size_t r = 0; r < n; ++r) {
      Word rotw(cand->begin() + r, cand->end());
      rotw.insert(rotw.end(), cand->begin(), cand->begin() + r);
      if (word_lex_less(rotw, bestw)) bestw = rotw;
    }
  }
  out.word = bestw;
  out.rep = disk_map(bestw);
  return out;
}

// ---------------------------------------------------------------------------
// Enumeration
// ---------------------------------------------------------------------------

std::vector<ConjClass> enumerate_classes(const SurfaceGroup& group, double length_cap,
                                         const EnumerateOptions& opts) {
  if (length_cap <= 0) throw std::invalid_argument("enumerate_classes: length_cap must be > 0");
  std::vector<ConjClass> out;

  const double rc = group.circumradius();
  const double D = 2.0 * std::asinh(std::cosh(rc) * std::sinh(0.5 * length_cap));
  const double Dacc = D + rc + 1e-6;

  int order[8] = {0, 1, 2, 3, 4, 5, 6, 7};
  if (opts.neighbor_order != 0) {
    for (int i = 0; i < 8; ++i) order[i] = (i * 3 + opts.neighbor_order) % 8;
  }

  std::vector<DiskMapd> store;
  store.reserve(1 << 20);
  MapSet seen;
  seen.insert(DiskMapd::identity(), store);
  std::size_t head = 0;
  while (head < store.size()) {
    DiskMapd g = store[head];
    ++head;
    for (int i = 0; i < 8; ++i) {
      DiskMapd g2 = g * group.side_map(order[i]);
      g2.renormalize();
      if (displacement0(g2) > Dacc) continue;
      if (store.size() >= opts.max_elements)
        throw std::runtime_error("enumerate_classes: element budget exceeded");
      seen.insert(g2, store);
    }
  }

  // Candidate filter and per-class dedup.
  MapSet predup;
  std::vector<DiskMapd> prestore;
  std::unordered_map<std::string, ConjClass> classes;
  const double tr_cap = 2.0 * std::cosh(0.5 * length_cap) + 1e-9;
  for (const DiskMapd& g : store) {
    double t = g.trace_abs();
    if (t <= 2.0 + 1e-12 || t > tr_cap) continue;
    // cheap pre-dedup: foot-reduced conjugate
    AxisFrame fr = axis_frame(g);
    Word red;
    group.reduce(fr.foot, &red);
    DiskMapd W = group.disk_map(red);
    DiskMapd gf = W.inverse() * g * W;
    gf.renormalize();
    if (!predup.insert(gf, prestore)) continue;

    auto canon = group.canonicalize(gf);
    std::string key = word_string(canon.word);
    auto it = classes.find(key);
    if (it != classes.end()) continue;
    ConjClass c;
    c.canon = key;
    c.rep.word = canon.word;
    c.rep.m = group.sl2(canon.word);
    c.l0 = translation_length(c.rep);
    c.primitive = !word_is_power(canon.word);
    if (std::abs(c.l0 - canon.l0) > 1e-7 * std::max(1.0, canon.l0))
      throw std::runtime_error("enumerate_classes: canonical length mismatch");
    if (c.l0 > length_cap + 1e-9) continue;
    classes.emplace(std::move(key), std::move(c));
    if (classes.size() > opts.max_classes)
      throw std::runtime_error("enumerate_classes: class budget exceeded");
  }

  out.reserve(classes.size());
  for (auto& [k, c] : classes) {
    if (!c.primitive && !opts.include_powers) continue;
    out.push_back(std::move(c));
  }
  std::sort(out.begin(), out.end(), [](const ConjClass& x, const ConjClass& y) {
    if (x.l0 != y.l0) return x.l0 < y.l0;
    return x.canon < y.canon;
  });
  return out;
}

void write_spectrum_csv(const std::string& path, const std::vector<ConjClass>& classes) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_spectrum_csv: cannot open " + path);
  f << "canonical_word,trace,l0\n";
  char buf[64];
  for (const auto& c : classes) {
    double tr = c.rep.m(0, 0) + c.rep.m(1, 1);
    f << c.canon << ',';
    std::snprintf(buf, sizeof(buf), "%.17g", std::abs(tr));
    f << buf << ',';
    std::snprintf(buf, sizeof(buf), "%.17g", c.l0);
    f << buf << '\n';
  }
}

}  // namespace mls
