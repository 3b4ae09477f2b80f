#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <map>
#include <set>

#include "mls/fuchsian.hpp"
#include "mls/rng.hpp"

using namespace mls;

namespace {

const SurfaceGroup& bolza() {
  static SurfaceGroup g = SurfaceGroup::bolza();
  return g;
}

Word random_word(const CounterRng& rng, uint64_t& ctr, int len) {
  Word w;
  while (static_cast<int>(w.size()) < len) {
    int8_t l = static_cast<int8_t>(1 + (rng.bits(ctr++) % 4));
    if (rng.bits(ctr++) & 1) l = -l;
    if (!w.empty() && w.back() == static_cast<int8_t>(-l)) continue;
    w.push_back(l);
  }
  return w;
}

GroupElement element_of(const SurfaceGroup& G, const Word& w) {
  GroupElement e = GroupElement::identity();
  for (int8_t l : w) {
    const GroupElement& t = G.translations()[std::abs(l) - 1];
    e = group_mul(e, l > 0 ? t : group_inv(t));
  }
  return e;
}

}  // namespace

TEST_CASE("relator and generator traces") {
  const auto& G = bolza();
  CHECK(G.relator_residual() < 1e-10);
  for (const auto& g : G.generators()) CHECK(std::abs(g.m(0, 0) + g.m(1, 1)) > 2.0);
  for (const auto& t : G.translations()) {
    double tr = std::abs(t.m(0, 0) + t.m(1, 1));
    CHECK(tr == doctest::Approx(2.0 * (1.0 + std::sqrt(2.0))).epsilon(1e-14));
  }
}

TEST_CASE("translation length identities") {
  const auto& G = bolza();
  const GroupElement& a = G.translations()[0];
  const GroupElement& b = G.translations()[1];
  double la = translation_length(a);
  CHECK(la == doctest::Approx(2.0 * std::acosh(1.0 + std::sqrt(2.0))).epsilon(1e-13));

  // conjugation invariance to machine precision
  GroupElement h = group_mul(b, group_inv(a));
  GroupElement conj = group_mul(group_mul(h, a), group_inv(h));
  CHECK(translation_length(conj) == doctest::Approx(la).epsilon(1e-12));

  // power rule l(g^n) = n l(g), n <= 5
  GroupElement p = a;
  for (int n = 2; n <= 5; ++n) {
    p = group_mul(p, a);
    CHECK(std::abs(translation_length(p) - n * la) < 1e-9);
  }

  CHECK_THROWS_AS(translation_length(GroupElement::identity()), std::domain_error);
}

TEST_CASE("determinant drift over 1e6 products") {
  const auto& G = bolza();
  CounterRng rng(7);
  uint64_t ctr = 0;
  Mat2 m = Mat2::Identity();
  double worst = 0.0;
  for (int i = 0; i < 1000000; ++i) {
    int8_t l = static_cast<int8_t>(1 + (rng.bits(ctr++) % 4));
    const GroupElement& t = G.translations()[l - 1];
    m = mul_renorm(m, (rng.bits(ctr++) & 1) ? t.m : group_inv(t).m);
    if ((i & 1023) == 0) worst = std::max(worst, std::abs(m.determinant() - 1.0));
  }
  worst = std::max(worst, std::abs(m.determinant() - 1.0));
  CHECK(worst < 1e-9);
}

TEST_CASE("axis endpoints") {
  const auto& G = bolza();
  const GroupElement& a = G.translations()[0];
  auto [zp, zm] = axis_endpoints(a);
  CHECK(std::abs(std::abs(zp) - 1.0) < 1e-12);
  CHECK(std::abs(std::abs(zm) - 1.0) < 1e-12);

  // the Mobius action fixes both endpoints
  DiskMapd da = disk_map_from_sl2<double>(a.m);
  CHECK(std::abs(da.apply(zp) - zp) < 1e-10);
  CHECK(std::abs(da.apply(zm) - zm) < 1e-10);

  // inverse swaps attracting/repelling
  auto [ip, im] = axis_endpoints(group_inv(a));
  CHECK(std::abs(ip - zm) < 1e-10);
  CHECK(std::abs(im - zp) < 1e-10);

  // equivariance under conjugation
  GroupElement h = group_mul(G.translations()[2], G.translations()[1]);
  auto [cp, cm] = axis_endpoints(group_mul(group_mul(h, a), group_inv(h)));
  DiskMapd dh = disk_map_from_sl2<double>(h.m);
  CHECK(std::abs(cp - dh.apply(zp)) < 1e-9);
  CHECK(std::abs(cm - dh.apply(zm)) < 1e-9);

  // power iteration converges to the attracting endpoint
  std::complex<double> w(0.11, -0.07);
  for (int i = 0; i < 200; ++i) w = da.apply(w);
  CHECK(std::abs(w - zp) < 1e-8);
}

TEST_CASE("deck reduction moves points into the domain") {
  const auto& G = bolza();
  CounterRng rng(11);
  uint64_t ctr = 0;
  for (int i = 0; i < 200; ++i) {
    Word w = random_word(rng, ctr, 1 + static_cast<int>(rng.bits(ctr++) % 6));
    DiskMapd g = G.disk_map(w);
    std::complex<double> z = std::polar(0.4 * rng.u01(ctr++), 6.2831 * rng.u01(ctr++));
    std::complex<double> moved = g.apply(z);
    Word letters;
    std::complex<double> back = G.reduce(moved, &letters);
    CHECK(G.in_domain(back));
    // reduction letters give moved = W * back
    CHECK(std::abs(G.disk_map(letters).apply(back) - moved) < 1e-9);
  }
}

TEST_CASE("canonicalization: idempotent and conjugation-invariant (fuzz)") {
  const auto& G = bolza();
  CounterRng rng(23);
  uint64_t ctr = 0;
  int checked = 0;
  for (int i = 0; i < 10000; ++i) {
    Word w = random_word(rng, ctr, 1 + static_cast<int>(rng.bits(ctr++) % 12));
    Word wc = word_cyclic_reduce(w);
    if (wc.empty()) continue;
    auto c1 = G.canonicalize(wc);
    // conjugate by a random short word
    Word s = random_word(rng, ctr, 1 + static_cast<int>(rng.bits(ctr++) % 4));
    Word conj = s;
    conj.insert(conj.end(), wc.begin(), wc.end());
    Word si = word_inverse(s);
    conj.insert(conj.end(), si.begin(), si.end());
    auto c2 = G.canonicalize(conj);
    REQUIRE(word_string(c1.word) == word_string(c2.word));
    // idempotence
    auto c3 = G.canonicalize(c1.word);
    REQUIRE(word_string(c3.word) == word_string(c1.word));
    ++checked;
  }
  CHECK(checked > 9000);
}

TEST_CASE("enumeration: systole, counts, invariances") {
  const auto& G = bolza();
  const double systole = 2.0 * std::acosh(1.0 + std::sqrt(2.0));

  // below the systole: empty
  CHECK(enumerate_classes(G, 0.9 * systole).empty());

  auto classes = enumerate_classes(G, 6.0);
  REQUIRE(!classes.empty());
  CHECK(classes.front().l0 == doctest::Approx(systole).epsilon(1e-10));

  // the Bolza systole has multiplicity 12 (unoriented classes)
  int msys = 0;
  for (const auto& c : classes)
    if (std::abs(c.l0 - systole) < 1e-8) ++msys;
  CHECK(msys == 12);

  // systole from an independent brute-force word/trace oracle
  double best = 1e300;
  const auto& T = G.translations();
  std::function<void(Mat2, int, int)> dfs = [&](Mat2 m, int last, int depth) {
    if (depth == 0) return;
    for (int l = 1; l <= 4; ++l) {
      for (int s = -1; s <= 1; s += 2) {
        int8_t letter = static_cast<int8_t>(s * l);
        if (last == -letter) continue;
        Mat2 m2 = mul_renorm(m, s > 0 ? T[l - 1].m : group_inv(T[l - 1]).m);
        double tr = std::abs(m2(0, 0) + m2(1, 1));
        if (tr > 2.0 + 1e-9) best = std::min(best, 2.0 * std::acosh(0.5 * tr));
        dfs(m2, letter, depth - 1);
      }
    }
  };
  dfs(Mat2::Identity(), 0, 8);
  CHECK(classes.front().l0 == doctest::Approx(best).epsilon(1e-10));

  // neighbor-order invariance of the class count
  EnumerateOptions opts;
  opts.neighbor_order = 3;
  auto classes2 = enumerate_classes(G, 6.0, opts);
  REQUIRE(classes2.size() == classes.size());
  for (std::size_t i = 0; i < classes.size(); ++i) CHECK(classes[i].canon == classes2[i].canon);

  // multiplicity structure: every length value shared by >= 2 classes
  std::map<long long, int> mult;
  for (const auto& c : classes) mult[llround(c.l0 * 1e9)]++;
  for (const auto& [len, m] : mult) CHECK(m >= 2);
}

TEST_CASE("enumeration: growth trend and powers") {
  const auto& G = bolza();
  // unoriented primitive count: N(T) * T / e^T should drift toward 1/2
  double prev = 1e300;
  for (double T : {6.0, 8.0}) {
    auto cl = enumerate_classes(G, T);
    double ratio = cl.size() * T / std::exp(T);
    CHECK(ratio < prev);
    CHECK(ratio > 0.3);
    CHECK(ratio < 1.5);
    prev = ratio;
  }

  // include_powers surfaces the squares of the systoles at cap 2*systole
  EnumerateOptions opts;
  opts.include_powers = true;
  double cap = 2.0 * 2.0 * std::acosh(1.0 + std::sqrt(2.0)) + 0.05;
  auto with_powers = enumerate_classes(G, cap, opts);
  int nonprim = 0;
  for (const auto& c : with_powers)
    if (!c.primitive) ++nonprim;
  CHECK(nonprim == 12);
  auto prim_only = enumerate_classes(G, cap);
  CHECK(with_powers.size() == prim_only.size() + 12);
}

TEST_CASE("class words rebuild to matching traces") {
  const auto& G = bolza();
  auto classes = enumerate_classes(G, 5.0);
  for (const auto& c : classes) {
    GroupElement e = element_of(G, c.rep.word);
    double tr1 = std::abs(e.m(0, 0) + e.m(1, 1));
    double tr2 = std::abs(c.rep.m(0, 0) + c.rep.m(1, 1));
    CHECK(tr1 == doctest::Approx(tr2).epsilon(1e-12));
    CHECK(c.l0 == doctest::Approx(2.0 * std::acosh(0.5 * tr1)).epsilon(1e-12));
  }
}

TEST_CASE("spectrum csv roundtrip fields") {
  const auto& G = bolza();
  auto classes = enumerate_classes(G, 4.0);
  write_spectrum_csv("test_spectrum.csv", classes);
  // sorted ascending by l0
  for (std::size_t i = 1; i < classes.size(); ++i) CHECK(classes[i - 1].l0 <= classes[i].l0);
}
