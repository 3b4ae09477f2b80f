// Counter-based deterministic random source: every draw is a pure function of
// (seed, stream, counter), so parallel jobs reproduce bit-for-bit regardless
// of scheduling.
#pragma once

#include <cstdint>
#include <cmath>

namespace mls {

namespace detail {
inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}
}  // namespace detail

class CounterRng {
 public:
  CounterRng(uint64_t seed, uint64_t stream = 0)
      : key_(detail::splitmix64(seed ^ detail::splitmix64(stream + 0x632be59bd9b4e019ull))) {}

  uint64_t bits(uint64_t counter) const {
    return detail::splitmix64(detail::splitmix64(counter + 0x9e3779b97f4a7c15ull) ^ key_);
  }

  // uniform in [0, 1)
  double u01(uint64_t counter) const { return (bits(counter) >> 11) * 0x1.0p-53; }

  // standard normal (Box-Muller; uses counters 2k, 2k+1)
  double normal(uint64_t counter) const {
    double u1 = u01(2 * counter);
    double u2 = u01(2 * counter + 1);
    double r = std::sqrt(-2.0 * std::log(1.0 - u1));
    return r * std::cos(6.283185307179586 * u2);
  }

 private:
  uint64_t key_;
};

}  // namespace mls
