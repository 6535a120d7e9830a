#pragma once

#include <cstdint>
#include <cmath>
#include <string_view>

namespace quantlets {

// Deterministic random stream used throughout the pipeline.  All stage-level
// streams are derived from one root seed plus a stable text label, so a run is
// reproducible bit-for-bit across platforms (no std::<distribution> involved).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {
    // decorrelate trivially related seeds
    next_u64();
    next_u64();
  }

  static Rng from_label(std::uint64_t root_seed, std::string_view label) {
    std::uint64_t h = 0x9e3779b97f4a7c15ull ^ root_seed;
    for (unsigned char c : label) {
      h ^= static_cast<std::uint64_t>(c);
      h *= 0x100000001b3ull;
      h ^= h >> 29;
    }
    return Rng(h);
  }

  Rng stream(std::uint64_t index) const {
    Rng r(state_ ^ (0xbf58476d1ce4e5b9ull * (index + 1)));
    return r;
  }

  std::uint64_t next_u64() {
    // splitmix64
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // uniform on (0,1), never returns 0 or 1
  double uniform() {
    const double u = (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    return u;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal();  // standard normal via inverse CDF (special.cpp)

  double gamma(double shape);  // shape >= 0, unit scale

  // inverse-gamma(a, b) with density b^a x^{-a-1} e^{-b/x} / Gamma(a)
  double inverse_gamma(double shape, double rate) { return rate / gamma(shape); }

 private:
  std::uint64_t state_;
};

}  // namespace quantlets
