#ifndef RAIDPH_RNG_HPP
#define RAIDPH_RNG_HPP

#include <cmath>
#include <cstdint>

namespace raidph {

// Counter-based random stream (SplitMix64 over an incrementing counter).
// A stream is fully determined by (seed, stream index), so replication k
// of a simulation can be given substream(seed, k) and produces identical
// output no matter in what order replications execute.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0)
      : base_(mix(seed ^ mix(stream + 0x9e3779b97f4a7c15ULL))), counter_(0) {}

  static RngStream substream(std::uint64_t master_seed, std::uint64_t index) {
    return RngStream(master_seed, index + 1);
  }

  std::uint64_t next_u64() { return mix(base_ + (++counter_) * kGolden); }

  // Uniform on (0, 1]; never returns 0 so -log(u) is always finite.
  double uniform01() {
    const std::uint64_t bits = next_u64() >> 11;  // 53 bits
    return (static_cast<double>(bits) + 1.0) * 0x1.0p-53;
  }

  double exponential(double rate) { return -std::log(uniform01()) / rate; }

  // Index of one of `n` categories with the given (unnormalized) weights.
  template <typename Weights>
  int categorical(const Weights& w, int n) {
    double total = 0.0;
    for (int i = 0; i < n; ++i) total += w[i];
    double u = uniform01() * total;
    for (int i = 0; i < n; ++i) {
      u -= w[i];
      if (u <= 0.0) return i;
    }
    return n - 1;
  }

 private:
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

  static std::uint64_t mix(std::uint64_t z) {
    z += kGolden;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t base_;
  std::uint64_t counter_;
};

}  // namespace raidph

#endif
