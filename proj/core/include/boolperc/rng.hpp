#ifndef BOOLPERC_RNG_HPP_INCLUDED
#define BOOLPERC_RNG_HPP_INCLUDED

#include <cstdint>

namespace boolperc {

// splitmix64 finalizer. Bijective on 64 bits with full avalanche; the basis for
// both the counter stream and key derivation below.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Counter-based generator: output i of stream k is mix64(k + i*gamma).
// Streams with distinct keys are independent for all practical purposes, and a
// stream's outputs depend only on (key, counter), never on thread or call site.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t key) : state_(key) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~0ULL; }

  result_type operator()() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }

  // uniform double in [0, 1), 53-bit resolution
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::uint64_t state_;
};

// Splittable stream key. child(i) derives an independent substream; derivation
// is a pure function of (key, i), which is what makes replicate results
// independent of scheduling and worker count.
struct StreamKey {
  std::uint64_t v = 0;

  StreamKey child(std::uint64_t i) const {
    return StreamKey{mix64(v ^ mix64(i + 0x632be59bd9b4e019ULL))};
  }

  Rng rng() const { return Rng(v); }
};

inline StreamKey master_stream(std::uint64_t seed) {
  return StreamKey{mix64(seed + 0x9e3779b97f4a7c15ULL)};
}

}  // namespace boolperc

#endif
