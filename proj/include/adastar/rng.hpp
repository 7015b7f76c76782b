#ifndef ADASTAR_RNG_HPP
#define ADASTAR_RNG_HPP

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <optional>

namespace adastar {

// Counter-based deterministic randomness. Every random decision in a run is
// drawn from a stream derived from (seed, tag, context words), so outcomes do
// not depend on evaluation order or thread count.

constexpr std::uint64_t kGolden64 = 0x9E3779B97F4A7C15ull;

// splitmix64 finalizer
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

enum class StreamTag : std::uint64_t {
  Generation = 1,    // hit/miss draw for one CoT sample
  CotTokens = 2,     // generated-token count for one sample
  Difficulty = 3,    // latent difficulty when corpus meta lacks one
  EvalDraw = 4,      // one seeded draw per held-out item per eval
  HoldoutSplit = 5,  // train/eval partition
  DrawOrder = 6,     // per-iteration uniform draw order (random variants)
  Downsample = 7,    // re-random-sampling of accepted examples
  SynthCorpus = 8,   // make-synth difficulty sampling
  StubServer = 9,    // stub LM server behavior
};

class RngStream {
 public:
  explicit RngStream(std::uint64_t state) : state_(state) {}

  std::uint64_t next_u64() {
    state_ += kGolden64;
    return mix64(state_);
  }

  // [0, 1) with 53 random bits
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return next_unit() < p; }

  // inclusive bounds; modulo bias is irrelevant at simulation ranges
  std::int64_t next_int(std::int64_t lo, std::int64_t hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(next_u64() % span);
  }

  double next_normal() {
    if (spare_) {
      const double v = *spare_;
      spare_.reset();
      return v;
    }
    // Box-Muller; first uniform nudged away from zero
    const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = next_unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(theta);
    return r * std::cos(theta);
  }

 private:
  std::uint64_t state_;
  std::optional<double> spare_;
};

inline std::uint64_t fold_in(std::uint64_t state, std::uint64_t word) {
  return mix64(state ^ mix64(word + kGolden64));
}

inline RngStream substream(std::uint64_t seed, StreamTag tag,
                           std::initializer_list<std::uint64_t> path = {}) {
  std::uint64_t s = fold_in(seed, static_cast<std::uint64_t>(tag));
  for (const std::uint64_t w : path) s = fold_in(s, w);
  return RngStream(s);
}

template <typename Vec>
void shuffle(Vec& v, RngStream& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.next_int(0, static_cast<std::int64_t>(i) - 1));
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace adastar

#endif
