#pragma once
// Seedable, stream-splittable random source. Deliberately exposes only
// integer draws: every randomized decision in the samplers is an exact
// integer Bernoulli or a bias-free bounded draw, never a floating-point
// comparison. Draw counters support the exactness audit in the tests.

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

namespace pdcsq {

class RngStream {
 public:
  RngStream() : RngStream(0, 0) {}
  RngStream(std::uint64_t seed, std::uint64_t stream) {
    // splitmix64 expansion of (seed, stream) into xoshiro256++ state
    std::uint64_t x = seed * 0x9E3779B97F4A7C15ull + (stream + 1) * 0xBF58476D1CE4E5B9ull;
    for (auto& s : state_) {
      x += 0x9E3779B97F4A7C15ull;
      std::uint64_t z = x;
      z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
      z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
      s = z ^ (z >> 31);
    }
    if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    ++rawDraws_;
    return result;
  }

  // Uniform integer in [0, bound), bias-free: rejects the top remainder
  // of the 64-bit range instead of reducing modulo.
  std::uint64_t below(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("below(0)");
    ++boundedDraws_;
    const std::uint64_t limit = 0ull - (0ull - bound) % bound;  // largest multiple of bound
    if (limit == 0) return next() % bound;                      // bound is a power of two divisor
    std::uint64_t v;
    do {
      v = next();
    } while (v >= limit);
    return v % bound;
  }

  // Exact Bernoulli(successes/trials) without floating point.
  bool bernoulli(std::uint64_t successes, std::uint64_t trials) {
    if (trials == 0 || successes > trials)
      throw std::invalid_argument("bernoulli: successes must be in 0..trials");
    ++bernoulliDraws_;
    return below(trials) < successes;
  }

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  std::uint64_t rawDraws() const { return rawDraws_; }
  std::uint64_t boundedDraws() const { return boundedDraws_; }
  std::uint64_t bernoulliDraws() const { return bernoulliDraws_; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t state_[4];
  std::uint64_t rawDraws_ = 0;
  std::uint64_t boundedDraws_ = 0;
  std::uint64_t bernoulliDraws_ = 0;
};

}  // namespace pdcsq
