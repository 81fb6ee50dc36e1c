#ifndef AE2LSTM_RNG_HPP
#define AE2LSTM_RNG_HPP

#include <cmath>
#include <cstdint>
#include <vector>

namespace ae2lstm {

// Deterministic, seedable generator used everywhere randomness is needed.
// Identical seeds yield identical draw sequences on every platform, which is
// what makes repeated seeded runs byte-reproducible. The platform default
// engines are never used.
//
// Algorithm: xoshiro256++ (Blackman & Vigna), with the four state words
// seeded from the 64-bit seed via successive splitmix64 outputs. Reals in
// [0,1) are taken from the top 53 bits of each output.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed) {
    std::uint64_t x = seed;
    for (auto& word : state_) word = splitmix64(x);
  }

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform double in [0, 1).
  double real01() { return double(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * real01(); }

  // Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n) {
    // Fixed-point multiply keeps this bias-free enough for shuffles and
    // index draws at our sizes, and is identical on every platform.
    using u128 = unsigned __int128;
    return std::uint64_t((u128(next_u64()) * u128(n)) >> 64);
  }

  // Standard normal via Box-Muller (std::normal_distribution is not
  // reproducible across standard libraries).
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = real01();
    double u2 = real01();
    while (u1 <= 0.0) u1 = real01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  // Fisher-Yates.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = std::size_t(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  // Derives an independent child stream; used to give each fold / model /
  // shuffle its own deterministic seed from a run seed.
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t x = seed ^ (0x9e3779b97f4a7c15ULL + stream);
    splitmix64(x);
    return splitmix64(x);
  }

  static std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t seed_;
  std::uint64_t state_[4];
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace ae2lstm

#endif
