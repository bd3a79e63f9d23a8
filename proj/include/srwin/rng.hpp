#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

#include "srwin/gf2.hpp"

namespace srwin {

/// splitmix64 output finalizer (a 64-bit avalanche mix).
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

/// Independent random streams derived from one master seed.
enum class Stream : std::uint64_t {
  kForwardLoss = 1,
  kFeedbackLoss = 2,
  kCodingMask = 3,
  kMonteCarlo = 4,
};

constexpr std::uint64_t stream_seed(std::uint64_t master, Stream stream) {
  return mix64(master + kGolden * static_cast<std::uint64_t>(stream));
}

/// Bernoulli draws from a 64-bit Mersenne Twister. The uniform variate is
/// built from the top 53 bits so the sequence is identical on every
/// standard library.
class BernoulliSource {
 public:
  explicit BernoulliSource(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  bool draw(double probability) { return uniform() < probability; }
  std::uint64_t bits() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

/// Coefficient mask of coded packet (block_seq, tx_index), uniform over
/// all 2^block_size subsets. Sender and receiver both call this with the
/// same coding seed, so masks never travel on the wire.
gf2::BitMask mask_from(std::uint64_t coding_seed, std::uint64_t block_seq,
                       std::uint64_t tx_index, std::size_t block_size);

/// Fills `mask` with uniformly random bits from `source`.
void random_mask(BernoulliSource& source, gf2::BitMask& mask);

}  // namespace srwin
