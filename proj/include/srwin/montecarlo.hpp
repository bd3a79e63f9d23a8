#pragma once

#include <cstdint>

namespace srwin::montecarlo {

struct Proportion {
  std::uint64_t successes = 0;
  std::uint64_t trials = 0;

  double rate() const;
  /// Binomial standard error sqrt(rate (1 - rate) / trials).
  double stderr_() const;
};

/// Fraction of trials in which `block_size + extra` uniformly random
/// GF(2) masks reach rank `block_size`. Trial i draws from a generator
/// seeded by (seed, i), so the result does not depend on the thread count.
Proportion full_rank_rate(std::uint32_t block_size, std::uint32_t extra, std::uint64_t trials,
                          std::uint64_t seed);

/// Single-threaded reference for full_rank_rate; must agree exactly.
Proportion full_rank_rate_serial(std::uint32_t block_size, std::uint32_t extra,
                                 std::uint64_t trials, std::uint64_t seed);

/// Mean number of uniformly random masks (empty mask included) drawn until
/// rank `block_size`, over `trials` blocks.
double mean_draws_to_full_rank(std::uint32_t block_size, std::uint64_t trials, std::uint64_t seed);
double mean_draws_to_full_rank_serial(std::uint32_t block_size, std::uint64_t trials,
                                      std::uint64_t seed);

}  // namespace srwin::montecarlo
