#include "srwin/montecarlo.hpp"

#include <cmath>

#include "srwin/gf2.hpp"
#include "srwin/rng.hpp"

namespace srwin::montecarlo {

namespace {

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial) {
  return mix64(stream_seed(seed, Stream::kMonteCarlo) + trial * kGolden);
}

bool full_rank_trial(std::uint32_t block_size, std::uint32_t extra, std::uint64_t seed) {
  BernoulliSource rng(seed);
  gf2::Decoder decoder(block_size);
  gf2::BitMask mask(block_size);
  for (std::uint32_t i = 0; i < block_size + extra && !decoder.is_full_rank(); ++i) {
    random_mask(rng, mask);
    decoder.absorb(mask);
  }
  return decoder.is_full_rank();
}

std::uint64_t draws_trial(std::uint32_t block_size, std::uint64_t seed) {
  BernoulliSource rng(seed);
  gf2::Decoder decoder(block_size);
  gf2::BitMask mask(block_size);
  std::uint64_t draws = 0;
  while (!decoder.is_full_rank()) {
    random_mask(rng, mask);
    decoder.absorb(mask);
    ++draws;
  }
  return draws;
}

}  // namespace

double Proportion::rate() const {
  return trials == 0 ? 0.0 : static_cast<double>(successes) / static_cast<double>(trials);
}

double Proportion::stderr_() const {
  if (trials == 0) return 0.0;
  const double r = rate();
  return std::sqrt(r * (1.0 - r) / static_cast<double>(trials));
}

Proportion full_rank_rate(std::uint32_t block_size, std::uint32_t extra, std::uint64_t trials,
                          std::uint64_t seed) {
  std::uint64_t hits = 0;
#pragma omp parallel for reduction(+ : hits) schedule(static)
  for (std::int64_t t = 0; t < static_cast<std::int64_t>(trials); ++t) {
    if (full_rank_trial(block_size, extra, trial_seed(seed, static_cast<std::uint64_t>(t)))) ++hits;
  }
  return {hits, trials};
}

Proportion full_rank_rate_serial(std::uint32_t block_size, std::uint32_t extra,
                                 std::uint64_t trials, std::uint64_t seed) {
  std::uint64_t hits = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    if (full_rank_trial(block_size, extra, trial_seed(seed, t))) ++hits;
  }
  return {hits, trials};
}

double mean_draws_to_full_rank(std::uint32_t block_size, std::uint64_t trials, std::uint64_t seed) {
  std::uint64_t total = 0;
#pragma omp parallel for reduction(+ : total) schedule(static)
  for (std::int64_t t = 0; t < static_cast<std::int64_t>(trials); ++t) {
    total += draws_trial(block_size, trial_seed(seed, static_cast<std::uint64_t>(t)));
  }
  return static_cast<double>(total) / static_cast<double>(trials);
}

double mean_draws_to_full_rank_serial(std::uint32_t block_size, std::uint64_t trials,
                                      std::uint64_t seed) {
  std::uint64_t total = 0;
  for (std::uint64_t t = 0; t < trials; ++t) total += draws_trial(block_size, trial_seed(seed, t));
  return static_cast<double>(total) / static_cast<double>(trials);
}

}  // namespace srwin::montecarlo
