#include "srwin/rng.hpp"

namespace srwin {

gf2::BitMask mask_from(std::uint64_t coding_seed, std::uint64_t block_seq,
                       std::uint64_t tx_index, std::size_t block_size) {
  const std::uint64_t key =
      mix64(mix64(coding_seed ^ mix64(block_seq + kGolden)) ^ mix64(tx_index + 2 * kGolden));
  gf2::BitMask mask(block_size);
  auto words = mask.words();
  for (std::size_t w = 0; w < words.size(); ++w) {
    words[w] = mix64(key + (w + 1) * kGolden);
  }
  mask.trim();
  return mask;
}

void random_mask(BernoulliSource& source, gf2::BitMask& mask) {
  for (auto& w : mask.words()) w = source.bits();
  mask.trim();
}

}  // namespace srwin
