#include "srwin/gf2.hpp"

#include <bit>
#include <limits>
#include <stdexcept>

namespace srwin::gf2 {

namespace {
constexpr std::size_t kNoRow = std::numeric_limits<std::size_t>::max();
}

BitMask::BitMask(std::size_t nbits) : nbits_(nbits), words_((nbits + 63) / 64, 0) {}

BitMask BitMask::from_string(std::string_view bits) {
  BitMask mask(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] == '1') {
      mask.set(i);
    } else if (bits[i] != '0') {
      throw std::invalid_argument("bit string may only contain '0' and '1'");
    }
  }
  return mask;
}

void BitMask::set(std::size_t i, bool value) {
  const std::uint64_t bit = std::uint64_t{1} << (i % 64);
  if (value) {
    words_[i / 64] |= bit;
  } else {
    words_[i / 64] &= ~bit;
  }
}

bool BitMask::none() const {
  for (auto w : words_) {
    if (w != 0) return false;
  }
  return true;
}

std::size_t BitMask::count() const {
  std::size_t n = 0;
  for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

std::size_t BitMask::lowest_set() const {
  for (std::size_t w = 0; w < words_.size(); ++w) {
    if (words_[w] != 0) {
      return w * 64 + static_cast<std::size_t>(std::countr_zero(words_[w]));
    }
  }
  return nbits_;
}

BitMask& BitMask::operator^=(const BitMask& other) {
  if (other.nbits_ != nbits_) {
    throw std::invalid_argument("BitMask width mismatch");
  }
  for (std::size_t w = 0; w < words_.size(); ++w) words_[w] ^= other.words_[w];
  return *this;
}

void BitMask::trim() {
  if (nbits_ % 64 != 0 && !words_.empty()) {
    words_.back() &= (std::uint64_t{1} << (nbits_ % 64)) - 1;
  }
}

std::string BitMask::to_string() const {
  std::string out(nbits_, '0');
  for (std::size_t i = 0; i < nbits_; ++i) {
    if (test(i)) out[i] = '1';
  }
  return out;
}

void xor_into(std::span<std::byte> dst, std::span<const std::byte> src) {
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] ^= src[i];
}

Decoder::Decoder(std::size_t block_size, std::size_t payload_length)
    : block_size_(block_size), payload_length_(payload_length), pivot_row_(block_size, kNoRow) {
  if (block_size == 0) throw std::invalid_argument("block size must be positive");
  rows_.reserve(block_size);
  if (payload_length_ > 0) payloads_.reserve(block_size);
}

bool Decoder::absorb(const BitMask& mask, std::span<const std::byte> payload) {
  if (mask.size() != block_size_) {
    throw std::invalid_argument("mask length " + std::to_string(mask.size()) +
                                " does not match block size " + std::to_string(block_size_));
  }
  if (payload.size() != payload_length_ && !(payload.empty() && payload_length_ == 0)) {
    throw std::invalid_argument("payload length does not match decoder configuration");
  }
  if (is_full_rank()) return false;

  BitMask row = mask;
  std::vector<std::byte> data(payload.begin(), payload.end());

  // Eliminate every pivot column present in the incoming row. Stored rows
  // only carry bits at or above their pivot, so a single ascending sweep
  // visits each pivot once.
  auto words = row.words();
  for (std::size_t w = 0; w < words.size(); ++w) {
    std::uint64_t pending = words[w];
    while (pending != 0) {
      const auto bit = w * 64 + static_cast<std::size_t>(std::countr_zero(pending));
      pending &= pending - 1;
      const auto r = pivot_row_[bit];
      if (r == kNoRow) continue;
      row ^= rows_[r];
      if (payload_length_ > 0) xor_into(data, payloads_[r]);
      // Only bits above `bit` in this word can have changed.
      pending = words[w] & ~((bit % 64 == 63) ? ~std::uint64_t{0}
                                               : ((std::uint64_t{1} << (bit % 64 + 1)) - 1));
    }
  }

  const auto pivot = row.lowest_set();
  if (pivot == block_size_) return false;

  // Clear the new pivot column from existing rows to keep full reduction.
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    if (rows_[r].test(pivot)) {
      rows_[r] ^= row;
      if (payload_length_ > 0) xor_into(payloads_[r], data);
    }
  }
  pivot_row_[pivot] = rows_.size();
  rows_.push_back(std::move(row));
  if (payload_length_ > 0) payloads_.push_back(std::move(data));
  return true;
}

std::vector<std::vector<std::byte>> Decoder::decode() const {
  if (!is_full_rank()) {
    throw std::logic_error("decode requires a full-rank block (rank " + std::to_string(rank()) +
                           " of " + std::to_string(block_size_) + ")");
  }
  // Fully reduced and full rank: row with pivot i is the unit vector e_i.
  std::vector<std::vector<std::byte>> out(block_size_);
  for (std::size_t bit = 0; bit < block_size_; ++bit) {
    const auto r = pivot_row_[bit];
    out[bit] = payload_length_ > 0 ? payloads_[r] : std::vector<std::byte>{};
  }
  return out;
}

}  // namespace srwin::gf2
