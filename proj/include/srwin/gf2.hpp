#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace srwin::gf2 {

/// Fixed-width bit vector over GF(2). Bit i marks original packet i of a
/// coding block as a member of the XOR'ed subset.
class BitMask {
 public:
  BitMask() = default;
  explicit BitMask(std::size_t nbits);

  /// Builds a mask from a string of '0'/'1' characters, leftmost = bit 0.
  static BitMask from_string(std::string_view bits);

  std::size_t size() const { return nbits_; }
  bool test(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1U; }
  void set(std::size_t i, bool value = true);
  void flip(std::size_t i) { words_[i / 64] ^= std::uint64_t{1} << (i % 64); }

  bool none() const;
  std::size_t count() const;

  /// Lowest set bit, or size() when the mask is empty.
  std::size_t lowest_set() const;

  BitMask& operator^=(const BitMask& other);
  bool operator==(const BitMask& other) const = default;

  std::span<std::uint64_t> words() { return words_; }
  std::span<const std::uint64_t> words() const { return words_; }

  /// Clears any bits at positions >= size() in the last word.
  void trim();

  std::string to_string() const;

 private:
  std::size_t nbits_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Incremental Gaussian elimination state for one coding block.
///
/// Stored rows are kept fully reduced: every row has a distinct lowest set
/// bit (its pivot), and no other row has that pivot bit set. Payloads go
/// through the same XOR operations as their masks, so once rank reaches the
/// block size each stored row is a unit vector and its payload is the
/// original packet at that pivot.
class Decoder {
 public:
  explicit Decoder(std::size_t block_size, std::size_t payload_length = 0);

  /// Reduces `mask` against the stored rows. Returns true and stores the
  /// reduced row when it is linearly independent of them; otherwise the
  /// decoder is left unchanged. Throws std::invalid_argument on a mask or
  /// payload length mismatch.
  bool absorb(const BitMask& mask, std::span<const std::byte> payload = {});

  std::size_t block_size() const { return block_size_; }
  std::size_t payload_length() const { return payload_length_; }
  std::size_t rank() const { return rows_.size(); }
  bool is_full_rank() const { return rows_.size() == block_size_; }

  /// Original payloads in block order. Throws std::logic_error unless the
  /// decoder is full rank.
  std::vector<std::vector<std::byte>> decode() const;

  /// Stored pivot rows, in insertion order (for invariant checks).
  std::span<const BitMask> rows() const { return rows_; }

 private:
  std::size_t block_size_;
  std::size_t payload_length_;
  std::vector<BitMask> rows_;
  std::vector<std::vector<std::byte>> payloads_;
  // pivot_row_[bit] is the index into rows_ whose pivot is `bit`, or npos.
  std::vector<std::size_t> pivot_row_;
};

void xor_into(std::span<std::byte> dst, std::span<const std::byte> src);

}  // namespace srwin::gf2
