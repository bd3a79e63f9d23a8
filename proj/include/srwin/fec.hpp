#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "srwin/channel.hpp"
#include "srwin/gf2.hpp"

namespace srwin::fec {

using BlockSeq = std::uint64_t;

enum class CodingMode {
  /// Every arrival is innovative until the block reaches rank B.
  kIdeal,
  /// Uniformly random masks over all 2^B subsets, empty mask included.
  kOblivious,
};

struct CodedUnit {
  BlockSeq block_seq = 0;
  std::uint32_t tx_index = 0;
  std::vector<std::byte> payload;
};

struct Ack {
  BlockSeq block_seq = 0;
};

struct CodingConfig {
  std::uint32_t block_size = 1;
  CodingMode mode = CodingMode::kIdeal;
  std::uint64_t coding_seed = 0;
  /// Bytes per packet; 0 disables payload coding (rank bookkeeping only).
  /// Payloads are only carried in oblivious mode.
  std::size_t payload_length = 0;
};

/// Deterministic application data: original packet `index` of `block_seq`.
std::vector<std::byte> source_payload(BlockSeq block_seq, std::uint32_t index,
                                      std::size_t length);

/// Block-coded selective-repeat sender.
///
/// Each block needs B ACK credits. A credit is "pending" while a coded
/// packet for it is in flight; the current block b* advances once its
/// pending plus received credits reach B. A credit whose timer fires is
/// re-sent as a fresh coded packet for the same block and stays pending.
/// The window bounds the total number of pending credits.
class Sender {
 public:
  Sender(std::uint32_t window, Slot timeout, CodingConfig coding);

  std::optional<CodedUnit> on_slot(Slot slot);

  /// Credits one ACK to `block_seq`. Returns the block's total
  /// transmission count when this ACK completes it.
  std::optional<std::uint64_t> on_ack(BlockSeq block_seq);

  /// Builds the next coded packet for `block_seq`. Throws std::logic_error
  /// if the block is unknown or already fully ACKed.
  CodedUnit make_coded_packet(BlockSeq block_seq);

  std::uint32_t window() const { return window_; }
  std::size_t in_flight() const { return pending_total_; }
  BlockSeq current_block() const { return current_; }
  /// Smallest block not yet released from the sender window.
  BlockSeq base_block() const { return base_; }
  std::uint64_t timeouts() const { return timeouts_; }

 private:
  struct Block {
    std::uint32_t acked = 0;
    std::uint32_t pending = 0;
    std::uint32_t next_tx_index = 0;
    std::uint64_t transmissions = 0;
    std::deque<std::uint64_t> pending_ids;  // oldest first
  };
  struct Timer {
    Slot expiry;
    BlockSeq block_seq;
    std::uint64_t credit_id;
  };

  Block* find(BlockSeq block_seq);
  Block& ensure(BlockSeq block_seq);
  CodedUnit transmit(Slot slot, BlockSeq block_seq, Block& block);

  std::uint32_t window_;
  Slot timeout_;
  CodingConfig coding_;
  BlockSeq current_ = 0;
  BlockSeq base_ = 0;
  std::deque<Block> blocks_;  // blocks_[i] describes base_ + i
  std::deque<Timer> timers_;
  std::deque<BlockSeq> retransmit_;
  std::size_t pending_total_ = 0;
  std::uint64_t next_credit_id_ = 0;
  std::uint64_t timeouts_ = 0;
};

/// Block-coded selective-repeat receiver: ACK innovative arrivals, decode
/// at full rank, deliver blocks in order.
class Receiver {
 public:
  struct BlockDelivery {
    BlockSeq block_seq;
    std::uint64_t arrival_slot_sum;  // over the B innovative arrivals
    std::vector<std::vector<std::byte>> payloads;  // empty without payload coding
  };
  struct Result {
    std::optional<Ack> ack;
    bool innovative;
    std::uint32_t rank;  // rank of the arrival's block after absorbing it
    const std::vector<BlockDelivery>& delivered;
  };

  explicit Receiver(CodingConfig coding);

  Result on_packet(const CodedUnit& unit, Slot slot);

  BlockSeq next_expected_block() const { return next_expected_; }
  /// Innovative packets of undecoded blocks plus B per decoded block
  /// waiting on an earlier one.
  std::size_t occupancy() const { return occupancy_; }
  std::uint64_t non_innovative() const { return non_innovative_; }

 private:
  struct Block {
    std::uint32_t rank = 0;
    bool decoded = false;
    std::uint64_t arrival_slot_sum = 0;
    std::optional<gf2::Decoder> decoder;
    std::vector<std::vector<std::byte>> payloads;
  };

  Block& ensure(BlockSeq block_seq);

  CodingConfig coding_;
  BlockSeq next_expected_ = 0;
  std::deque<Block> blocks_;  // blocks_[i] describes next_expected_ + i
  std::size_t occupancy_ = 0;
  std::uint64_t non_innovative_ = 0;
  std::vector<BlockDelivery> delivered_;
};

}  // namespace srwin::fec
