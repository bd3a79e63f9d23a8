#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "srwin/channel.hpp"

namespace srwin::arq {

using Seq = std::uint64_t;

struct DataPacket {
  Seq seq = 0;
  std::uint32_t tx_count = 1;  // 1 on first transmission
};

struct Ack {
  Seq seq = 0;
};

/// Selective-repeat ARQ sender with up to W outstanding packets, whatever
/// their sequence range. An outstanding packet is retransmitted after a
/// fixed timeout; retransmissions take priority over new packets.
class Sender {
 public:
  Sender(std::uint32_t window, Slot timeout);

  /// Expires timers due at `slot` and emits at most one packet.
  std::optional<DataPacket> on_slot(Slot slot);

  /// Marks `seq` ACKed. Returns its final transmission count when the ACK
  /// is new; duplicate or unknown ACKs are ignored.
  std::optional<std::uint32_t> on_ack(Seq seq);

  std::uint32_t window() const { return window_; }
  std::size_t outstanding() const { return outstanding_; }
  Seq next_seq() const { return next_seq_; }
  std::size_t retransmit_backlog() const { return retransmit_.size(); }
  std::uint64_t timeouts() const { return timeouts_; }

  /// Transmission count of an outstanding packet, if any.
  std::optional<std::uint32_t> tx_count(Seq seq) const;

 private:
  struct Entry {
    std::uint32_t tx_count = 0;
    bool acked = false;
  };
  struct Timer {
    Slot expiry;
    Seq seq;
    std::uint32_t tx_count;  // identifies the transmission that armed it
  };

  Entry* find(Seq seq);

  std::uint32_t window_;
  Slot timeout_;
  Seq next_seq_ = 0;
  Seq base_ = 0;  // smallest un-ACKed sequence number
  std::deque<Entry> entries_;  // entries_[i] describes base_ + i
  std::deque<Timer> timers_;   // expiries are non-decreasing
  std::deque<Seq> retransmit_;
  std::size_t outstanding_ = 0;
  std::uint64_t timeouts_ = 0;
};

/// Receiver side: ACK every arrival, hold out-of-order packets, deliver
/// in-order runs.
class Receiver {
 public:
  struct Delivery {
    Seq seq;
    Slot arrived;
  };
  struct Result {
    Ack ack;
    bool duplicate;
    const std::vector<Delivery>& delivered;
  };

  Result on_packet(Seq seq, Slot slot);

  Seq next_expected() const { return next_expected_; }
  /// Packets held awaiting in-order delivery.
  std::size_t occupancy() const { return occupancy_; }
  bool holds(Seq seq) const;
  std::uint64_t duplicates() const { return duplicates_; }

 private:
  static constexpr Slot kEmpty = ~Slot{0};

  Seq next_expected_ = 0;
  std::deque<Slot> held_;  // held_[i] is the arrival slot of next_expected_ + 1 + i
  std::size_t occupancy_ = 0;
  std::uint64_t duplicates_ = 0;
  std::vector<Delivery> delivered_;
};

}  // namespace srwin::arq
