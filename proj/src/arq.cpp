#include "srwin/arq.hpp"

#include <stdexcept>

namespace srwin::arq {

Sender::Sender(std::uint32_t window, Slot timeout) : window_(window), timeout_(timeout) {
  if (window < 1) throw std::invalid_argument("window must be at least 1");
  if (timeout < 1) throw std::invalid_argument("timeout must be at least 1 slot");
}

Sender::Entry* Sender::find(Seq seq) {
  if (seq < base_ || seq >= next_seq_) return nullptr;
  return &entries_[seq - base_];
}

std::optional<std::uint32_t> Sender::tx_count(Seq seq) const {
  if (seq < base_ || seq >= next_seq_) return std::nullopt;
  const auto& e = entries_[seq - base_];
  if (e.acked) return std::nullopt;
  return e.tx_count;
}

std::optional<DataPacket> Sender::on_slot(Slot slot) {
  while (!timers_.empty() && timers_.front().expiry <= slot) {
    const Timer t = timers_.front();
    timers_.pop_front();
    const Entry* e = find(t.seq);
    if (e != nullptr && !e->acked && e->tx_count == t.tx_count) {
      retransmit_.push_back(t.seq);
      ++timeouts_;
    }
  }

  if (!retransmit_.empty()) {
    const Seq seq = retransmit_.front();
    retransmit_.pop_front();
    Entry& e = *find(seq);
    ++e.tx_count;
    timers_.push_back({slot + timeout_, seq, e.tx_count});
    return DataPacket{seq, e.tx_count};
  }

  if (outstanding_ < window_) {
    const Seq seq = next_seq_++;
    entries_.push_back({1, false});
    ++outstanding_;
    timers_.push_back({slot + timeout_, seq, 1});
    return DataPacket{seq, 1};
  }
  return std::nullopt;
}

std::optional<std::uint32_t> Sender::on_ack(Seq seq) {
  Entry* e = find(seq);
  if (e == nullptr || e->acked) return std::nullopt;
  e->acked = true;
  --outstanding_;
  const auto count = e->tx_count;
  while (!entries_.empty() && entries_.front().acked) {
    entries_.pop_front();
    ++base_;
  }
  return count;
}

bool Receiver::holds(Seq seq) const {
  if (seq <= next_expected_) return false;
  const auto idx = seq - next_expected_ - 1;
  return idx < held_.size() && held_[idx] != kEmpty;
}

Receiver::Result Receiver::on_packet(Seq seq, Slot slot) {
  delivered_.clear();
  if (seq < next_expected_ || holds(seq)) {
    ++duplicates_;
    return {Ack{seq}, true, delivered_};
  }
  if (seq > next_expected_) {
    const auto idx = seq - next_expected_ - 1;
    if (idx >= held_.size()) held_.resize(idx + 1, kEmpty);
    held_[idx] = slot;
    ++occupancy_;
    return {Ack{seq}, false, delivered_};
  }

  delivered_.push_back({seq, slot});
  ++next_expected_;
  while (!held_.empty()) {
    const Slot arrived = held_.front();
    held_.pop_front();
    if (arrived == kEmpty) break;
    delivered_.push_back({next_expected_, arrived});
    ++next_expected_;
    --occupancy_;
  }
  return {Ack{seq}, false, delivered_};
}

}  // namespace srwin::arq
