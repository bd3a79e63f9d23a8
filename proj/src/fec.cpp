#include "srwin/fec.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "srwin/rng.hpp"

namespace srwin::fec {

std::vector<std::byte> source_payload(BlockSeq block_seq, std::uint32_t index, std::size_t length) {
  std::vector<std::byte> out(length);
  const std::uint64_t key = mix64(mix64(block_seq) ^ (std::uint64_t{index} + kGolden));
  for (std::size_t i = 0; i < length; i += 8) {
    const std::uint64_t word = mix64(key + (i / 8 + 1) * kGolden);
    for (std::size_t j = 0; j < 8 && i + j < length; ++j) {
      out[i + j] = static_cast<std::byte>(word >> (8 * j));
    }
  }
  return out;
}

Sender::Sender(std::uint32_t window, Slot timeout, CodingConfig coding)
    : window_(window), timeout_(timeout), coding_(coding) {
  if (coding_.block_size < 1) throw std::invalid_argument("B must be at least 1");
  if (window < coding_.block_size || window % coding_.block_size != 0) {
    throw std::invalid_argument("W must be an integer multiple of B");
  }
  if (timeout < 1) throw std::invalid_argument("timeout must be at least 1 slot");
}

Sender::Block* Sender::find(BlockSeq block_seq) {
  if (block_seq < base_ || block_seq - base_ >= blocks_.size()) return nullptr;
  return &blocks_[block_seq - base_];
}

Sender::Block& Sender::ensure(BlockSeq block_seq) {
  while (base_ + blocks_.size() <= block_seq) blocks_.emplace_back();
  return blocks_[block_seq - base_];
}

CodedUnit Sender::make_coded_packet(BlockSeq block_seq) {
  Block* block = find(block_seq);
  if (block == nullptr || block->acked >= coding_.block_size) {
    throw std::logic_error("no undelivered credit for block " + std::to_string(block_seq));
  }
  CodedUnit unit{block_seq, block->next_tx_index++, {}};
  ++block->transmissions;
  if (coding_.mode == CodingMode::kOblivious && coding_.payload_length > 0) {
    const auto mask = mask_from(coding_.coding_seed, block_seq, unit.tx_index, coding_.block_size);
    unit.payload.assign(coding_.payload_length, std::byte{0});
    for (std::uint32_t i = 0; i < coding_.block_size; ++i) {
      if (mask.test(i)) gf2::xor_into(unit.payload, source_payload(block_seq, i, coding_.payload_length));
    }
  }
  return unit;
}

CodedUnit Sender::transmit(Slot slot, BlockSeq block_seq, Block& block) {
  const auto id = next_credit_id_++;
  block.pending_ids.push_back(id);
  timers_.push_back({slot + timeout_, block_seq, id});
  return make_coded_packet(block_seq);
}

std::optional<CodedUnit> Sender::on_slot(Slot slot) {
  while (!timers_.empty() && timers_.front().expiry <= slot) {
    const Timer t = timers_.front();
    timers_.pop_front();
    Block* block = find(t.block_seq);
    // Credits of a block expire in send order, so a live timer always
    // belongs to the block's oldest pending credit.
    if (block != nullptr && !block->pending_ids.empty() && block->pending_ids.front() == t.credit_id) {
      block->pending_ids.pop_front();
      retransmit_.push_back(t.block_seq);
      ++timeouts_;
    }
  }

  if (!retransmit_.empty()) {
    const BlockSeq block_seq = retransmit_.front();
    retransmit_.pop_front();
    return transmit(slot, block_seq, *find(block_seq));
  }

  if (pending_total_ < window_) {
    const BlockSeq block_seq = current_;
    Block& block = ensure(block_seq);
    ++block.pending;
    ++pending_total_;
    auto unit = transmit(slot, block_seq, block);
    if (block.pending + block.acked >= coding_.block_size) ++current_;
    return unit;
  }
  return std::nullopt;
}

std::optional<std::uint64_t> Sender::on_ack(BlockSeq block_seq) {
  Block* block = find(block_seq);
  if (block == nullptr || block->acked >= coding_.block_size || block->pending == 0) {
    return std::nullopt;
  }
  ++block->acked;
  --block->pending;
  --pending_total_;
  if (!block->pending_ids.empty()) {
    block->pending_ids.pop_front();
  } else {
    // The credit had already timed out and is queued for a resend.
    auto it = std::find(retransmit_.begin(), retransmit_.end(), block_seq);
    if (it != retransmit_.end()) retransmit_.erase(it);
  }

  std::optional<std::uint64_t> completed;
  if (block->acked == coding_.block_size) completed = block->transmissions;
  while (!blocks_.empty() && base_ < current_ && blocks_.front().acked == coding_.block_size) {
    blocks_.pop_front();
    ++base_;
  }
  return completed;
}

Receiver::Receiver(CodingConfig coding) : coding_(coding) {
  if (coding_.block_size < 1) throw std::invalid_argument("B must be at least 1");
}

Receiver::Block& Receiver::ensure(BlockSeq block_seq) {
  while (next_expected_ + blocks_.size() <= block_seq) blocks_.emplace_back();
  return blocks_[block_seq - next_expected_];
}

Receiver::Result Receiver::on_packet(const CodedUnit& unit, Slot slot) {
  delivered_.clear();
  const auto block_size = coding_.block_size;

  // Units for complete blocks are never innovative. They are still ACKed
  // so a sender that lost earlier ACKs can finish the block.
  if (unit.block_seq < next_expected_) {
    ++non_innovative_;
    return {Ack{unit.block_seq}, false, block_size, delivered_};
  }
  Block& block = ensure(unit.block_seq);
  if (block.decoded) {
    ++non_innovative_;
    return {Ack{unit.block_seq}, false, block_size, delivered_};
  }

  bool innovative = true;
  if (coding_.mode == CodingMode::kOblivious) {
    if (!block.decoder) block.decoder.emplace(block_size, coding_.payload_length);
    const auto mask = mask_from(coding_.coding_seed, unit.block_seq, unit.tx_index, block_size);
    innovative = block.decoder->absorb(mask, unit.payload);
  }
  if (!innovative) {
    ++non_innovative_;
    return {std::nullopt, false, block.rank, delivered_};
  }

  ++block.rank;
  block.arrival_slot_sum += slot;
  ++occupancy_;
  const auto rank = block.rank;
  if (block.rank == block_size) {
    block.decoded = true;
    if (block.decoder) {
      if (coding_.payload_length > 0) block.payloads = block.decoder->decode();
      block.decoder.reset();
    }
  }

  while (!blocks_.empty() && blocks_.front().decoded) {
    Block& done = blocks_.front();
    delivered_.push_back({next_expected_, done.arrival_slot_sum, std::move(done.payloads)});
    occupancy_ -= block_size;
    blocks_.pop_front();
    ++next_expected_;
  }
  return {Ack{unit.block_seq}, true, rank, delivered_};
}

}  // namespace srwin::fec
