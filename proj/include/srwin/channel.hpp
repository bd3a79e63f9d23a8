#pragma once

#include <cstdint>
#include <deque>
#include <stdexcept>
#include <string>
#include <vector>

#include "srwin/rng.hpp"

namespace srwin {

using Slot = std::uint64_t;

struct ChannelConfig {
  double loss = 0.0;      // forward loss probability p
  double ack_loss = 0.0;  // feedback loss probability p_a
  Slot rtt = 1;           // R
  std::uint64_t seed = 0;

  /// Forward and feedback one-way latencies; they always sum to R. The
  /// forward leg takes the floor so that R = 1 still delivers data within
  /// the slot it was sent.
  Slot forward_latency() const { return rtt / 2; }
  Slot feedback_latency() const { return rtt - rtt / 2; }

  void validate() const {
    if (rtt < 1) throw std::invalid_argument("R must be at least 1 slot");
    if (!(loss >= 0.0 && loss < 1.0)) throw std::invalid_argument("p must lie in [0, 1)");
    if (!(ack_loss >= 0.0 && ack_loss < 1.0)) throw std::invalid_argument("p_a must lie in [0, 1)");
  }
};

/// One direction of a fixed-latency FIFO link. Loss is decided when a unit
/// is injected; lost units still occupy their place in the queue and are
/// dropped when their delivery slot comes up.
template <class Unit>
class Link {
 public:
  struct InFlight {
    Unit unit;
    Slot deliver_at;
    bool lost;
  };

  explicit Link(Slot latency) : latency_(latency) {}

  void inject(Slot slot, Unit unit, bool lost) {
    queue_.push_back(InFlight{std::move(unit), slot + latency_, lost});
    ++injected_;
    if (lost) ++dropped_;
  }

  /// Surviving units due at `slot`, in injection order. The returned
  /// reference stays valid until the next poll.
  const std::vector<Unit>& poll(Slot slot) {
    if (polled_any_ && slot < last_poll_) {
      throw std::logic_error("channel polled at slot " + std::to_string(slot) +
                             " after slot " + std::to_string(last_poll_));
    }
    polled_any_ = true;
    last_poll_ = slot;
    ready_.clear();
    while (!queue_.empty() && queue_.front().deliver_at <= slot) {
      if (!queue_.front().lost) {
        ready_.push_back(std::move(queue_.front().unit));
        ++delivered_;
      }
      queue_.pop_front();
    }
    return ready_;
  }

  Slot latency() const { return latency_; }
  std::size_t in_flight() const { return queue_.size(); }
  std::uint64_t injected() const { return injected_; }
  std::uint64_t delivered() const { return delivered_; }
  std::uint64_t dropped() const { return dropped_; }

 private:
  Slot latency_;
  std::deque<InFlight> queue_;
  std::vector<Unit> ready_;
  Slot last_poll_ = 0;
  bool polled_any_ = false;
  std::uint64_t injected_ = 0;
  std::uint64_t delivered_ = 0;
  std::uint64_t dropped_ = 0;
};

/// Forward data link plus feedback link, each with its own loss stream.
template <class Data, class Ack>
class Channel {
 public:
  explicit Channel(const ChannelConfig& config)
      : config_((config.validate(), config)),
        forward_(config.forward_latency()),
        feedback_(config.feedback_latency()),
        forward_rng_(stream_seed(config.seed, Stream::kForwardLoss)),
        feedback_rng_(stream_seed(config.seed, Stream::kFeedbackLoss)) {}

  void send_forward(Slot slot, Data unit) {
    const bool lost = config_.loss > 0.0 && forward_rng_.draw(config_.loss);
    forward_.inject(slot, std::move(unit), lost);
  }

  /// Sends `copies` back-to-back copies of an ACK; it arrives once if at
  /// least one copy survives.
  void send_feedback(Slot slot, Ack unit, std::uint32_t copies = 1) {
    if (copies < 1) throw std::invalid_argument("ACK copies must be at least 1");
    bool lost = true;
    if (config_.ack_loss == 0.0) {
      lost = false;
    } else {
      for (std::uint32_t i = 0; i < copies; ++i) {
        if (!feedback_rng_.draw(config_.ack_loss)) lost = false;
      }
    }
    feedback_.inject(slot, std::move(unit), lost);
  }

  const std::vector<Data>& poll_forward(Slot slot) { return forward_.poll(slot); }
  const std::vector<Ack>& poll_feedback(Slot slot) { return feedback_.poll(slot); }

  const ChannelConfig& config() const { return config_; }
  const Link<Data>& forward() const { return forward_; }
  const Link<Ack>& feedback() const { return feedback_; }

 private:
  ChannelConfig config_;
  Link<Data> forward_;
  Link<Ack> feedback_;
  BernoulliSource forward_rng_;
  BernoulliSource feedback_rng_;
};

}  // namespace srwin
