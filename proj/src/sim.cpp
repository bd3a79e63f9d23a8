#include "srwin/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "srwin/arq.hpp"
#include "srwin/fec.hpp"

namespace srwin::sim {

std::string_view to_string(Protocol protocol) {
  switch (protocol) {
    case Protocol::kArq: return "arq";
    case Protocol::kFecIdeal: return "fec-ideal";
    case Protocol::kFecOblivious: return "fec-oblivious";
  }
  return "?";
}

Protocol parse_protocol(std::string_view name) {
  if (name == "arq") return Protocol::kArq;
  if (name == "fec-ideal" || name == "fec") return Protocol::kFecIdeal;
  if (name == "fec-oblivious") return Protocol::kFecOblivious;
  throw std::invalid_argument("protocol: unknown value '" + std::string(name) +
                              "' (expected arq, fec-ideal or fec-oblivious)");
}

void ExperimentConfig::resolve() {
  if (window < 1) throw std::invalid_argument("W: must be at least 1");
  if (!(loss >= 0.0 && loss < 1.0)) throw std::invalid_argument("p: must lie in [0, 1)");
  if (!(ack_loss >= 0.0 && ack_loss < 1.0)) throw std::invalid_argument("pa: must lie in [0, 1)");
  if (copies < 1) throw std::invalid_argument("copies: must be at least 1");
  if (replications < 1) throw std::invalid_argument("reps: must be at least 1");
  if (protocol != Protocol::kArq) {
    if (block_size < 1 || block_size > window || window % block_size != 0) {
      throw std::invalid_argument("B: W (" + std::to_string(window) +
                                  ") must be an integer multiple of B (" +
                                  std::to_string(block_size) + ")");
    }
  }

  if (rtt == 0 && capacity == 0) capacity = 1;
  if (rtt == 0) {
    if (window % capacity != 0) {
      throw std::invalid_argument("C: W must equal R * C for an integer R");
    }
    rtt = window / capacity;
  } else if (capacity == 0) {
    if (window % rtt != 0) throw std::invalid_argument("R: W must equal R * C for an integer C");
    capacity = static_cast<std::uint32_t>(window / rtt);
  } else if (rtt * capacity != window) {
    throw std::invalid_argument("W: must equal R * C (" + std::to_string(rtt) + " * " +
                                std::to_string(capacity) + ")");
  }

  if (horizon == 0) {
    double goodput = (1.0 - loss) * (1.0 - std::pow(ack_loss, copies)) * capacity;
    if (protocol == Protocol::kFecOblivious) goodput /= 1.0 + 2.0 / block_size;
    const double needed = (10.0 * window + 2.0e5) / goodput;
    horizon = 10 * rtt + static_cast<Slot>(std::ceil(1.1 * needed));
  }
  if (warmup >= 0 && static_cast<Slot>(warmup) >= horizon) {
    throw std::invalid_argument("warmup: must be smaller than the horizon");
  }
}

TraceSink::TraceSink(std::ostream& out) : out_(out) { out_ << kHeader << '\n'; }

void TraceSink::event(Slot slot, std::string_view actor, std::string_view event, std::int64_t seq,
                      std::int64_t block_seq, std::int64_t rank, std::int64_t buffer_size) {
  const auto field = [this](std::int64_t v) {
    if (v >= 0) out_ << v;
  };
  out_ << slot << ',' << actor << ',' << event << ',';
  field(seq);
  out_ << ',';
  field(block_seq);
  out_ << ',';
  field(rank);
  out_ << ',';
  field(buffer_size);
  out_ << '\n';
}

CohortMax::CohortMax(std::uint64_t cohort_size) : cohort_size_(cohort_size) {
  if (cohort_size == 0) throw std::invalid_argument("cohort size must be positive");
}

void CohortMax::add(std::uint64_t seq, std::uint64_t value) {
  const auto cohort = seq / cohort_size_;
  if (cohort < base_) return;
  const auto idx = cohort - base_;
  if (idx >= open_.size()) open_.resize(idx + 1);
  auto& slot = open_[idx];
  ++slot.seen;
  slot.max = std::max(slot.max, value);
  while (!open_.empty() && open_.front().seen == cohort_size_) {
    sum_ += static_cast<double>(open_.front().max);
    ++complete_;
    open_.pop_front();
    ++base_;
  }
}

double CohortMax::mean() const {
  return complete_ == 0 ? std::numeric_limits<double>::quiet_NaN()
                        : sum_ / static_cast<double>(complete_);
}

double measure_window_max_tx(std::span<const std::uint32_t> tx_counts, std::uint32_t window) {
  if (window < 1) throw std::invalid_argument("window must be at least 1");
  const auto cohorts = tx_counts.size() / window;
  if (cohorts < 10) {
    throw InsufficientData("need at least 10 complete cohorts of " + std::to_string(window) +
                           " packets, have " + std::to_string(cohorts));
  }
  double sum = 0.0;
  for (std::size_t c = 0; c < cohorts; ++c) {
    const auto first = tx_counts.begin() + static_cast<std::ptrdiff_t>(c * window);
    sum += *std::max_element(first, first + window);
  }
  return sum / static_cast<double>(cohorts);
}

namespace {

// Post-warmup accumulators shared by both protocol loops.
struct Measurement {
  std::int64_t fixed_warmup;
  Slot min_warmup;
  std::uint64_t min_deliveries;
  bool active = false;
  Slot start = 0;
  std::uint64_t delivered_total = 0;
  std::uint64_t delivered = 0;
  long double delay_sum = 0;
  long double occupancy_sum = 0;
  std::uint64_t slots = 0;
  std::uint64_t wasted = 0;
  std::uint64_t transmissions = 0;

  void begin_slot(Slot slot) {
    if (active) return;
    if (fixed_warmup >= 0) {
      active = slot >= static_cast<Slot>(fixed_warmup);
    } else {
      active = slot >= min_warmup && delivered_total >= min_deliveries;
    }
    if (active) start = slot;
  }

  void deliver(std::uint64_t packets, long double delay_total) {
    delivered_total += packets;
    if (!active) return;
    delivered += packets;
    delay_sum += delay_total;
  }

  void end_slot(std::size_t occupancy) {
    if (!active) return;
    occupancy_sum += occupancy;
    ++slots;
  }

  void finish(MetricsReport& report) const {
    report.measured_slots = slots;
    report.delivered = delivered;
    report.wasted_tx = wasted;
    report.transmissions = transmissions;
    if (slots == 0) return;
    report.throughput = static_cast<double>(delivered) / static_cast<double>(slots);
    report.mean_occupancy = static_cast<double>(occupancy_sum / slots);
    report.mean_delay = delivered == 0 ? 0.0 : static_cast<double>(delay_sum / delivered);
    if (report.mean_delay > 0.0) {
      const double predicted =
          report.throughput > 0.0 ? report.mean_occupancy / report.throughput : 0.0;
      report.littles_residual = std::abs(report.mean_delay - predicted) / report.mean_delay;
    } else {
      report.littles_residual = report.mean_occupancy == 0.0 ? 0.0 : 1.0;
    }
  }
};

Measurement make_measurement(const ExperimentConfig& cfg) {
  return Measurement{cfg.warmup, 10 * cfg.rtt, 10ULL * cfg.window};
}

[[noreturn]] void violation(Slot slot, const std::string& what) {
  throw SimulationError("invariant violated at slot " + std::to_string(slot) + ": " + what);
}

MetricsReport simulate_arq(const ExperimentConfig& cfg, std::uint64_t seed, TraceSink* trace) {
  Channel<arq::DataPacket, arq::Ack> channel({cfg.loss, cfg.ack_loss, cfg.rtt, seed});
  arq::Sender sender(cfg.window, cfg.rtt);
  arq::Receiver receiver;
  CohortMax cohorts(cfg.window);
  Measurement m = make_measurement(cfg);
  arq::Seq expected_delivery = 0;

  for (Slot slot = 0; slot < cfg.horizon; ++slot) {
    m.begin_slot(slot);

    for (const auto& ack : channel.poll_feedback(slot)) {
      const auto tx = sender.on_ack(ack.seq);
      if (tx) cohorts.add(ack.seq, *tx);
      if (trace) trace->event(slot, "sender", tx ? "ack" : "dup_ack", ack.seq, -1, -1, -1);
    }

    for (std::uint32_t op = 0; op < cfg.capacity; ++op) {
      const auto timeouts_before = sender.timeouts();
      auto packet = sender.on_slot(slot);
      if (trace && sender.timeouts() != timeouts_before) {
        trace->event(slot, "sender", "timeout", -1, -1, -1, -1);
      }
      if (sender.outstanding() > cfg.window) {
        violation(slot, "outstanding packets exceed the window");
      }
      if (!packet) break;
      ++m.transmissions;
      if (trace) {
        trace->event(slot, "sender", packet->tx_count == 1 ? "tx" : "retx",
                     static_cast<std::int64_t>(packet->seq), -1, -1, -1);
      }
      channel.send_forward(slot, *packet);
    }

    for (const auto& packet : channel.poll_forward(slot)) {
      const auto result = receiver.on_packet(packet.seq, slot);
      if (result.duplicate && m.active) ++m.wasted;
      long double delay = 0;
      for (const auto& d : result.delivered) {
        if (d.seq != expected_delivery) {
          violation(slot, "delivered seq " + std::to_string(d.seq) + ", expected " +
                              std::to_string(expected_delivery));
        }
        ++expected_delivery;
        delay += slot - d.arrived;
      }
      m.deliver(result.delivered.size(), delay);
      if (trace) {
        trace->event(slot, "receiver", result.duplicate ? "dup" : "rx",
                     static_cast<std::int64_t>(packet.seq), -1, -1,
                     static_cast<std::int64_t>(receiver.occupancy()));
        if (!result.delivered.empty()) {
          trace->event(slot, "receiver", "deliver",
                       static_cast<std::int64_t>(result.delivered.back().seq), -1, -1,
                       static_cast<std::int64_t>(receiver.occupancy()));
        }
      }
      channel.send_feedback(slot, result.ack, cfg.copies);
    }

    m.end_slot(receiver.occupancy());
  }

  MetricsReport report;
  report.seed = seed;
  m.finish(report);
  report.cohorts = cohorts.complete();
  report.window_max_tx = cohorts.mean();
  return report;
}

MetricsReport simulate_fec(const ExperimentConfig& cfg, std::uint64_t seed, TraceSink* trace) {
  const bool oblivious = cfg.protocol == Protocol::kFecOblivious;
  fec::CodingConfig coding{cfg.block_size,
                           oblivious ? fec::CodingMode::kOblivious : fec::CodingMode::kIdeal,
                           stream_seed(seed, Stream::kCodingMask),
                           oblivious ? cfg.payload_length : 0};
  Channel<fec::CodedUnit, fec::Ack> channel({cfg.loss, cfg.ack_loss, cfg.rtt, seed});
  fec::Sender sender(cfg.window, cfg.rtt, coding);
  fec::Receiver receiver(coding);
  CohortMax cohorts(cfg.window / cfg.block_size);
  Measurement m = make_measurement(cfg);
  fec::BlockSeq expected_delivery = 0;
  std::uint64_t completed_blocks = 0;
  long double block_tx_sum = 0;
  const auto b = cfg.block_size;

  for (Slot slot = 0; slot < cfg.horizon; ++slot) {
    m.begin_slot(slot);

    for (const auto& ack : channel.poll_feedback(slot)) {
      const auto done = sender.on_ack(ack.block_seq);
      if (done) {
        cohorts.add(ack.block_seq, *done);
        ++completed_blocks;
        block_tx_sum += *done;
      }
      if (trace) {
        trace->event(slot, "sender", done ? "block_acked" : "ack", -1,
                     static_cast<std::int64_t>(ack.block_seq), -1, -1);
      }
    }

    for (std::uint32_t op = 0; op < cfg.capacity; ++op) {
      const auto timeouts_before = sender.timeouts();
      auto unit = sender.on_slot(slot);
      if (trace && sender.timeouts() != timeouts_before) {
        trace->event(slot, "sender", "timeout", -1, -1, -1, -1);
      }
      if (sender.in_flight() > cfg.window) violation(slot, "in-flight coded packets exceed the window");
      if (!unit) break;
      ++m.transmissions;
      if (trace) {
        trace->event(slot, "sender", "tx", unit->tx_index,
                     static_cast<std::int64_t>(unit->block_seq), -1, -1);
      }
      channel.send_forward(slot, std::move(*unit));
    }

    for (const auto& unit : channel.poll_forward(slot)) {
      const auto result = receiver.on_packet(unit, slot);
      if (!result.innovative && m.active) ++m.wasted;
      long double delay = 0;
      for (const auto& block : result.delivered) {
        if (block.block_seq != expected_delivery) {
          violation(slot, "delivered block " + std::to_string(block.block_seq) + ", expected " +
                              std::to_string(expected_delivery));
        }
        if (!block.payloads.empty()) {
          for (std::uint32_t i = 0; i < b; ++i) {
            if (block.payloads[i] != fec::source_payload(block.block_seq, i, cfg.payload_length)) {
              violation(slot, "block " + std::to_string(block.block_seq) + " packet " +
                                  std::to_string(i) + " decoded incorrectly");
            }
          }
        }
        ++expected_delivery;
        delay += static_cast<long double>(b) * slot - static_cast<long double>(block.arrival_slot_sum);
      }
      m.deliver(static_cast<std::uint64_t>(result.delivered.size()) * b, delay);
      if (trace) {
        trace->event(slot, "receiver", result.innovative ? "rx" : "non_innovative", unit.tx_index,
                     static_cast<std::int64_t>(unit.block_seq), result.rank,
                     static_cast<std::int64_t>(receiver.occupancy()));
        for (const auto& block : result.delivered) {
          trace->event(slot, "receiver", "deliver", -1, static_cast<std::int64_t>(block.block_seq),
                       b, static_cast<std::int64_t>(receiver.occupancy()));
        }
      }
      if (result.ack) channel.send_feedback(slot, *result.ack, cfg.copies);
    }

    m.end_slot(receiver.occupancy());
  }

  MetricsReport report;
  report.seed = seed;
  m.finish(report);
  report.cohorts = cohorts.complete();
  report.window_max_tx = cohorts.mean() / b;
  report.blocks = completed_blocks;
  report.mean_block_tx = completed_blocks == 0
                             ? std::numeric_limits<double>::quiet_NaN()
                             : static_cast<double>(block_tx_sum / completed_blocks);
  return report;
}

}  // namespace

MetricsReport simulate(const ExperimentConfig& config, std::uint64_t seed, TraceSink* trace) {
  const auto cfg = config.resolved();
  return cfg.protocol == Protocol::kArq ? simulate_arq(cfg, seed, trace)
                                        : simulate_fec(cfg, seed, trace);
}

void summarize(RunResult& result) {
  const auto& reps = result.replications;
  const auto n = static_cast<double>(reps.size());
  MetricsReport mean;
  MetricsReport err;
  const auto stat = [&](auto field, auto&& out_mean, auto&& out_err) {
    double sum = 0.0;
    for (const auto& r : reps) sum += r.*field;
    const double mu = sum / n;
    double ss = 0.0;
    for (const auto& r : reps) ss += (r.*field - mu) * (r.*field - mu);
    out_mean = mu;
    out_err = reps.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
  };
  stat(&MetricsReport::throughput, mean.throughput, err.throughput);
  stat(&MetricsReport::mean_occupancy, mean.mean_occupancy, err.mean_occupancy);
  stat(&MetricsReport::mean_delay, mean.mean_delay, err.mean_delay);
  stat(&MetricsReport::window_max_tx, mean.window_max_tx, err.window_max_tx);
  stat(&MetricsReport::mean_block_tx, mean.mean_block_tx, err.mean_block_tx);
  stat(&MetricsReport::littles_residual, mean.littles_residual, err.littles_residual);
  for (const auto& r : reps) {
    mean.wasted_tx += r.wasted_tx;
    mean.delivered += r.delivered;
    mean.measured_slots += r.measured_slots;
    mean.cohorts += r.cohorts;
    mean.blocks += r.blocks;
    mean.transmissions += r.transmissions;
  }
  mean.seed = result.config.seed;
  err.seed = result.config.seed;
  result.mean = mean;
  result.stderr_ = err;
}

namespace {

RunResult run_impl(const ExperimentConfig& config, bool parallel) {
  RunResult result;
  result.config = config.resolved();
  const auto reps = result.config.replications;
  result.replications.resize(reps);
  std::exception_ptr failure;

#pragma omp parallel for schedule(dynamic) if (parallel)
  for (std::int64_t r = 0; r < static_cast<std::int64_t>(reps); ++r) {
    try {
      auto report = simulate(result.config, result.config.seed + static_cast<std::uint64_t>(r) + 1);
      report.replication = static_cast<std::uint32_t>(r);
      result.replications[static_cast<std::size_t>(r)] = report;
    } catch (...) {
#pragma omp critical(srwin_run_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  summarize(result);
  return result;
}

ExperimentConfig apply_axis(const ExperimentConfig& base, std::string_view axis, double value) {
  ExperimentConfig cfg = base;
  if (axis == "W") {
    const bool block_tracks_window = base.block_size == base.window;
    cfg.window = static_cast<std::uint32_t>(value);
    if (block_tracks_window) cfg.block_size = cfg.window;
    if (base.capacity == 0 && base.rtt != 0) {
      cfg.capacity = 1;  // R was pinned for the base W; keep C and re-derive R
    }
    cfg.rtt = 0;
  } else if (axis == "p") {
    cfg.loss = value;
  } else if (axis == "B") {
    cfg.block_size = static_cast<std::uint32_t>(value);
  } else if (axis == "p_a" || axis == "pa") {
    cfg.ack_loss = value;
  } else if (axis == "copies") {
    cfg.copies = static_cast<std::uint32_t>(value);
  } else {
    throw std::invalid_argument("axis: unknown value '" + std::string(axis) +
                                "' (expected W, p, B, p_a or copies)");
  }
  return cfg;
}

}  // namespace

RunResult run(const ExperimentConfig& config) { return run_impl(config, true); }

RunResult run_serial(const ExperimentConfig& config) { return run_impl(config, false); }

std::vector<SweepPoint> sweep(const ExperimentConfig& base, std::string_view axis,
                              std::span<const double> values) {
  std::vector<SweepPoint> points;
  points.reserve(values.size());
  for (double v : values) {
    points.push_back({std::string(axis), v, {}});
    points.back().result.config = apply_axis(base, axis, v).resolved();
    points.back().result.replications.resize(points.back().result.config.replications);
  }

  struct Task {
    std::size_t point;
    std::uint32_t rep;
  };
  std::vector<Task> tasks;
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::uint32_t r = 0; r < points[i].result.config.replications; ++r) tasks.push_back({i, r});
  }

  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t t = 0; t < static_cast<std::int64_t>(tasks.size()); ++t) {
    const auto task = tasks[static_cast<std::size_t>(t)];
    auto& result = points[task.point].result;
    try {
      auto report = simulate(result.config, result.config.seed + task.rep + 1);
      report.replication = task.rep;
      result.replications[task.rep] = report;
    } catch (...) {
#pragma omp critical(srwin_sweep_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  for (auto& point : points) summarize(point.result);
  return points;
}

}  // namespace srwin::sim
