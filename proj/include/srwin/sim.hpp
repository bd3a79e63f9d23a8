#pragma once

#include <cstdint>
#include <deque>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "srwin/channel.hpp"

namespace srwin::sim {

enum class Protocol { kArq, kFecIdeal, kFecOblivious };

std::string_view to_string(Protocol protocol);
/// Accepts "arq", "fec-ideal", "fec-oblivious".
Protocol parse_protocol(std::string_view name);

/// Raised when a run breaks a protocol invariant (window overrun, gap or
/// inversion in the delivered stream, corrupted payload).
class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InsufficientData : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  Protocol protocol = Protocol::kArq;
  std::uint32_t window = 64;      // W
  std::uint32_t block_size = 64;  // B, FEC only
  double loss = 0.1;              // p
  double ack_loss = 0.0;          // p_a
  Slot rtt = 0;                   // R in slots; 0 derives W / C
  std::uint32_t capacity = 0;     // C in transmissions per slot; 0 derives W / R
  std::uint32_t copies = 1;       // ACK copies sent back-to-back
  Slot horizon = 0;               // total slots; 0 picks one from the parameters
  std::int64_t warmup = -1;       // slots discarded; -1 is max(10 R, first 10 W deliveries)
  std::uint64_t seed = 1;
  std::uint32_t replications = 10;
  std::size_t payload_length = 0;  // bytes per packet in oblivious FEC; 0 skips payloads

  /// Fills derived fields (R, C, horizon) and checks consistency, throwing
  /// std::invalid_argument with the offending parameter named.
  void resolve();
  ExperimentConfig resolved() const {
    auto copy = *this;
    copy.resolve();
    return copy;
  }
};

struct MetricsReport {
  std::uint32_t replication = 0;
  std::uint64_t seed = 0;
  double throughput = 0.0;      // delivered packets per slot
  double mean_occupancy = 0.0;  // time-average re-sequencing buffer, packets
  double mean_delay = 0.0;      // arrival-to-delivery, slots per delivered packet
  double window_max_tx = 0.0;   // mean cohort max transmissions (per packet for FEC)
  double mean_block_tx = 0.0;   // FEC: mean transmissions per block; ARQ: 0
  double littles_residual = 0.0;  // |E[D] - E[Q]/rho| / E[D]; 0 when both vanish
  std::uint64_t wasted_tx = 0;    // duplicate or non-innovative arrivals
  std::uint64_t delivered = 0;    // packets delivered after warmup
  std::uint64_t measured_slots = 0;
  std::uint64_t cohorts = 0;      // complete cohorts behind window_max_tx
  std::uint64_t blocks = 0;       // completed blocks behind mean_block_tx
  std::uint64_t transmissions = 0;

  bool operator==(const MetricsReport&) const = default;
};

struct RunResult {
  ExperimentConfig config;
  std::vector<MetricsReport> replications;
  MetricsReport mean;
  MetricsReport stderr_;  // standard error across replications (0 for one)
};

/// Optional CSV event trace:
/// slot,actor,event,seq,block_seq,rank,buffer_size
class TraceSink {
 public:
  explicit TraceSink(std::ostream& out);
  void event(Slot slot, std::string_view actor, std::string_view event, std::int64_t seq,
             std::int64_t block_seq, std::int64_t rank, std::int64_t buffer_size);
  static constexpr std::string_view kHeader = "slot,actor,event,seq,block_seq,rank,buffer_size";

 private:
  std::ostream& out_;
};

/// One replication with the given seed. Single-threaded and deterministic.
MetricsReport simulate(const ExperimentConfig& config, std::uint64_t seed,
                       TraceSink* trace = nullptr);

/// All replications (seeds seed+1, seed+2, ...) run in parallel.
RunResult run(const ExperimentConfig& config);
/// Same as run() on the calling thread only; kept as the reference path.
RunResult run_serial(const ExperimentConfig& config);

/// Mean and standard error of a set of replication reports.
void summarize(RunResult& result);

struct SweepPoint {
  std::string axis;
  double value;
  RunResult result;
};

/// Axis is one of W, p, B, p_a, copies. Points and replications run in
/// parallel; the table is ordered by value then replication.
std::vector<SweepPoint> sweep(const ExperimentConfig& base, std::string_view axis,
                              std::span<const double> values);

/// Streaming maximum over consecutive cohorts of `cohort_size` sequence
/// numbers. Values may arrive in any order; a cohort is closed once all of
/// its members have been seen.
class CohortMax {
 public:
  explicit CohortMax(std::uint64_t cohort_size);
  void add(std::uint64_t seq, std::uint64_t value);
  std::uint64_t complete() const { return complete_; }
  double mean() const;

 private:
  struct Open {
    std::uint64_t seen = 0;
    std::uint64_t max = 0;
  };
  std::uint64_t cohort_size_;
  std::uint64_t base_ = 0;
  std::deque<Open> open_;
  std::uint64_t complete_ = 0;
  double sum_ = 0.0;
};

/// Mean over consecutive W-packet cohorts of the largest transmission
/// count, from per-packet counts indexed by sequence number. Throws
/// InsufficientData with fewer than 10 complete cohorts.
double measure_window_max_tx(std::span<const std::uint32_t> tx_counts, std::uint32_t window);

}  // namespace srwin::sim
