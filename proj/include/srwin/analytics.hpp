#pragma once

#include <cstdint>
#include <string>
#include <vector>

// Closed-form performance of selective-repeat ARQ and block-coded
// selective repeat over a Bernoulli-loss channel with a fixed round trip.
//
// Notation: W window (packets), p forward loss, p_a feedback loss,
// R round trip (slots), C capacity (packets/slot), B coding block size,
// M = W / B blocks per window. Every function validates its domain and
// throws std::domain_error (probability or range violations) or
// std::invalid_argument (inconsistent integer parameters).
namespace srwin::analytics {

inline constexpr double kEulerGamma = 0.57721566490153286061;

/// Window size above which E[N_ARQ] switches from the alternating binomial
/// sum to the tail-sum series.
inline constexpr std::uint32_t kAlternatingSumLimit = 64;

struct ProtocolParams {
  std::uint32_t window = 64;
  double loss = 0.1;
  double ack_loss = 0.0;
  double rtt = 64.0;
  double capacity = 1.0;
  std::uint32_t block_size = 64;

  std::uint32_t blocks() const { return window / block_size; }
  /// Throws std::domain_error / std::invalid_argument on an invalid set.
  void validate() const;
};

/// Geometric-vs-exponential constants at loss probability p.
struct AsymptoticConstants {
  double lambda;    // -ln p
  double gamma;     // Euler's constant
  double eps_geom;  // E[geometric] - E[exponential] = 1/(1-p) + 1/ln p
};
AsymptoticConstants asymptotic_constants(double p);

// ---------------------------------------------------------------------------
// SR-ARQ

/// P(N_ARQ <= n) = (1 - p^n)^W.
double arq_cdf(std::uint64_t n, std::uint32_t window, double p);

/// E[N_ARQ], the expected maximum transmission count over W packets.
/// Uses the alternating binomial sum for W <= `alternating_limit` and the
/// tail-sum series above it.
double arq_max_retx_exact(std::uint32_t window, double p,
                          std::uint32_t alternating_limit = kAlternatingSumLimit);

/// -sum_{i=1}^{W} C(W,i) (-1)^i / (1 - p^i), evaluated in 50-digit
/// floating point; the terms cancel to ~2^W in magnitude.
double arq_max_retx_alternating(std::uint32_t window, double p);

/// sum_{n>=1} [1 - (1 - p^{n-1})^W], truncated once a term drops below
/// `term_cutoff`.
double arq_max_retx_series(std::uint32_t window, double p, double term_cutoff = 1e-12);

/// Gumbel-mean approximation (ln W + gamma) / (-ln p). Large-W regime only.
double arq_max_retx_asymptotic(std::uint32_t window, double p);

struct Bounds {
  double lower;
  double upper;
};

/// Envelope on E[Q_ARQ]: lower (W/2) max(0, E[N_ARQ] - 1/lambda),
/// upper (W-1) E[N_ARQ].
Bounds buffer_bounds_arq(std::uint32_t window, double p);

// ---------------------------------------------------------------------------
// SR-FEC

/// Negative binomial pmf of the transmissions needed for B successes.
/// Returns 0 for n < B.
double negbin_pmf(std::uint64_t n, std::uint32_t block_size, double p);

/// P(N_i <= n) for a single block of size B.
double negbin_cdf(std::uint64_t n, std::uint32_t block_size, double p);

/// P(max over M = W/B blocks of N_i <= n).
double fec_window_cdf(std::uint64_t n, std::uint32_t window, std::uint32_t block_size, double p);

/// Regime I (B fixed, M large): lambda^{-1} (gamma + ln M + (B-1) ln ln M - ln (B-1)!).
/// Requires M >= 3.
double fec_max_retx_asymptotic_regime1(std::uint32_t window, std::uint32_t block_size, double p);

struct PerBlockAndPacket {
  double per_block;
  double per_packet;
};
/// Regime II (M fixed, B large): (B/(1-p), 1/(1-p)).
PerBlockAndPacket fec_retx_regime2(std::uint32_t block_size, double p);

/// Receiver occupancy with a single block per window: W / (1-p).
double fec_buffer_regime2(std::uint32_t window, double p);

// ---------------------------------------------------------------------------
// Shared relations and extensions

/// E[D] = R E[Q] / ((1-p) W).
double littles_delay(double mean_occupancy, std::uint32_t window, double p, double rtt);

/// Expected transmissions per block with uniformly random coefficient
/// masks: (B + sum_{k=1}^{B} 1/(2^k - 1)) / (1-p).
double dependent_tx_expected(std::uint32_t block_size, double p);

/// Probability that B + delta uniformly random masks span GF(2)^B:
/// prod_{k=1}^{B} (1 - 2^{-k-delta}).
double decode_success_prob(std::uint32_t block_size, std::uint32_t delta);

/// 1 - 2^{-delta}, a lower bound on decode_success_prob for every B.
double decode_success_lower_bound(std::uint32_t delta);

/// Extra-packet budget used for throughput loss: ceil(log2 B) + 1.
std::uint32_t extra_packet_budget(std::uint32_t block_size);

/// (R/(1-p)) M delta / W with delta = extra_packet_budget(B).
double throughput_loss_dependent(std::uint32_t block_size, std::uint32_t window, double p,
                                 double rtt);

/// (1-p)(1 - p_a^copies) C.
double lossy_feedback_throughput(double p, double ack_loss, std::uint32_t copies, double capacity);

/// ceil((1 + epsilon) log2 W).
std::uint32_t redundant_ack_count(std::uint32_t window, double epsilon);

struct LossFromBer {
  double exact;   // 1 - (1 - p_e)^L
  double approx;  // 1 - exp(-L p_e)
};
LossFromBer packet_loss_from_ber(std::uint64_t length_bits, double bit_error_rate);

/// Inverse of the standard normal complementary CDF.
double inverse_q(double p);

/// C - sqrt(V/n) Q^{-1}(p).
double finite_blocklength_rate(double channel_capacity, double dispersion, std::uint64_t blocklength,
                               double p);

// ---------------------------------------------------------------------------
// Asymptotic summary

struct ComparisonRow {
  std::string protocol;
  std::string throughput_class;
  std::string buffer_class;
  std::string delay_class;
  std::string feedback_class;
  double throughput;         // (1-p) C
  double retx_estimate;      // transmissions of the slowest unit per window
  double buffer_estimate;    // leading-constant estimate of E[Q], packets
  double delay_estimate;     // Little's law on buffer_estimate, slots
  double ack_header_bits;    // identifier bits needed per ACK
};

struct ComparisonSummary {
  std::vector<ComparisonRow> rows;  // SR-ARQ, SR-FEC B=Theta(1), SR-FEC B=Theta(W)
  /// Index into rows of the SR-FEC row matching params.block_size
  /// (M >= 3 reads as fixed B, M <= 2 as B proportional to W).
  std::size_t fec_row = 0;
};

ComparisonSummary comparison_summary(const ProtocolParams& params);

}  // namespace srwin::analytics
