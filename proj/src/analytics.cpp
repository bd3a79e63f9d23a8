#include "srwin/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace srwin::analytics {

namespace {

void require_loss(double p, const char* name = "p") {
  if (!(p >= 0.0 && p < 1.0)) {
    throw std::domain_error(std::string(name) + " must lie in [0, 1), got " + std::to_string(p));
  }
}

void require_open_loss(double p, const char* name = "p") {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error(std::string(name) + " must lie in (0, 1), got " + std::to_string(p));
  }
}

void require_window(std::uint32_t window, std::uint32_t min = 1) {
  if (window < min) {
    throw std::domain_error("W must be at least " + std::to_string(min));
  }
}

std::uint32_t block_count(std::uint32_t window, std::uint32_t block_size) {
  if (block_size == 0 || window == 0 || window % block_size != 0) {
    throw std::invalid_argument("W (" + std::to_string(window) +
                                ") must be a positive integer multiple of B (" +
                                std::to_string(block_size) + ")");
  }
  return window / block_size;
}

// ln C(n, k)
double log_choose(double n, double k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// 1 - (1 - x)^W without cancellation for small x.
double one_minus_pow_complement(double x, std::uint32_t window) {
  if (x >= 1.0) return 1.0;
  return -std::expm1(static_cast<double>(window) * std::log1p(-x));
}

// log of sum_{i=0}^{k} C(B+i-1, B-1) p^i, accumulated in log space.
double log_negbin_partial_sum(std::uint64_t k, std::uint32_t block_size, double p) {
  if (p == 0.0) return 0.0;
  const double log_p = std::log(p);
  double running_max = 0.0;  // term i = 0 has log value 0
  double scaled_sum = 1.0;   // sum of exp(log_term - running_max)
  double log_term = 0.0;
  for (std::uint64_t i = 1; i <= k; ++i) {
    log_term += log_p + std::log(static_cast<double>(block_size + i - 1) / static_cast<double>(i));
    if (log_term > running_max) {
      scaled_sum = scaled_sum * std::exp(running_max - log_term) + 1.0;
      running_max = log_term;
    } else {
      const double rel = std::exp(log_term - running_max);
      scaled_sum += rel;
      if (rel < 1e-18 && static_cast<double>(i) > static_cast<double>(block_size) * p / (1.0 - p)) {
        break;  // past the mode and negligible
      }
    }
  }
  return running_max + std::log(scaled_sum);
}

}  // namespace

void ProtocolParams::validate() const {
  require_window(window);
  require_loss(loss, "p");
  require_loss(ack_loss, "p_a");
  if (!(rtt > 0.0)) throw std::domain_error("R must be positive");
  if (!(capacity > 0.0)) throw std::domain_error("C must be positive");
  if (block_size < 1 || block_size > window) {
    throw std::invalid_argument("B must satisfy 1 <= B <= W");
  }
  (void)block_count(window, block_size);
}

AsymptoticConstants asymptotic_constants(double p) {
  require_open_loss(p);
  const double lp = std::log(p);
  return {-lp, kEulerGamma, 1.0 / (1.0 - p) + 1.0 / lp};
}

double arq_cdf(std::uint64_t n, std::uint32_t window, double p) {
  require_window(window);
  require_loss(p);
  if (n < 1) throw std::domain_error("n must be at least 1");
  return std::pow(-std::expm1(static_cast<double>(n) * std::log(p)), window);
}

double arq_max_retx_alternating(std::uint32_t window, double p) {
  require_window(window);
  require_loss(p);
  using Big = boost::multiprecision::cpp_bin_float_50;
  const Big q(p);
  Big binom = 1;  // C(W, 0)
  Big p_pow = 1;
  Big sum = 0;
  for (std::uint32_t i = 1; i <= window; ++i) {
    binom = binom * (window - i + 1) / i;
    p_pow *= q;
    const Big term = binom / (1 - p_pow);
    if (i % 2 == 1) {
      sum += term;  // -(-1)^i = +1 for odd i
    } else {
      sum -= term;
    }
  }
  return sum.convert_to<double>();
}

double arq_max_retx_series(std::uint32_t window, double p, double term_cutoff) {
  require_window(window);
  require_loss(p);
  // n = 1 contributes 1 - 0^W = 1.
  double total = 1.0;
  double p_pow = p;  // p^{n-1} for n = 2
  for (int n = 2; n < 100000; ++n) {
    const double term = one_minus_pow_complement(p_pow, window);
    total += term;
    if (term < term_cutoff) break;
    p_pow *= p;
  }
  return total;
}

double arq_max_retx_exact(std::uint32_t window, double p, std::uint32_t alternating_limit) {
  if (window <= alternating_limit) return arq_max_retx_alternating(window, p);
  return arq_max_retx_series(window, p);
}

double arq_max_retx_asymptotic(std::uint32_t window, double p) {
  require_window(window, 2);
  require_open_loss(p);
  return (std::log(static_cast<double>(window)) + kEulerGamma) / -std::log(p);
}

Bounds buffer_bounds_arq(std::uint32_t window, double p) {
  require_window(window, 2);
  require_open_loss(p);
  const double mean_max = arq_max_retx_exact(window, p);
  const double inv_lambda = 1.0 / -std::log(p);
  const double w = static_cast<double>(window);
  return {0.5 * w * std::max(0.0, mean_max - inv_lambda), (w - 1.0) * mean_max};
}

double negbin_pmf(std::uint64_t n, std::uint32_t block_size, double p) {
  require_loss(p);
  if (block_size < 1) throw std::invalid_argument("B must be at least 1");
  if (n < block_size) return 0.0;
  const auto failures = n - block_size;
  if (p == 0.0) return failures == 0 ? 1.0 : 0.0;
  const double log_pmf = log_choose(static_cast<double>(n - 1), static_cast<double>(block_size - 1)) +
                         block_size * std::log1p(-p) + static_cast<double>(failures) * std::log(p);
  return std::exp(log_pmf);
}

double negbin_cdf(std::uint64_t n, std::uint32_t block_size, double p) {
  require_loss(p);
  if (block_size < 1) throw std::invalid_argument("B must be at least 1");
  if (n < block_size) return 0.0;
  const double log_cdf =
      block_size * std::log1p(-p) + log_negbin_partial_sum(n - block_size, block_size, p);
  return std::min(1.0, std::exp(log_cdf));
}

double fec_window_cdf(std::uint64_t n, std::uint32_t window, std::uint32_t block_size, double p) {
  require_loss(p);
  const auto blocks = block_count(window, block_size);
  if (n < block_size) return 0.0;
  const double log_block_cdf =
      block_size * std::log1p(-p) + log_negbin_partial_sum(n - block_size, block_size, p);
  return std::exp(std::min(0.0, static_cast<double>(blocks) * log_block_cdf));
}

double fec_max_retx_asymptotic_regime1(std::uint32_t window, std::uint32_t block_size, double p) {
  require_open_loss(p);
  const auto blocks = block_count(window, block_size);
  if (blocks < 3) {
    throw std::domain_error("regime I needs M = W/B >= 3 (ln ln M must be positive)");
  }
  const double log_m = std::log(static_cast<double>(blocks));
  const double b_m = log_m + (block_size - 1.0) * std::log(log_m) - std::lgamma(block_size);
  return (kEulerGamma + b_m) / -std::log(p);
}

PerBlockAndPacket fec_retx_regime2(std::uint32_t block_size, double p) {
  require_loss(p);
  if (block_size < 1) throw std::invalid_argument("B must be at least 1");
  return {block_size / (1.0 - p), 1.0 / (1.0 - p)};
}

double fec_buffer_regime2(std::uint32_t window, double p) {
  require_window(window);
  require_loss(p);
  return window / (1.0 - p);
}

double littles_delay(double mean_occupancy, std::uint32_t window, double p, double rtt) {
  require_window(window);
  require_loss(p);
  if (mean_occupancy < 0.0) throw std::domain_error("E[Q] must be non-negative");
  return rtt * mean_occupancy / ((1.0 - p) * window);
}

double dependent_tx_expected(std::uint32_t block_size, double p) {
  require_loss(p);
  if (block_size < 1) throw std::invalid_argument("B must be at least 1");
  double extra = 0.0;
  for (std::uint32_t k = 1; k <= block_size; ++k) {
    // 1/(2^k - 1) underflows harmlessly for large k.
    extra += 1.0 / std::expm1(k * std::numbers::ln2);
  }
  return (block_size + extra) / (1.0 - p);
}

double decode_success_prob(std::uint32_t block_size, std::uint32_t delta) {
  if (block_size < 1) throw std::invalid_argument("B must be at least 1");
  double log_prob = 0.0;
  for (std::uint32_t k = 1; k <= block_size; ++k) {
    log_prob += std::log1p(-std::ldexp(1.0, -static_cast<int>(k + delta)));
  }
  return std::exp(log_prob);
}

double decode_success_lower_bound(std::uint32_t delta) {
  return 1.0 - std::ldexp(1.0, -static_cast<int>(delta));
}

std::uint32_t extra_packet_budget(std::uint32_t block_size) {
  if (block_size < 1) throw std::invalid_argument("B must be at least 1");
  std::uint32_t ceil_log2 = 0;
  while ((std::uint64_t{1} << ceil_log2) < block_size) ++ceil_log2;
  return ceil_log2 + 1;
}

double throughput_loss_dependent(std::uint32_t block_size, std::uint32_t window, double p,
                                 double rtt) {
  require_loss(p);
  const auto blocks = block_count(window, block_size);
  const double delta = extra_packet_budget(block_size);
  return rtt / (1.0 - p) * (blocks * delta / window);
}

double lossy_feedback_throughput(double p, double ack_loss, std::uint32_t copies, double capacity) {
  require_loss(p);
  require_loss(ack_loss, "p_a");
  if (copies < 1) throw std::domain_error("ACK copies must be at least 1");
  return (1.0 - p) * (1.0 - std::pow(ack_loss, copies)) * capacity;
}

std::uint32_t redundant_ack_count(std::uint32_t window, double epsilon) {
  require_window(window, 2);
  if (!(epsilon >= 0.0)) throw std::domain_error("epsilon must be non-negative");
  const double n = (1.0 + epsilon) * std::log2(static_cast<double>(window));
  return static_cast<std::uint32_t>(std::ceil(n - 1e-9));
}

LossFromBer packet_loss_from_ber(std::uint64_t length_bits, double bit_error_rate) {
  if (length_bits < 1) throw std::domain_error("packet length must be at least 1 bit");
  if (!(bit_error_rate >= 0.0 && bit_error_rate <= 1.0)) {
    throw std::domain_error("bit error rate must lie in [0, 1]");
  }
  const double l = static_cast<double>(length_bits);
  const double exact = bit_error_rate == 1.0 ? 1.0 : -std::expm1(l * std::log1p(-bit_error_rate));
  return {exact, -std::expm1(-l * bit_error_rate)};
}

double inverse_q(double p) {
  require_open_loss(p);
  // Acklam's rational approximation to the standard normal quantile.
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  // Q^{-1}(p) = Phi^{-1}(1 - p) = -Phi^{-1}(p).
  const double u = p;
  double x;
  if (u < p_low) {
    const double q = std::sqrt(-2.0 * std::log(u));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (u <= 1.0 - p_low) {
    const double q = u - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-u));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // One Halley step on Phi(x) = p.
  const double e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - u;
  const double step = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  x -= step / (1.0 + 0.5 * x * step);
  return -x;
}

double finite_blocklength_rate(double channel_capacity, double dispersion, std::uint64_t blocklength,
                               double p) {
  require_open_loss(p);
  if (blocklength < 1) throw std::domain_error("blocklength must be at least 1");
  if (dispersion < 0.0) throw std::domain_error("dispersion must be non-negative");
  return channel_capacity - std::sqrt(dispersion / static_cast<double>(blocklength)) * inverse_q(p);
}

ComparisonSummary comparison_summary(const ProtocolParams& params) {
  params.validate();
  const double p = params.loss;
  const double w = params.window;
  const double throughput = (1.0 - p) * params.capacity;
  const auto blocks = params.blocks();
  const auto delay_of = [&](double q) { return littles_delay(q, params.window, p, params.rtt); };
  const auto bits_for = [](double distinct) {
    return std::ceil(std::log2(std::max(2.0, distinct)));
  };
  const auto nan = std::numeric_limits<double>::quiet_NaN();

  ComparisonSummary summary;

  {
    const double mean_max = arq_max_retx_exact(params.window, p);
    const double buffer = (w - 1.0) * mean_max;
    summary.rows.push_back({"SR-ARQ", "(1-p)C", "Theta(W log W)", "Theta(log W)", "Theta(log W)",
                            throughput, mean_max, buffer, delay_of(buffer), bits_for(buffer + w)});
  }
  {
    double retx = nan;
    double buffer = nan;
    if (blocks >= 3 && p > 0.0) {
      retx = fec_max_retx_asymptotic_regime1(params.window, params.block_size, p);
      buffer = (w - 1.0) * retx;
    }
    summary.rows.push_back({"SR-FEC, B=Theta(1)", "(1-p)C", "Theta(W log W)", "Theta(log W)",
                            "Theta(log W)", throughput, retx, buffer,
                            std::isnan(buffer) ? nan : delay_of(buffer),
                            bits_for(blocks * (std::isnan(retx) ? 1.0 : retx + 1.0))});
  }
  {
    const double buffer = fec_buffer_regime2(params.window, p);
    summary.rows.push_back({"SR-FEC, B=Theta(W)", "(1-p)C", "Theta(W)", "Theta(1)", "Theta(1)",
                            throughput, fec_retx_regime2(params.block_size, p).per_block, buffer,
                            delay_of(buffer), bits_for(blocks + 1.0)});
  }
  summary.fec_row = blocks >= 3 ? 1 : 2;
  return summary;
}

}  // namespace srwin::analytics
