#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "srwin/analytics.hpp"

namespace a = srwin::analytics;

namespace {

// E[max of W geometrics] = sum_{n>=0} P(max > n), summed in long double
// until the tail term is negligible.
long double oracle_max_geometric(unsigned w, long double p) {
  long double sum = 0.0L;
  for (int n = 0; n < 100000; ++n) {
    const long double term = 1.0L - std::pow(1.0L - std::pow(p, n), static_cast<long double>(w));
    sum += term;
    if (n > 0 && term < 1e-18L) break;
  }
  return sum;
}

// -sum_{i=1}^{W} C(W,i) (-1)^i / (1 - p^i) in long double; only usable for
// small W where the cancellation stays within precision.
long double oracle_alternating(unsigned w, long double p) {
  long double sum = 0.0L;
  long double binom = 1.0L;
  for (unsigned i = 1; i <= w; ++i) {
    binom = binom * (w - i + 1) / i;
    sum += binom * ((i % 2 == 1) ? 1.0L : -1.0L) / (1.0L - std::pow(p, i));
  }
  return sum;
}

long double log_choose(unsigned n, unsigned k) {
  return std::lgamma(n + 1.0L) - std::lgamma(k + 1.0L) - std::lgamma(n - k + 1.0L);
}

}  // namespace

TEST_SUITE("analytics") {
  TEST_CASE("E[N_ARQ] examples") {
    CHECK(a::arq_max_retx_exact(1, 0.5) == doctest::Approx(2.0).epsilon(1e-12));
    for (unsigned w : {1U, 7U, 64U, 1000U}) CHECK(a::arq_max_retx_exact(w, 0.0) == 1.0);
    // Inclusion-exclusion: E[max] = 2 E[N] - E[min], min geometric with success 1 - p^2.
    const double ie = 2.0 * 2.0 - 1.0 / (1.0 - 0.25);
    CHECK(ie == doctest::Approx(8.0 / 3.0));
    CHECK(a::arq_max_retx_exact(2, 0.5) == doctest::Approx(ie).epsilon(1e-12));
    CHECK(a::arq_max_retx_alternating(2, 0.5) == doctest::Approx(8.0 / 3.0).epsilon(1e-12));
  }

  TEST_CASE("E[N_ARQ] against independent oracles") {
    for (unsigned w : {1U, 2U, 5U, 16U, 64U, 300U, 4096U}) {
      for (double p : {0.01, 0.1, 0.5, 0.9}) {
        const double expect = static_cast<double>(oracle_max_geometric(w, p));
        CHECK(a::arq_max_retx_exact(w, p) == doctest::Approx(expect).epsilon(1e-9));
        CHECK(a::arq_max_retx_series(w, p) == doctest::Approx(expect).epsilon(1e-9));
      }
    }
    for (unsigned w = 1; w <= 20; ++w) {
      for (double p : {0.1, 0.3, 0.5, 0.7}) {
        CHECK(a::arq_max_retx_alternating(w, p) ==
              doctest::Approx(static_cast<double>(oracle_alternating(w, p))).epsilon(1e-10));
      }
    }
  }

  TEST_CASE("alternating and series forms agree for W <= 64") {
    double worst = 0.0;
    for (unsigned w = 1; w <= 64; ++w) {
      for (int k = 1; k <= 9; ++k) {
        const double p = k / 10.0;
        worst = std::max(worst, std::abs(a::arq_max_retx_alternating(w, p) - a::arq_max_retx_series(w, p)));
      }
    }
    CHECK(worst <= 1e-8);
  }

  TEST_CASE("E[N_ARQ] is monotone in W and p") {
    for (double p = 0.0; p <= 0.9 + 1e-12; p += 0.05) {
      double prev = 0.0;
      for (unsigned w = 1; w <= 1024; w = w < 16 ? w + 1 : w * 2) {
        const double v = a::arq_max_retx_exact(w, p);
        CHECK(v >= prev - 1e-12);
        prev = v;
      }
    }
    for (unsigned w : {1U, 10U, 500U}) {
      double prev = 0.0;
      for (double p = 0.0; p <= 0.9 + 1e-12; p += 0.05) {
        const double v = a::arq_max_retx_exact(w, p);
        CHECK(v >= prev - 1e-12);
        prev = v;
      }
    }
  }

  TEST_CASE("domain errors") {
    CHECK_THROWS_AS((void)a::arq_max_retx_exact(4, 1.0), std::domain_error);
    CHECK_THROWS_AS((void)a::arq_max_retx_exact(4, -0.1), std::domain_error);
    CHECK_THROWS_AS((void)a::arq_max_retx_asymptotic(16, 0.0), std::domain_error);
    CHECK_THROWS_AS((void)a::fec_max_retx_asymptotic_regime1(8, 4, 0.1), std::domain_error);
    CHECK_THROWS_AS((void)a::fec_window_cdf(4, 8, 3, 0.1), std::invalid_argument);
    a::ProtocolParams bad;
    bad.window = 8;
    bad.block_size = 3;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  }

  TEST_CASE("CDF of the window maximum") {
    CHECK(a::arq_cdf(1, 5, 0.2) == doctest::Approx(std::pow(0.8, 5)));
    CHECK(a::arq_cdf(2, 2, 0.5) == doctest::Approx(0.5625));
    CHECK(a::arq_cdf(200, 64, 0.5) == doctest::Approx(1.0));
  }

  TEST_CASE("Gumbel asymptote") {
    CHECK(a::arq_max_retx_asymptotic(1024, 0.1) == doctest::Approx(3.2610).epsilon(1e-4));
    double prev_gap = 1e9;
    for (int e = 4; e <= 20; e += 4) {
      const unsigned w = 1U << e;
      const double exact = a::arq_max_retx_exact(w, 0.1);
      const double asym = a::arq_max_retx_asymptotic(w, 0.1);
      const double gap = std::abs(exact / asym - 1.0);
      CHECK(gap < prev_gap);
      prev_gap = gap;
      CHECK(std::abs(exact - asym) < 1.0);
    }
    const auto k = a::asymptotic_constants(0.1);
    CHECK(k.lambda == doctest::Approx(-std::log(0.1)));
    CHECK(k.gamma == doctest::Approx(0.5772156649));
    for (double p = 0.05; p < 1.0; p += 0.05) {
      const double eps = a::asymptotic_constants(p).eps_geom;
      CHECK(eps >= 0.0);
      CHECK(eps < 1.0);
    }
  }

  TEST_CASE("negative binomial") {
    CHECK(a::negbin_pmf(5, 5, 0.3) == doctest::Approx(std::pow(0.7, 5)));
    for (unsigned n = 1; n < 10; ++n) {
      CHECK(a::negbin_pmf(n, 1, 0.4) == doctest::Approx(0.6 * std::pow(0.4, n - 1)));
    }
    CHECK(a::negbin_pmf(3, 2, 0.5) == doctest::Approx(0.25));
    CHECK(a::negbin_pmf(2, 3, 0.5) == 0.0);
    // Log-domain oracle at large arguments.
    const double direct = std::exp(static_cast<double>(log_choose(2199, 1999)) + 2000 * std::log(0.9) +
                                   200 * std::log(0.1));
    CHECK(a::negbin_pmf(2200, 2000, 0.1) == doctest::Approx(direct).epsilon(1e-9));
    for (unsigned b : {1U, 10U, 2000U}) {
      double total = 0.0;
      for (std::uint64_t n = b; n < b * 3 + 200; ++n) total += a::negbin_pmf(n, b, 0.1);
      CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
      CHECK(a::negbin_cdf(b * 3 + 199, b, 0.1) == doctest::Approx(total).epsilon(1e-9));
    }
  }

  TEST_CASE("block window CDF") {
    CHECK(a::fec_window_cdf(8, 8, 8, 0.0) == doctest::Approx(1.0));
    CHECK(a::fec_window_cdf(4, 16, 4, 0.2) == doctest::Approx(std::pow(0.8, 16)));
    CHECK(a::fec_window_cdf(3, 4, 2, 0.5) == doctest::Approx(0.25));
    for (unsigned n = 1; n < 30; ++n) {
      CHECK(a::fec_window_cdf(n, 12, 1, 0.3) == doctest::Approx(a::arq_cdf(n, 12, 0.3)).epsilon(1e-12));
    }
    double prev = 0.0;
    for (unsigned n = 4; n < 200; ++n) {
      const double v = a::fec_window_cdf(n, 64, 4, 0.2);
      CHECK(v >= prev);
      prev = v;
    }
    CHECK(prev == doctest::Approx(1.0));
  }

  TEST_CASE("regime I and regime II") {
    const double lam = -std::log(0.1);
    CHECK(a::fec_max_retx_asymptotic_regime1(1000, 1, 0.1) ==
          doctest::Approx(a::arq_max_retx_asymptotic(1000, 0.1)).epsilon(1e-12));
    const double m = 1024.0;
    const double expect = (0.5772156649 + std::log(m) + 3.0 * std::log(std::log(m)) - std::log(6.0)) / lam;
    CHECK(expect == doctest::Approx(5.0053).epsilon(1e-4));
    CHECK(a::fec_max_retx_asymptotic_regime1(4096, 4, 0.1) == doctest::Approx(expect).epsilon(1e-9));

    auto r = a::fec_retx_regime2(64, 0.0);
    CHECK(r.per_block == 64.0);
    CHECK(r.per_packet == 1.0);
    r = a::fec_retx_regime2(100, 0.2);
    CHECK(r.per_block == doctest::Approx(125.0));
    CHECK(r.per_packet == doctest::Approx(1.25));
    CHECK(a::fec_buffer_regime2(300, 0.0) == 300.0);
    CHECK(a::fec_buffer_regime2(1024, 0.2) == doctest::Approx(1280.0));
  }

  TEST_CASE("ARQ buffer bounds") {
    const auto b = a::buffer_bounds_arq(2, 0.5);
    CHECK(b.upper == doctest::Approx(8.0 / 3.0));
    for (unsigned w : {2U, 64U, 4096U}) {
      for (double p : {0.01, 0.1, 0.5}) {
        const auto bb = a::buffer_bounds_arq(w, p);
        CHECK(bb.lower <= bb.upper);
        CHECK(bb.lower >= 0.0);
      }
    }
  }

  TEST_CASE("Little's law relation") {
    CHECK(a::littles_delay(0.0, 100, 0.1, 100.0) == 0.0);
    CHECK(a::littles_delay(64.0, 64, 0.0, 32.0) == doctest::Approx(32.0));
    CHECK(a::littles_delay(500.0, 1000, 0.1, 100.0) == doctest::Approx(55.5556).epsilon(1e-5));
  }

  TEST_CASE("dependent coding") {
    CHECK(a::dependent_tx_expected(1, 0.0) == doctest::Approx(2.0));
    CHECK(a::dependent_tx_expected(2, 0.0) == doctest::Approx(10.0 / 3.0));
    CHECK(a::dependent_tx_expected(30, 0.0) - 30.0 == doctest::Approx(1.606695).epsilon(1e-6));
    CHECK(a::dependent_tx_expected(8, 0.5) == doctest::Approx(2.0 * a::dependent_tx_expected(8, 0.0)));
    double prev = 0.0;
    for (unsigned b = 1; b <= 30; ++b) {
      const double extra = a::dependent_tx_expected(b, 0.0) - b;
      CHECK(extra > prev);
      prev = extra;
    }
    CHECK(prev == doctest::Approx(1.606695).epsilon(1e-4));
  }

  TEST_CASE("decode success probability") {
    CHECK(a::decode_success_prob(1, 0) == doctest::Approx(0.5));
    CHECK(a::decode_success_prob(32, 60) == doctest::Approx(1.0));
    CHECK(a::decode_success_prob(64, 0) == doctest::Approx(0.288788).epsilon(1e-5));
    for (unsigned b = 1; b <= 64; ++b) {
      for (unsigned d = 0; d <= 32; ++d) {
        CHECK(a::decode_success_prob(b, d) >= a::decode_success_lower_bound(d) - 1e-15);
      }
    }
    CHECK(a::decode_success_lower_bound(3) == doctest::Approx(0.875));
  }

  TEST_CASE("throughput loss from dependent packets") {
    CHECK(a::extra_packet_budget(1024) == 11);
    CHECK(a::extra_packet_budget(1) == 1);
    CHECK(a::throughput_loss_dependent(1024, 1024, 0.0, 1.0) == doctest::Approx(11.0 / 1024.0));
    double prev = 1e9;
    for (unsigned w : {64U, 256U, 1024U, 4096U}) {
      const double v = a::throughput_loss_dependent(w, w, 0.1, 1.0);
      CHECK(v < prev);
      prev = v;
    }
    CHECK(a::throughput_loss_dependent(4, 64, 0.1, 1.0) ==
          doctest::Approx(a::throughput_loss_dependent(4, 4096, 0.1, 1.0)));
  }

  TEST_CASE("lossy feedback") {
    CHECK(a::lossy_feedback_throughput(0.1, 0.0, 1, 2.0) == doctest::Approx(1.8));
    CHECK(a::lossy_feedback_throughput(0.1, 0.1, 1, 1.0) == doctest::Approx(0.81));
    const double full = a::lossy_feedback_throughput(0.0, 0.0, 1, 1.0);
    CHECK(1.0 - a::lossy_feedback_throughput(0.0, 0.5, 10, 1.0) / full == doctest::Approx(1.0 / 1024));
    CHECK(a::redundant_ack_count(1024, 0.0) == 10);
    CHECK(a::redundant_ack_count(2, 0.0) == 1);
    CHECK(a::redundant_ack_count(1024, 0.5) == 15);
  }

  TEST_CASE("physical layer helpers") {
    auto l = a::packet_loss_from_ber(1000, 0.0);
    CHECK(l.exact == 0.0);
    CHECK(l.approx == 0.0);
    l = a::packet_loss_from_ber(1000, 1e-4);
    CHECK(l.exact == doctest::Approx(0.095167).epsilon(1e-5));
    CHECK(l.approx == doctest::Approx(0.0951626).epsilon(1e-6));
    double prev = 0.0;
    for (std::uint64_t len = 1; len < 5000; len += 97) {
      const double v = a::packet_loss_from_ber(len, 1e-3).exact;
      CHECK(v >= prev);
      prev = v;
    }
    CHECK(a::inverse_q(0.5) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(a::inverse_q(0.001) == doctest::Approx(3.090232).epsilon(1e-6));
    CHECK(a::inverse_q(0.975) == doctest::Approx(-1.959964).epsilon(1e-6));
    CHECK(a::finite_blocklength_rate(0.7, 0.0, 100, 0.01) == doctest::Approx(0.7));
    CHECK(a::finite_blocklength_rate(0.7, 2.0, 100, 0.5) == doctest::Approx(0.7));
    CHECK(a::finite_blocklength_rate(0.5, 1.0, 1000, 0.001) == doctest::Approx(0.4023).epsilon(1e-4));
  }

  TEST_CASE("asymptotic summary table") {
    a::ProtocolParams params;
    params.window = 256;
    params.block_size = 256;
    params.loss = 0.1;
    params.rtt = 256;
    params.capacity = 1;
    const auto t = a::comparison_summary(params);
    REQUIRE(t.rows.size() == 3);
    CHECK(t.rows[0].protocol == "SR-ARQ");
    CHECK(t.rows[0].buffer_class == "Theta(W log W)");
    CHECK(t.rows[2].buffer_class == "Theta(W)");
    CHECK(t.rows[2].delay_class == "Theta(1)");
    CHECK(t.rows[2].feedback_class == "Theta(1)");
    CHECK(t.fec_row == 2);
    for (const auto& row : t.rows) CHECK(row.throughput == doctest::Approx(0.9));
    params.block_size = 4;
    CHECK(a::comparison_summary(params).fec_row == 1);
  }
}
