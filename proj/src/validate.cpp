#include "srwin/validate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>

#include "srwin/analytics.hpp"
#include "srwin/gf2.hpp"
#include "srwin/montecarlo.hpp"
#include "srwin/rng.hpp"

namespace srwin::validate {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double relative_error(double simulated, double analytic) {
  return std::abs(simulated - analytic) / std::abs(analytic);
}

Check relative_check(std::string criterion, std::string name, double simulated, double analytic,
                     double tolerance) {
  const double err = relative_error(simulated, analytic);
  return {std::move(criterion), std::move(name), simulated, analytic, tolerance,
          std::isfinite(err) && err <= tolerance};
}

Check upper_check(std::string criterion, std::string name, double value, double limit) {
  return {std::move(criterion), std::move(name), value, limit, limit, value <= limit};
}

std::string fmt_point(const char* prefix, double w, double p) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%s W=%g p=%g", prefix, w, p);
  return buf;
}

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

}  // namespace

Validator::Validator(Options options) : options_(options) {}

const sim::MetricsReport& Validator::simulate(std::string label, const sim::ExperimentConfig& config) {
  Run run{std::move(label), config.resolved(), {}, false, {}};
  try {
    run.report = sim::simulate(run.config, options_.seed);
  } catch (const sim::SimulationError& e) {
    run.violated = true;
    run.violation = e.what();
    run.report.throughput = kNan;
    run.report.mean_occupancy = kNan;
    run.report.mean_delay = kNan;
    run.report.window_max_tx = kNan;
    run.report.mean_block_tx = kNan;
    run.report.littles_residual = kNan;
  }
  runs_.push_back(std::move(run));
  return runs_.back().report;
}

std::vector<Check> Validator::formula_agreement() {
  const auto start = Clock::now();
  double worst = 0.0;
  for (std::uint32_t w = 1; w <= 64; ++w) {
    for (int k = 1; k <= 9; ++k) {
      const double p = k / 10.0;
      worst = std::max(worst, std::abs(analytics::arq_max_retx_alternating(w, p) -
                                       analytics::arq_max_retx_series(w, p)));
    }
  }
  const double elapsed = seconds_since(start);
  return {
      {"C1", "max |alternating - series| E[N_ARQ], W<=64, p=0.1..0.9", worst, 0.0, tol(1e-8),
       worst <= tol(1e-8)},
      upper_check("C1", "runtime_s", elapsed, tol(1.0)),
  };
}

std::vector<Check> Validator::cohort_max() {
  const auto start = Clock::now();
  std::vector<std::uint32_t> windows{16, 64, 256};
  std::vector<double> losses{0.01, 0.05, 0.1};
  if (options_.window) windows = {*options_.window};
  if (options_.loss) losses = {*options_.loss};
  const double target = options_.full ? 1.0e5 : 1.0e4;

  std::vector<Check> checks;
  for (auto w : windows) {
    for (auto p : losses) {
      sim::ExperimentConfig cfg;
      cfg.protocol = sim::Protocol::kArq;
      cfg.window = w;
      cfg.loss = p;
      cfg.horizon = static_cast<Slot>(std::ceil(1.02 * target * w / (1.0 - p))) + 40ULL * w;
      const auto report = simulate(fmt_point("cohort", w, p), cfg);
      const double expected = analytics::arq_max_retx_exact(w, p);
      auto check = relative_check("C2", fmt_point("E[N_ARQ] cohort max", w, p),
                                  report.window_max_tx, expected, tol(0.05));
      if (static_cast<double>(report.cohorts) < target) check.pass = false;
      checks.push_back(check);
    }
  }
  checks.push_back(upper_check("C2", "runtime_s", seconds_since(start), tol(120.0)));
  return checks;
}

std::vector<Check> Validator::throughput() {
  std::vector<double> losses{0.05, 0.1};
  std::uint32_t w = options_.window.value_or(64);
  if (options_.loss) losses = {*options_.loss};
  const Slot horizon = options_.full ? 2'000'000 : 300'000;

  std::vector<Check> checks;
  for (auto p : losses) {
    sim::ExperimentConfig cfg;
    cfg.window = w;
    cfg.loss = p;
    cfg.horizon = horizon;

    cfg.protocol = sim::Protocol::kArq;
    auto r = simulate(fmt_point("throughput arq", w, p), cfg);
    checks.push_back(relative_check("C3", fmt_point("rho arq", w, p), r.throughput,
                                    1.0 - p, tol(0.01)));

    cfg.protocol = sim::Protocol::kFecIdeal;
    cfg.block_size = std::max<std::uint32_t>(1, w / 4);
    if (w % cfg.block_size != 0) cfg.block_size = w;
    r = simulate(fmt_point("throughput fec-ideal B=W/4", w, p), cfg);
    checks.push_back(relative_check("C3", fmt_point("rho fec-ideal B=W/4", w, p), r.throughput,
                                    1.0 - p, tol(0.01)));
  }

  const double p = options_.loss.value_or(0.1);
  for (double pa : {0.1, 0.3}) {
    sim::ExperimentConfig cfg;
    cfg.protocol = sim::Protocol::kArq;
    cfg.window = w;
    cfg.loss = p;
    cfg.ack_loss = pa;
    cfg.copies = 1;
    cfg.horizon = horizon;
    const auto r = simulate(fmt_point("lossy-ack arq", w, p) + " pa=" + std::to_string(pa).substr(0, 3), cfg);
    checks.push_back(relative_check("C3",
                                    fmt_point("rho arq lossy ACK", w, p) + " pa=" +
                                        std::to_string(pa).substr(0, 3),
                                    r.throughput, analytics::lossy_feedback_throughput(p, pa, 1, 1.0),
                                    tol(0.02)));
  }
  return checks;
}

std::vector<Check> Validator::littles_law() {
  std::vector<Check> checks;
  double worst = 0.0;
  std::size_t counted = 0;
  bool all_pass = true;
  for (const auto& run : runs_) {
    if (run.violated) {
      all_pass = false;
      continue;
    }
    if (run.report.delivered < 100'000) continue;
    ++counted;
    worst = std::max(worst, run.report.littles_residual);
    if (!(run.report.littles_residual < tol(0.02))) all_pass = false;
  }
  checks.push_back({"C4",
                    "max Little's-law residual over " + std::to_string(counted) +
                        " runs with >=1e5 deliveries",
                    worst, 0.0, tol(0.02), all_pass && counted > 0});
  return checks;
}

std::vector<Check> Validator::scaling() {
  const auto start = Clock::now();
  std::vector<std::uint32_t> windows =
      options_.full ? std::vector<std::uint32_t>{64, 256, 1024, 4096}
                    : std::vector<std::uint32_t>{64, 256, 1024};
  const double p = 0.1;
  std::vector<Check> checks;
  std::vector<double> arq_ratio;
  for (auto w : windows) {
    sim::ExperimentConfig cfg;
    cfg.window = w;
    cfg.loss = p;
    cfg.horizon = options_.full ? std::max<Slot>(2'000'000, 1000ULL * w)
                                : std::max<Slot>(400'000, 300ULL * w);

    cfg.protocol = sim::Protocol::kArq;
    const auto arq = simulate(fmt_point("scaling arq", w, p), cfg);
    arq_ratio.push_back(arq.mean_occupancy / (w * std::log(static_cast<double>(w))));

    cfg.protocol = sim::Protocol::kFecIdeal;
    cfg.block_size = w;
    const auto fec = simulate(fmt_point("scaling fec-ideal B=W", w, p), cfg);
    checks.push_back(relative_check("C5", fmt_point("fec-ideal B=W  E[Q]/W vs 1/(1-p)", w, p),
                                    fec.mean_occupancy / w, 1.0 / (1.0 - p), tol(0.05)));
  }
  const auto [lo, hi] = std::minmax_element(arq_ratio.begin(), arq_ratio.end());
  const double spread = *hi / *lo;
  checks.insert(checks.begin(), Check{"C5", "arq E[Q]/(W ln W) max/min over W sweep, p=0.1", spread,
                                      1.0, tol(4.0), std::isfinite(spread) && spread < tol(4.0)});
  checks.push_back(upper_check("C5", "runtime_s", seconds_since(start), tol(300.0)));
  return checks;
}

std::vector<Check> Validator::regime2() {
  std::vector<std::uint32_t> blocks{256, 1024};
  if (options_.window) blocks = {*options_.window};
  const double p = options_.loss.value_or(0.1);
  std::vector<Check> checks;
  for (auto b : blocks) {
    sim::ExperimentConfig cfg;
    cfg.protocol = sim::Protocol::kFecIdeal;
    cfg.window = b;
    cfg.block_size = b;
    cfg.loss = p;
    cfg.horizon = options_.full ? 2'000'000 : 500'000;
    const auto r = simulate(fmt_point("regime2 fec-ideal B=W", b, p), cfg);
    checks.push_back(relative_check("C6", fmt_point("per-packet transmissions M=1", b, p),
                                    r.window_max_tx,
                                    analytics::fec_retx_regime2(b, p).per_packet, tol(0.02)));
  }
  return checks;
}

std::vector<Check> Validator::dependent_coding() {
  sim::ExperimentConfig cfg;
  cfg.protocol = sim::Protocol::kFecOblivious;
  cfg.window = 30;
  cfg.block_size = 30;
  cfg.loss = 0.0;
  cfg.payload_length = 8;
  cfg.horizon = options_.full ? 2'000'000 : 400'000;
  const auto r = simulate("oblivious B=30 p=0", cfg);
  const double extra = r.mean_block_tx - 30.0;
  auto check = Check{"C7", "mean extra transmissions per block, oblivious B=30 p=0", extra, 1.606695,
                     tol(0.05), std::abs(extra - 1.606695) <= tol(0.05)};
  if (r.blocks < 10'000) check.pass = false;
  return {check};
}

std::vector<Check> Validator::decode_bound() {
  const std::uint64_t trials = options_.full ? 100'000 : 10'000;
  std::vector<Check> checks;
  for (std::uint32_t b : {8U, 16U, 32U}) {
    for (std::uint32_t delta = 0; delta <= 8; ++delta) {
      const auto est = montecarlo::full_rank_rate(b, delta, trials, options_.seed + 100 * b + delta);
      const double bound = analytics::decode_success_lower_bound(delta);
      const double margin = 3.0 * est.stderr_() * options_.tol_scale;
      char name[96];
      std::snprintf(name, sizeof name, "full-rank rate >= 1-2^-d - 3sigma, B=%u d=%u", b, delta);
      checks.push_back({"C8", name, est.rate(), bound, margin, est.rate() >= bound - margin &&
                                                                   (options_.tol_scale > 0.0 ||
                                                                    est.rate() > bound + 1.0)});
    }
  }
  return checks;
}

std::vector<Check> Validator::gf2_suite() {
  std::vector<Check> checks;
  BernoulliSource rng(stream_seed(options_.seed, Stream::kMonteCarlo));
  constexpr std::size_t kPayload = 16;
  std::uint64_t mismatches = 0;
  std::uint64_t rank_regressions = 0;
  for (int block = 0; block < 1000; ++block) {
    const auto b = static_cast<std::uint32_t>(1 + rng.bits() % 64);
    std::vector<std::vector<std::byte>> originals(b, std::vector<std::byte>(kPayload));
    for (auto& packet : originals) {
      for (auto& byte : packet) byte = static_cast<std::byte>(rng.bits());
    }
    gf2::Decoder decoder(b, kPayload);
    gf2::BitMask mask(b);
    std::size_t last_rank = 0;
    while (!decoder.is_full_rank()) {
      random_mask(rng, mask);
      std::vector<std::byte> coded(kPayload);
      for (std::uint32_t i = 0; i < b; ++i) {
        if (mask.test(i)) gf2::xor_into(coded, originals[i]);
      }
      decoder.absorb(mask, coded);
      if (decoder.rank() < last_rank || decoder.rank() > last_rank + 1) ++rank_regressions;
      last_rank = decoder.rank();
    }
    if (decoder.decode() != originals) ++mismatches;
  }
  checks.push_back({"C9", "round-trip mismatches over 1000 random blocks (B<=64)",
                    static_cast<double>(mismatches), 0.0, 0.0, mismatches == 0});
  checks.push_back({"C9", "rank monotonicity violations", static_cast<double>(rank_regressions), 0.0,
                    0.0, rank_regressions == 0});

  const std::uint64_t trials = options_.full ? 40'000 : 10'000;
  const auto est = montecarlo::full_rank_rate(32, 0, trials, options_.seed + 7);
  checks.push_back({"C9", "full-rank rate of 32 random masks, B=32", est.rate(), 0.2888, tol(0.01),
                    std::abs(est.rate() - 0.2888) <= tol(0.01)});
  return checks;
}

std::vector<Check> Validator::reliability() {
  std::size_t violations = 0;
  for (const auto& run : runs_) {
    if (run.violated) ++violations;
  }
  return {{"C10",
           "runs with delivery-order, window or payload violations (of " +
               std::to_string(runs_.size()) + ")",
           static_cast<double>(violations), 0.0, 0.0, violations == 0 && !runs_.empty()}};
}

std::vector<Check> Validator::determinism() {
  std::vector<Check> checks;
  sim::ExperimentConfig cfg;
  cfg.window = options_.window.value_or(64);
  cfg.loss = options_.loss.value_or(0.1);
  cfg.horizon = 200'000;
  cfg.replications = 4;
  std::uint64_t differing = 0;
  for (auto protocol : {sim::Protocol::kArq, sim::Protocol::kFecOblivious}) {
    cfg.protocol = protocol;
    cfg.block_size = 16;
    cfg.payload_length = 8;
    const auto first = sim::run(cfg);
    const auto second = sim::run(cfg);
    const auto serial = sim::run_serial(cfg);
    if (first.replications != second.replications) ++differing;
    if (first.replications != serial.replications) ++differing;
  }
  checks.push_back({"C11", "report mismatches across repeated and serial runs",
                    static_cast<double>(differing), 0.0, 0.0, differing == 0});
  return checks;
}

std::vector<Check> Validator::lossless_exact() {
  std::vector<Check> checks;
  sim::ExperimentConfig cfg;
  cfg.protocol = sim::Protocol::kArq;
  cfg.window = options_.window.value_or(64);
  cfg.loss = 0.0;
  cfg.horizon = 200'000;
  const auto r = simulate(fmt_point("lossless arq", cfg.window, 0.0), cfg);
  const double scale = options_.tol_scale;
  checks.push_back({"p0", "arq p=0 throughput == C", r.throughput, 1.0, 0.0,
                    r.throughput == 1.0 && scale > 0.0});
  checks.push_back({"p0", "arq p=0 E[Q] == 0", r.mean_occupancy, 0.0, 0.0,
                    r.mean_occupancy == 0.0 && scale > 0.0});
  checks.push_back({"p0", "arq p=0 E[D] == 0", r.mean_delay, 0.0, 0.0,
                    r.mean_delay == 0.0 && scale > 0.0});
  return checks;
}

std::vector<Check> Validator::run_all() {
  std::vector<Check> all;
  const auto append = [&all](std::vector<Check> more) {
    all.insert(all.end(), std::make_move_iterator(more.begin()), std::make_move_iterator(more.end()));
  };
  append(formula_agreement());
  append(cohort_max());
  append(throughput());
  if (!custom_point()) append(scaling());
  if (options_.loss.value_or(0.1) > 0.0) append(regime2());
  if (!custom_point()) append(dependent_coding());
  if (!custom_point()) append(decode_bound());
  append(gf2_suite());
  append(lossless_exact());
  append(determinism());
  append(littles_law());
  append(reliability());
  return all;
}

}  // namespace srwin::validate
