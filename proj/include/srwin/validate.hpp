#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "srwin/sim.hpp"

// Paired simulation/analytic checks. Each criterion method runs its grid
// and returns one Check per comparison; the Validator remembers every
// simulation it ran so the Little's-law and reliability checks can be
// evaluated over all of them.
namespace srwin::validate {

struct Check {
  std::string criterion;  // e.g. "C2"
  std::string name;
  double simulated;
  double analytic;
  double tolerance;
  bool pass;
};

struct Options {
  /// Full acceptance sample sizes; false shrinks every grid for a quick run.
  bool full = true;
  /// Multiplies every tolerance. 0 turns the run into a negative control.
  double tol_scale = 1.0;
  /// When set, the simulation grids collapse to this single (W, p) point.
  std::optional<std::uint32_t> window;
  std::optional<double> loss;
  std::uint64_t seed = 1;
};

class Validator {
 public:
  explicit Validator(Options options);

  std::vector<Check> formula_agreement();  // C1
  std::vector<Check> cohort_max();         // C2
  std::vector<Check> throughput();         // C3
  std::vector<Check> littles_law();        // C4, over every run so far
  std::vector<Check> scaling();            // C5
  std::vector<Check> regime2();            // C6
  std::vector<Check> dependent_coding();   // C7
  std::vector<Check> decode_bound();       // C8
  std::vector<Check> gf2_suite();          // C9
  std::vector<Check> reliability();        // C10, over every run so far
  std::vector<Check> determinism();        // C11
  std::vector<Check> lossless_exact();     // p = 0 rows

  /// Every criterion in order, honoring the single-point grid if set.
  std::vector<Check> run_all();

  struct Run {
    std::string label;
    sim::ExperimentConfig config;
    sim::MetricsReport report;
    bool violated = false;
    std::string violation;
  };
  const std::vector<Run>& runs() const { return runs_; }

 private:
  const sim::MetricsReport& simulate(std::string label, const sim::ExperimentConfig& config);
  double tol(double base) const { return base * options_.tol_scale; }
  bool custom_point() const { return options_.window.has_value() || options_.loss.has_value(); }

  Options options_;
  std::vector<Run> runs_;
};

}  // namespace srwin::validate
