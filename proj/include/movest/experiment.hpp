#pragma once

// Monte-Carlo coverage experiments, the two-candidate distinguisher and the command-line entry.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "movest/election.hpp"
#include "movest/generation.hpp"
#include "movest/io.hpp"

namespace movest {

/// Exact MoV by iterative-deepening brute force up to `budget` changed votes.
struct BruteForcePolicy {
  std::int64_t budget = 3;
};
/// Exact MoV by branch and bound over final ballot counts up to `budget` changed votes.
struct EnumerationPolicy {
  std::int64_t budget = 0;  // 0 = n
};
/// ceil(gap / 2); k-approval and approval only.
struct ClosedFormPolicy {};
/// No exact value; rows are judged against the sandwich interval.
struct BoundsOnlyPolicy {};

using OraclePolicy = std::variant<BruteForcePolicy, EnumerationPolicy, ClosedFormPolicy, BoundsOnlyPolicy>;

struct ExperimentConfig {
  Rule rule = KApprovalRule{1};
  /// Generator (re-seeded per trial) or one fixed profile used by every trial.
  std::variant<GenSpec, Profile> source = GenSpec{};
  /// Every generated ballot count is multiplied by this factor.
  std::int64_t multiplicity = 1;
  Rational epsilon{1, 10};
  Rational delta{1, 20};
  std::int64_t trials = 1;
  std::uint64_t seed = 0;
  OraclePolicy policy = ClosedFormPolicy{};
  std::optional<std::int64_t> samples;  // overrides the estimator's sample size
  std::int64_t work_limit = 200'000'000;
  unsigned threads = 0;  // 0 = hardware concurrency
};

struct ExperimentSummary {
  std::int64_t trials = 0;
  std::int64_t evaluated = 0;  // rows with an exact value or interval to judge against
  std::int64_t excluded = 0;   // oracle budget exhausted or closed form not applicable
  std::int64_t violations = 0;
  Rational delta;
  double tolerance = 0;  // delta * evaluated + 2 sqrt(delta (1 - delta) evaluated)
  bool pass = false;

  double violation_rate() const {
    return evaluated == 0 ? 0.0 : static_cast<double>(violations) / static_cast<double>(evaluated);
  }
};

struct ExperimentResult {
  std::vector<ExperimentRow> rows;  // ordered by trial index
  ExperimentSummary summary;
};

/// Trial i uses seed split_seed(config.seed, i): the profile is generated from
/// split_seed(seed_i, 0) and the estimator draws with split_seed(seed_i, 1).
/// Output does not depend on the thread count.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Violations allowed for `evaluated` trials at level delta.
double coverage_tolerance(const Rational& delta, std::int64_t evaluated);

std::string format_summary(const ExperimentSummary& summary);

struct DistinguishConfig {
  Rational epsilon{1, 20};
  Rational delta{1, 20};
  Rational c{0};
  std::int64_t n = 10'000;  // even, so Y is an exact tie
  std::int64_t trials = 500;
  std::uint64_t seed = 0;
  std::optional<std::int64_t> samples;  // default: the plurality sample size
};

struct DistinguishResult {
  std::int64_t n = 0;
  std::int64_t ell = 0;
  TwoCandidateSplit x_split;
  Rational threshold;            // classify as X when the estimate exceeds this
  std::int64_t trials = 0;
  std::int64_t x_errors = 0;     // X samples classified as Y
  std::int64_t y_errors = 0;     // Y samples classified as X
  double lower_bound = 0;        // lower_bound_samples(c, epsilon, delta)

  double error_rate() const {
    return trials == 0 ? 0.0 : static_cast<double>(x_errors + y_errors) / (2.0 * trials);
  }
};

/// Each trial estimates the margin of one X profile and one Y profile (plurality estimator) and
/// classifies each by the midpoint threshold c + 1.5 eps n.
DistinguishResult run_distinguish(const DistinguishConfig& config);

/// Runs the command line `args` (without the program name). Returns the process exit code:
/// 0 success, 2 input error, 3 resource or budget error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace movest
