#include "movest/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "movest/error.hpp"
#include "movest/estimators.hpp"
#include "movest/mov_oracle.hpp"

namespace movest {
namespace {

template <class ProfileT>
ProfileT scale_profile(const ProfileT& profile, std::int64_t factor) {
  if (factor == 1) return profile;
  auto votes = std::vector(profile.votes().begin(), profile.votes().end());
  for (auto& v : votes) v.count *= factor;
  return ProfileT(profile.num_candidates(), std::move(votes), profile.names());
}

Profile scale_profile(const Profile& profile, std::int64_t factor) {
  return std::visit([&](const auto& p) -> Profile { return scale_profile(p, factor); }, profile);
}

struct OracleOutcome {
  std::optional<std::int64_t> exact;
  bool excluded = false;
  MovBounds bounds;
};

OracleOutcome run_oracle(const Profile& profile, const Rule& rule, const OraclePolicy& policy,
                         std::int64_t work_limit) {
  OracleOutcome out;
  out.bounds = mov_bounds(profile, rule);
  const std::int64_t n = num_voters(profile);
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        try {
          if constexpr (std::is_same_v<T, BruteForcePolicy>) {
            const auto result = mov_brute_force(profile, rule, p.budget, work_limit);
            if (result.exact()) out.exact = result.value;
          } else if constexpr (std::is_same_v<T, EnumerationPolicy>) {
            const auto result = mov_target_search(profile, rule, p.budget > 0 ? p.budget : n, work_limit);
            if (result.exact()) out.exact = result.value;
          } else if constexpr (std::is_same_v<T, ClosedFormPolicy>) {
            if (const auto* ranked = std::get_if<RankedProfile>(&profile)) {
              out.exact = mov_kapproval_closed_form(*ranked, std::get<KApprovalRule>(rule).k);
            } else {
              out.exact = mov_approval_closed_form(std::get<ApprovalProfile>(profile));
            }
          } else {
            return;
          }
        } catch (const NotApplicableError&) {
        } catch (const ResourceError&) {
        }
        out.excluded = !out.exact.has_value();
      },
      policy);
  return out;
}

void check_config(const ExperimentConfig& config) {
  if (config.trials < 1) throw InputError("trials must be positive");
  if (config.multiplicity < 1) throw InputError("multiplicity must be positive");
  if (std::holds_alternative<ClosedFormPolicy>(config.policy)) {
    const RuleKind kind = kind_of(config.rule);
    if (kind != RuleKind::KApproval && kind != RuleKind::Approval) {
      throw InputError("closed-form oracle applies to k-approval and approval only");
    }
  }
}

ExperimentRow run_trial(const ExperimentConfig& config, std::int64_t trial,
                        const std::optional<std::pair<Profile, OracleOutcome>>& fixed) {
  const std::uint64_t seed = split_seed(config.seed, static_cast<std::uint64_t>(trial));
  std::optional<Profile> generated;
  std::optional<OracleOutcome> computed;
  if (!fixed) {
    GenSpec spec = std::get<GenSpec>(config.source);
    spec.seed = split_seed(seed, 0);
    Profile raw = kind_of(config.rule) == RuleKind::Approval ? Profile(generate_approval(spec))
                                                             : Profile(generate(spec));
    generated = scale_profile(raw, config.multiplicity);
    computed = run_oracle(*generated, config.rule, config.policy, config.work_limit);
  }
  const Profile& profile = fixed ? fixed->first : *generated;
  const OracleOutcome& oracle = fixed ? fixed->second : *computed;

  EstimateOptions options{config.epsilon, config.delta, split_seed(seed, 1), config.samples};
  const MovEstimate est = estimate(make_vote_source(profile), config.rule, options);
  const std::int64_t n = num_voters(profile);

  ExperimentRow row;
  row.trial = trial;
  row.seed = seed;
  row.rule = to_string(config.rule);
  row.n = n;
  row.m = num_candidates(profile);
  row.epsilon = config.epsilon;
  row.delta = config.delta;
  row.ell = est.ell;
  row.mov_exact = oracle.exact;
  row.mov_lower = oracle.bounds.lower;
  row.mov_upper = oracle.bounds.upper;
  row.estimate = est.m_bar;
  if (oracle.exact) {
    row.abs_error = abs(Rational(est.m_bar - *oracle.exact));
    row.within_guarantee = est.within_guarantee(Rational(*oracle.exact), n);
  } else {
    const MovBounds& b = oracle.bounds;
    if (est.m_bar < b.lower) {
      row.abs_error = b.lower - est.m_bar;
    } else if (b.upper && est.m_bar > *b.upper) {
      row.abs_error = est.m_bar - *b.upper;
    }
    if (!b.upper) {
      row.within_guarantee = true;
    } else {
      const Rational slack = est.c * *b.upper + est.guarantee_epsilon * n;
      row.within_guarantee = est.m_bar >= b.lower - slack && est.m_bar <= *b.upper + slack;
    }
  }
  return row;
}

}  // namespace

double coverage_tolerance(const Rational& delta, std::int64_t evaluated) {
  const double d = to_double(delta);
  const double trials = static_cast<double>(evaluated);
  return d * trials + 2.0 * std::sqrt(d * (1.0 - d) * trials);
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  check_config(config);
  std::optional<std::pair<Profile, OracleOutcome>> fixed;
  if (const auto* profile = std::get_if<Profile>(&config.source)) {
    Profile scaled = scale_profile(*profile, config.multiplicity);
    OracleOutcome oracle = run_oracle(scaled, config.rule, config.policy, config.work_limit);
    fixed.emplace(std::move(scaled), std::move(oracle));
  }

  ExperimentResult result;
  result.rows.resize(static_cast<std::size_t>(config.trials));
  unsigned threads = config.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : config.threads;
  threads = static_cast<unsigned>(std::min<std::int64_t>(threads, config.trials));

  std::atomic<std::int64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    while (true) {
      const std::int64_t trial = next.fetch_add(1);
      if (trial >= config.trials) return;
      try {
        result.rows[static_cast<std::size_t>(trial)] = run_trial(config, trial, fixed);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = config.trials;
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  ExperimentSummary& s = result.summary;
  s.trials = config.trials;
  s.delta = config.delta;
  const bool exact_policy = !std::holds_alternative<BoundsOnlyPolicy>(config.policy);
  for (const auto& row : result.rows) {
    if (exact_policy && !row.mov_exact) {
      ++s.excluded;
      continue;
    }
    ++s.evaluated;
    if (!row.within_guarantee) ++s.violations;
  }
  s.tolerance = coverage_tolerance(config.delta, s.evaluated);
  s.pass = s.evaluated > 0 && static_cast<double>(s.violations) <= s.tolerance;
  return result;
}

std::string format_summary(const ExperimentSummary& s) {
  return "trials=" + std::to_string(s.trials) + " evaluated=" + std::to_string(s.evaluated) +
         " excluded=" + std::to_string(s.excluded) + " violations=" + std::to_string(s.violations) +
         " rate=" + format_decimal(s.violation_rate()) + " delta=" + to_display_string(s.delta) +
         " allowed=" + format_decimal(s.tolerance) + " " + (s.pass ? "PASS" : "FAIL");
}

DistinguishResult run_distinguish(const DistinguishConfig& config) {
  if (config.trials < 1) throw InputError("trials must be positive");
  if (config.n < 2 || config.n % 2 != 0) throw InputError("n must be even and at least 2");
  DistinguishResult out;
  out.n = config.n;
  out.trials = config.trials;
  out.x_split = lower_bound_split(config.epsilon, config.c, config.n);
  out.threshold = config.c + Rational(3, 2) * config.epsilon * config.n;
  out.lower_bound = lower_bound_samples(config.c, config.epsilon, config.delta);

  const RankedVoteSource x_source(generate({TwoCandidate{out.x_split.realized_fraction}, config.n, 2, 0}));
  const RankedVoteSource y_source(generate({TwoCandidate{Rational(1, 2)}, config.n, 2, 0}));
  for (std::int64_t trial = 0; trial < config.trials; ++trial) {
    const std::uint64_t seed = split_seed(config.seed, static_cast<std::uint64_t>(trial));
    const EstimateOptions x_options{config.epsilon, config.delta, split_seed(seed, 0), config.samples};
    const EstimateOptions y_options{config.epsilon, config.delta, split_seed(seed, 1), config.samples};
    const MovEstimate x_est = estimate_kapproval(x_source, 1, x_options);
    const MovEstimate y_est = estimate_kapproval(y_source, 1, y_options);
    out.ell = x_est.ell;
    if (x_est.m_bar <= out.threshold) ++out.x_errors;
    if (y_est.m_bar > out.threshold) ++out.y_errors;
  }
  return out;
}

}  // namespace movest
