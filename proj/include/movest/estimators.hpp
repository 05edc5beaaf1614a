#pragma once

// Sampling-based (c, epsilon, delta) margin-of-victory estimators and their sample budgets.

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "movest/election.hpp"

namespace movest {

/// Number of votes each estimator samples:
///   scoring, approval, Bucklin: ceil(12/eps^2 ln(2m/delta))
///   k-approval:                 ceil(12/eps^2 ln(2k/delta))
///   maximin:                    ceil(24/eps^2 ln(2m/delta))
///   Copeland:                   ceil(96/eps^2 ln(2m/delta))
/// `k` is read only for k-approval (where `m` may be 0 when unknown).
std::int64_t sample_size(RuleKind kind, const Rational& epsilon, const Rational& delta, int m,
                         int k = 0);

/// Epsilon for which `ell` equals the unrounded sample-size formula (used when ell is overridden).
double effective_epsilon(RuleKind kind, std::int64_t ell, const Rational& delta, int m, int k = 0);

/// ((1-c)^2 / (36 eps^2)) ln(1 / (8 e sqrt(pi) delta)), clamped below at 0.
double lower_bound_samples(const Rational& c, const Rational& epsilon, const Rational& delta);

/// Multiplicative slack c of the rule's guarantee: 0 for k-approval and approval, 1/3 for scoring,
/// Bucklin and maximin, (2 ceil(log2 m) + 1) / (2 ceil(log2 m) + 3) for Copeland.
Rational guarantee_factor(RuleKind kind, int m);

/// Uniform sampling with replacement over the n ballots of a profile. Deterministic per seed.
template <class ProfileT, class Ballot>
class BasicVoteSource {
 public:
  explicit BasicVoteSource(ProfileT profile);

  const ProfileT& profile() const noexcept { return profile_; }
  std::int64_t n() const noexcept { return profile_.num_voters(); }
  int m() const noexcept { return profile_.num_candidates(); }

  /// How often each distinct ballot (profile vote entry) was drawn in `ell` draws.
  std::vector<std::int64_t> draw_counts(std::int64_t ell, std::uint64_t seed) const;
  /// The drawn ballots in draw order.
  std::vector<Ballot> draw(std::int64_t ell, std::uint64_t seed) const;

 private:
  template <class Visit>
  void draw_indices(std::int64_t ell, std::uint64_t seed, Visit&& visit) const;

  ProfileT profile_;
  std::vector<std::int64_t> cumulative_;  // cumulative_[i] = votes in entries 0..i
};

using RankedVoteSource = BasicVoteSource<RankedProfile, Ranking>;
using ApprovalVoteSource = BasicVoteSource<ApprovalProfile, ApprovalBallot>;
using VoteSource = std::variant<RankedVoteSource, ApprovalVoteSource>;

VoteSource make_vote_source(const Profile& profile);

std::vector<Ranking> sample_votes(const RankedVoteSource& source, std::int64_t ell, std::uint64_t seed);
std::vector<ApprovalBallot> sample_votes(const ApprovalVoteSource& source, std::int64_t ell,
                                         std::uint64_t seed);

struct EstimateOptions {
  Rational epsilon{1, 10};
  Rational delta{1, 20};
  std::uint64_t seed = 0;
  std::optional<std::int64_t> samples;  // overrides the formula sample size
};

struct MovEstimate {
  RuleKind rule = RuleKind::Scoring;
  Rational m_bar;
  std::int64_t ell = 0;
  std::uint64_t seed = 0;
  Rational c;
  Rational epsilon;
  Rational delta;
  /// Epsilon the guarantee holds for: `epsilon`, or the value implied by an overridden ell.
  Rational guarantee_epsilon;
  /// Estimated per-candidate scores (Bucklin: estimated Bucklin level).
  std::vector<Rational> estimated_scores;
  /// Estimated top-l counts (Bucklin, row l-1) or pairwise margins (maximin, Copeland).
  Matrix<Rational> estimated_matrix;
  Candidate w_bar = 0;
  Candidate z_bar = 0;
  /// Bucklin only: the feasible set of the estimated delta was empty and m_bar was set to n.
  bool sentinel = false;

  /// |m_bar - mov| <= c * mov + guarantee_epsilon * n.
  bool within_guarantee(const Rational& mov, std::int64_t n) const;
};

MovEstimate estimate_scoring(const RankedVoteSource& source, const ScoreVector& alpha,
                             const EstimateOptions& options);
MovEstimate estimate_kapproval(const RankedVoteSource& source, int k, const EstimateOptions& options);
MovEstimate estimate_approval(const ApprovalVoteSource& source, const EstimateOptions& options);
MovEstimate estimate_bucklin(const RankedVoteSource& source, const EstimateOptions& options);
MovEstimate estimate_maximin(const RankedVoteSource& source, const EstimateOptions& options);
MovEstimate estimate_copeland(const RankedVoteSource& source, const Rational& alpha,
                              const EstimateOptions& options);

/// Dispatches on the rule. Throws InputError when the source kind does not fit the rule.
MovEstimate estimate(const VoteSource& source, const Rule& rule, const EstimateOptions& options);

}  // namespace movest
