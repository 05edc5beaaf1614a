#pragma once

// Integer tally kernels shared by winner determination, the exact oracles and the estimators.
// Every rule is reduced to one integer key per candidate where larger is better.

#include <cstdint>
#include <span>
#include <vector>

#include "movest/election.hpp"

namespace movest::detail {

void pairwise_counts(std::span<const Ranking> ballots, std::span<const std::int64_t> counts, int m,
                     Matrix<std::int64_t>& margins);

void top_counts(std::span<const Ranking> ballots, std::span<const std::int64_t> counts, int m,
                Matrix<std::int64_t>& out);

class RankedKernel {
 public:
  /// Throws InputError for the approval rule or out-of-range parameters.
  RankedKernel(const Rule& rule, int m);

  int num_candidates() const noexcept { return m_; }
  RuleKind kind() const noexcept { return kind_; }

  void keys(std::span<const Ranking> ballots, std::span<const std::int64_t> counts,
            std::vector<std::int64_t>& out) const;

  /// Rule score represented by `key`.
  Rational score_of(std::int64_t key) const;

 private:
  RuleKind kind_;
  int m_;
  std::vector<std::int64_t> weights_;  // positional, scaled to integers
  std::int64_t scale_ = 1;             // score = key / scale
  std::int64_t tie_weight_ = 0;        // Copeland: key = scale * wins + tie_weight * ties
  mutable Matrix<std::int64_t> buffer_;
};

void approval_keys(std::span<const ApprovalBallot> ballots, std::span<const std::int64_t> counts,
                   int m, std::vector<std::int64_t>& out);

/// Indices of the maximal keys, ascending.
std::vector<Candidate> argmax_set(std::span<const std::int64_t> keys);

}  // namespace movest::detail
