#pragma once

// Exact margin of victory at small scale plus the structural quantities and sandwich bounds
// that hold at any scale.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "movest/election.hpp"

namespace movest {

using AnyBallot = std::variant<Ranking, ApprovalBallot>;

/// Vote `vote_index` (position in the multiplicity-expanded vote order) is replaced by `ballot`.
struct Replacement {
  std::int64_t vote_index;
  AnyBallot ballot;
};

struct ExactMovResult {
  enum class Status { Exact, ExceedsBudget };

  Status status = Status::ExceedsBudget;
  std::int64_t value = 0;   // valid when status == Exact
  std::int64_t budget = 0;  // largest change count searched
  std::vector<Replacement> witness;

  bool exact() const noexcept { return status == Status::Exact; }
};

inline constexpr std::int64_t kDefaultWorkLimit = 200'000'000;

/// Iterative deepening over t = 1..budget: every size-t sub-multiset of votes combined with every
/// multiset of t replacement ballots (all m! rankings or all 2^m approval sets). Returns the least
/// t that changes the winner set. Throws ResourceError once `work_limit` profiles were evaluated.
ExactMovResult mov_brute_force(const Profile& profile, const Rule& rule, std::int64_t budget,
                               std::int64_t work_limit = kDefaultWorkLimit);

/// Second exact route: enumerates every final ballot-count vector with the same number of voters
/// (branch and bound on the number of changed votes). Cost depends on n and the ballot-space
/// size, not on the margin, so it reaches margins far beyond what `mov_brute_force` can.
ExactMovResult mov_target_search(const Profile& profile, const Rule& rule, std::int64_t budget,
                                 std::int64_t work_limit = kDefaultWorkLimit);

/// Profile after replaying `witness`.
Profile apply_witness(const Profile& profile, std::span<const Replacement> witness);

/// ceil(g / 2) for the k-approval score gap g. Throws NotApplicableError when the winner is tied.
std::int64_t mov_kapproval_closed_form(const RankedProfile& profile, int k);
/// Same argument applied to approval scores.
std::int64_t mov_approval_closed_form(const ApprovalProfile& profile);

/// min n_l(w) - n_l(x) + 1 over l in [1, m-1] with n_l(w) > n/2 and x != w with n_l(x) <= n/2,
/// w being the lowest-index Bucklin winner. nullopt stands for +infinity (empty feasible set).
std::optional<std::int64_t> bucklin_delta(const RankedProfile& profile);

/// Votes needed to move a count across the strict majority line at the winner's level l*:
/// min(n_l*(w) - floor(n/2), min over x != w of floor(n/2) + 1 - n_l*(x)), at least 1.
/// One changed vote moves each n_l(y) by at most one, so this is a lower bound on MoV.
std::int64_t bucklin_threshold_margin(const RankedProfile& profile);

/// Smallest integer t with s'_{-t}(x) <= s'_t(y), where
/// s'_t(z) = |{v != z : d(v, z) < 2t}| + alpha |{v != z : d(v, z) = 2t}|.
/// Throws InputError when x == y.
std::int64_t relative_margin(const PairwiseMatrix& d, std::int64_t n, Candidate x, Candidate y,
                             const Rational& alpha);
/// Same, for estimated (rational) pairwise margins bounded by n in absolute value.
std::int64_t relative_margin(const Matrix<Rational>& d, std::int64_t n, Candidate x, Candidate y,
                             const Rational& alpha);
std::int64_t relative_margin(const RankedProfile& profile, Candidate x, Candidate y,
                             const Rational& alpha);

/// max(0, min over x != w of RM(w, x)) for the lowest-index Copeland winner w. Zero exactly when
/// the Copeland winner is tied. Throws InputError when m = 1.
std::int64_t copeland_gamma(const RankedProfile& profile, const Rational& alpha);

/// ceil(log2(m)) for m >= 1.
int ceil_log2(int m);

struct MovBounds {
  Rational lower;
  std::optional<Rational> upper;  // nullopt = +infinity
  std::string source;

  bool contains(const Rational& value) const { return lower <= value && (!upper || value <= *upper); }
};

/// Sandwich bounds lower <= MoV <= upper. Throws InputError when m < 2.
MovBounds mov_bounds(const Profile& profile, const Rule& rule);

}  // namespace movest
