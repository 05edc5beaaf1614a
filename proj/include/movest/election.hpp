#pragma once

// Ballots, profiles, tallies and winner determination for the supported rule families.

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "movest/rational.hpp"

namespace movest {

using Candidate = int;

/// Dense row-major matrix.
template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, fill) {}

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }

  T& operator()(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
  const T& operator()(int r, int c) const { return data_[static_cast<std::size_t>(r) * cols_ + c]; }

  bool operator==(const Matrix&) const = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<T> data_;
};

/// A complete strict order over candidates 0..m-1, most preferred first.
class Ranking {
 public:
  /// Throws InputError unless `order` is a permutation of 0..m-1.
  explicit Ranking(std::vector<Candidate> order);

  int size() const noexcept { return static_cast<int>(order_.size()); }
  Candidate at(int position) const { return order_[position]; }
  /// 0-based position of `candidate`.
  int position_of(Candidate candidate) const { return position_[candidate]; }
  bool prefers(Candidate x, Candidate y) const { return position_[x] < position_[y]; }
  std::span<const Candidate> order() const noexcept { return order_; }

  bool operator==(const Ranking& other) const { return order_ == other.order_; }
  auto operator<=>(const Ranking& other) const { return order_ <=> other.order_; }

 private:
  std::vector<Candidate> order_;
  std::vector<int> position_;
};

/// A set of approved candidates; may be empty or contain every candidate.
class ApprovalBallot {
 public:
  /// Throws InputError on duplicates or indices outside [0, m).
  ApprovalBallot(std::vector<Candidate> approved, int m);

  bool contains(Candidate x) const;
  std::span<const Candidate> approved() const noexcept { return approved_; }

  bool operator==(const ApprovalBallot& other) const { return approved_ == other.approved_; }
  auto operator<=>(const ApprovalBallot& other) const { return approved_ <=> other.approved_; }

 private:
  std::vector<Candidate> approved_;  // ascending
};

template <class Ballot>
struct WeightedBallot {
  Ballot ballot;
  std::int64_t count = 1;

  bool operator==(const WeightedBallot&) const = default;
};

/// Candidate label used when a profile carries no explicit names: a, b, ..., z, c26, c27, ...
std::string default_candidate_name(Candidate x);

namespace detail {

template <class Ballot>
class ProfileBase {
 public:
  int num_candidates() const noexcept { return m_; }
  std::int64_t num_voters() const noexcept { return n_; }
  std::span<const WeightedBallot<Ballot>> votes() const noexcept { return votes_; }
  const std::vector<std::string>& names() const noexcept { return names_; }
  bool has_names() const noexcept { return !names_.empty(); }
  std::string name_of(Candidate x) const {
    return names_.empty() ? default_candidate_name(x) : names_[x];
  }

  /// Ballots in vote order expanded by multiplicity.
  std::vector<Ballot> expanded() const {
    std::vector<Ballot> out;
    for (const auto& v : votes_) out.insert(out.end(), static_cast<std::size_t>(v.count), v.ballot);
    return out;
  }

 protected:
  ProfileBase(int m, std::vector<WeightedBallot<Ballot>> votes, std::vector<std::string> names);

  int m_;
  std::int64_t n_ = 0;
  std::vector<WeightedBallot<Ballot>> votes_;
  std::vector<std::string> names_;
};

}  // namespace detail

/// Multiset of complete rankings. Invariants: m >= 1, n >= 1, all rankings have length m.
class RankedProfile : public detail::ProfileBase<Ranking> {
 public:
  RankedProfile(int m, std::vector<WeightedBallot<Ranking>> votes,
                std::vector<std::string> names = {});
};

/// Multiset of approval sets. Invariants: m >= 1, n >= 1.
class ApprovalProfile : public detail::ProfileBase<ApprovalBallot> {
 public:
  ApprovalProfile(int m, std::vector<WeightedBallot<ApprovalBallot>> votes,
                  std::vector<std::string> names = {});
};

using Profile = std::variant<RankedProfile, ApprovalProfile>;

int num_candidates(const Profile& profile);
std::int64_t num_voters(const Profile& profile);

/// Non-increasing positional score vector with alpha_1 > alpha_m.
class ScoreVector {
 public:
  /// Throws InvalidScoreVector when the order or strictness invariant fails.
  explicit ScoreVector(std::vector<Rational> alphas);

  int size() const noexcept { return static_cast<int>(alphas_.size()); }
  const Rational& operator[](int position) const { return alphas_[position]; }
  std::span<const Rational> alphas() const noexcept { return alphas_; }
  const Rational& top() const { return alphas_.front(); }

  /// alpha_m = 0 and the last positive entry is followed by a drop of exactly 1.
  bool is_normalized() const;

  bool operator==(const ScoreVector&) const = default;

 private:
  std::vector<Rational> alphas_;
};

/// (raw - raw_m) / lambda, lambda being the last positive entry after the shift.
ScoreVector normalize_score_vector(std::span<const Rational> raw);

ScoreVector borda_vector(int m);
/// k ones followed by m-k zeros.
ScoreVector k_approval_vector(int m, int k);

/// d(x, y) = N(x over y) - N(y over x).
class PairwiseMatrix {
 public:
  explicit PairwiseMatrix(Matrix<std::int64_t> margins);

  int size() const noexcept { return margins_.rows(); }
  std::int64_t operator()(Candidate x, Candidate y) const { return margins_(x, y); }
  const Matrix<std::int64_t>& margins() const noexcept { return margins_; }

 private:
  Matrix<std::int64_t> margins_;
};

struct ScoringRule {
  ScoreVector alpha;
};
struct KApprovalRule {
  int k;
};
struct ApprovalRule {};
struct BucklinRule {};
struct MaximinRule {};
struct CopelandRule {
  Rational alpha;  // in [0, 1]
};

using Rule = std::variant<ScoringRule, KApprovalRule, ApprovalRule, BucklinRule, MaximinRule,
                          CopelandRule>;

enum class RuleKind { Scoring, KApproval, Approval, Bucklin, Maximin, Copeland };

RuleKind kind_of(const Rule& rule);
std::string_view to_string(RuleKind kind);
/// Canonical spelling, e.g. "kapproval:2", "copeland:1/2", "scoring:2,1,0".
std::string to_string(const Rule& rule);

/// Accepts plurality, borda, antiplurality, veto, approval, bucklin, maximin, kapproval:K,
/// copeland:ALPHA, scoring:A1,A2,...  Parameters checked against m happen at evaluation time.
Rule parse_rule(std::string_view text, int m);

/// Checks parameter bounds of `rule` against a profile with m candidates. Throws InputError.
void validate_rule(const Rule& rule, int m);

std::vector<Rational> positional_scores(const RankedProfile& profile, const ScoreVector& alpha);
std::vector<std::int64_t> approval_scores(const ApprovalProfile& profile);

/// counts(l - 1, x) = number of votes ranking x within the top l positions, l in [1, m].
Matrix<std::int64_t> top_k_counts(const RankedProfile& profile);

PairwiseMatrix pairwise_matrix(const RankedProfile& profile);

/// Minimum l with n_l(x) > n/2 (strict majority), for each x.
std::vector<int> bucklin_scores(const Matrix<std::int64_t>& top_counts, std::int64_t n);
std::vector<std::int64_t> maximin_scores(const PairwiseMatrix& d);
std::vector<Rational> copeland_scores(const PairwiseMatrix& d, const Rational& alpha);

struct WinnerResult {
  std::vector<Candidate> winners;  // ascending, non-empty
  /// Rule score per candidate. For Bucklin this is the Bucklin level (lower wins).
  std::vector<Rational> scores;
};

WinnerResult winner_set(const RankedProfile& profile, const Rule& rule);
WinnerResult winner_set(const ApprovalProfile& profile, const Rule& rule);
WinnerResult winner_set(const Profile& profile, const Rule& rule);

/// Best and second-best candidates by score, lowest index first among equals.
std::pair<Candidate, Candidate> top_two(std::span<const Rational> scores);

}  // namespace movest
