#include "movest/mov_oracle.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <optional>

#include "kernel.hpp"
#include "movest/error.hpp"

namespace movest {
namespace {

std::vector<Ranking> all_rankings(int m) {
  std::vector<Candidate> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), 0);
  std::vector<Ranking> out;
  do {
    out.emplace_back(order);
  } while (std::next_permutation(order.begin(), order.end()));
  return out;
}

std::vector<ApprovalBallot> all_approval_sets(int m) {
  if (m > 20) throw ResourceError("approval ballot space too large for exhaustive search");
  std::vector<ApprovalBallot> out;
  for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
    std::vector<Candidate> approved;
    for (int x = 0; x < m; ++x) {
      if (mask & (1u << x)) approved.push_back(x);
    }
    out.emplace_back(std::move(approved), m);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Ranking> ballot_space(const RankedProfile& profile) {
  if (profile.num_candidates() > 8) throw ResourceError("ranking space too large for exhaustive search");
  return all_rankings(profile.num_candidates());
}

std::vector<ApprovalBallot> ballot_space(const ApprovalProfile& profile) {
  return all_approval_sets(profile.num_candidates());
}

/// Winner set as a function of per-type counts over a fixed ballot space.
class CountEvaluator {
 public:
  CountEvaluator(const RankedProfile& profile, const Rule& rule, std::vector<Ranking> space)
      : ranked_space_(std::move(space)), kernel_(std::in_place, rule, profile.num_candidates()) {}

  CountEvaluator(const ApprovalProfile& profile, const Rule& rule, std::vector<ApprovalBallot> space)
      : approval_space_(std::move(space)), m_(profile.num_candidates()) {
    if (kind_of(rule) != RuleKind::Approval) {
      throw InputError("rule '" + to_string(rule) + "' needs a ranked profile");
    }
  }

  const std::vector<Candidate>& winners(std::span<const std::int64_t> counts) {
    if (kernel_) {
      kernel_->keys(ranked_space_, counts, keys_);
    } else {
      detail::approval_keys(approval_space_, counts, m_, keys_);
    }
    winners_ = detail::argmax_set(keys_);
    return winners_;
  }

 private:
  std::vector<Ranking> ranked_space_;
  std::vector<ApprovalBallot> approval_space_;
  std::optional<detail::RankedKernel> kernel_;
  int m_ = 0;
  std::vector<std::int64_t> keys_;
  std::vector<Candidate> winners_;
};

template <class Ballot>
std::vector<std::int64_t> counts_over(std::span<const WeightedBallot<Ballot>> votes,
                                      const std::vector<Ballot>& space) {
  std::vector<std::int64_t> counts(space.size(), 0);
  for (const auto& v : votes) {
    const auto it = std::lower_bound(space.begin(), space.end(), v.ballot);
    counts[static_cast<std::size_t>(it - space.begin())] += v.count;
  }
  return counts;
}

/// Turns per-type removal/addition counts into (vote index, replacement) pairs.
template <class Ballot>
std::vector<Replacement> build_witness(std::span<const WeightedBallot<Ballot>> votes,
                                       const std::vector<Ballot>& space,
                                       std::span<const std::int64_t> removals,
                                       std::span<const std::int64_t> additions) {
  std::vector<std::int64_t> needed(removals.begin(), removals.end());
  std::vector<std::int64_t> indices;
  std::int64_t offset = 0;
  for (const auto& v : votes) {
    const auto type = static_cast<std::size_t>(
        std::lower_bound(space.begin(), space.end(), v.ballot) - space.begin());
    const std::int64_t take = std::min(needed[type], v.count);
    for (std::int64_t i = 0; i < take; ++i) indices.push_back(offset + i);
    needed[type] -= take;
    offset += v.count;
  }
  std::sort(indices.begin(), indices.end());
  std::vector<Replacement> witness;
  std::size_t next = 0;
  for (std::size_t type = 0; type < additions.size(); ++type) {
    for (std::int64_t i = 0; i < additions[type]; ++i) {
      witness.push_back(Replacement{indices[next++], AnyBallot(space[type])});
    }
  }
  return witness;
}

class WorkCounter {
 public:
  explicit WorkCounter(std::int64_t limit) : limit_(limit) {}
  void tick() {
    if (++used_ > limit_) {
      throw ResourceError("exhaustive search exceeded its work limit of " + std::to_string(limit_) +
                          " evaluations");
    }
  }

 private:
  std::int64_t limit_;
  std::int64_t used_ = 0;
};

/// Enumerates (removal, addition) count pairs with |removal| = |addition| = t.
class LevelSearch {
 public:
  LevelSearch(CountEvaluator& eval, std::vector<std::int64_t> base, std::vector<Candidate> original,
              WorkCounter& work)
      : eval_(eval), base_(std::move(base)), original_(std::move(original)), work_(work),
        current_(base_), removal_(base_.size(), 0), addition_(base_.size(), 0) {}

  bool search(std::int64_t t) { return remove(0, t, t); }

  const std::vector<std::int64_t>& removal() const { return removal_; }
  const std::vector<std::int64_t>& addition() const { return addition_; }

 private:
  bool remove(std::size_t type, std::int64_t left, std::int64_t t) {
    if (left == 0) return add(0, t);
    if (type == base_.size()) return false;
    const std::int64_t most = std::min(left, base_[type]);
    for (std::int64_t r = most; r >= 0; --r) {
      removal_[type] = r;
      current_[type] = base_[type] - r;
      if (remove(type + 1, left - r, t)) return true;
    }
    removal_[type] = 0;
    current_[type] = base_[type];
    return false;
  }

  bool add(std::size_t type, std::int64_t left) {
    if (type == base_.size()) {
      if (left != 0) return false;
      work_.tick();
      return eval_.winners(current_) != original_;
    }
    // Replacing a vote by a ballot of the type being removed is never needed at the minimal level.
    if (removal_[type] > 0) return add(type + 1, left);
    const std::int64_t start = type + 1 == base_.size() ? left : 0;
    for (std::int64_t a = start; a <= left; ++a) {
      addition_[type] = a;
      current_[type] += a;
      const bool found = add(type + 1, left - a);
      current_[type] -= a;
      if (found) return true;
    }
    addition_[type] = 0;
    return false;
  }

  CountEvaluator& eval_;
  std::vector<std::int64_t> base_;
  std::vector<Candidate> original_;
  WorkCounter& work_;
  std::vector<std::int64_t> current_;
  std::vector<std::int64_t> removal_;
  std::vector<std::int64_t> addition_;
};

/// Branch and bound over final count vectors ordered outward from the original counts.
class TargetSearch {
 public:
  TargetSearch(CountEvaluator& eval, std::vector<std::int64_t> base, std::vector<Candidate> original,
               std::int64_t bound, WorkCounter& work)
      : eval_(eval), base_(std::move(base)), original_(std::move(original)), work_(work),
        best_(bound), current_(base_.size(), 0) {}

  void run(std::int64_t n) { visit(0, n, 0, 0); }

  bool found() const { return !best_target_.empty(); }
  std::int64_t best() const { return best_; }
  const std::vector<std::int64_t>& target() const { return best_target_; }

 private:
  void visit(std::size_t type, std::int64_t remaining, std::int64_t removed, std::int64_t added) {
    if (std::max(removed, added) >= best_) return;
    if (type + 1 == base_.size()) {
      const std::int64_t v = remaining;
      const std::int64_t total = removed + std::max<std::int64_t>(0, base_[type] - v);
      if (total == 0 || total >= best_) return;
      current_[type] = v;
      work_.tick();
      if (eval_.winners(current_) != original_) {
        best_ = total;
        best_target_ = current_;
      }
      return;
    }
    const std::int64_t center = std::min(base_[type], remaining);
    auto try_value = [&](std::int64_t v) {
      current_[type] = v;
      visit(type + 1, remaining - v, removed + std::max<std::int64_t>(0, base_[type] - v),
            added + std::max<std::int64_t>(0, v - base_[type]));
    };
    try_value(center);
    for (std::int64_t step = 1; center - step >= 0 || center + step <= remaining; ++step) {
      if (center - step >= 0) try_value(center - step);
      if (center + step <= remaining) try_value(center + step);
    }
  }

  CountEvaluator& eval_;
  std::vector<std::int64_t> base_;
  std::vector<Candidate> original_;
  WorkCounter& work_;
  std::int64_t best_;
  std::vector<std::int64_t> current_;
  std::vector<std::int64_t> best_target_;
};

template <class P>
ExactMovResult brute_force_impl(const P& profile, const Rule& rule, std::int64_t budget,
                                std::int64_t work_limit) {
  auto space = ballot_space(profile);
  const auto counts = counts_over(profile.votes(), space);
  CountEvaluator eval(profile, rule, space);
  const std::vector<Candidate> original = eval.winners(counts);
  WorkCounter work(work_limit);
  LevelSearch search(eval, counts, original, work);
  ExactMovResult result;
  result.budget = std::min(budget, profile.num_voters());
  for (std::int64_t t = 1; t <= result.budget; ++t) {
    if (search.search(t)) {
      result.status = ExactMovResult::Status::Exact;
      result.value = t;
      result.witness = build_witness(profile.votes(), space, search.removal(), search.addition());
      return result;
    }
  }
  return result;
}

template <class P>
ExactMovResult target_search_impl(const P& profile, const Rule& rule, std::int64_t budget,
                                  std::int64_t work_limit) {
  auto space = ballot_space(profile);
  const auto counts = counts_over(profile.votes(), space);
  CountEvaluator eval(profile, rule, space);
  const std::vector<Candidate> original = eval.winners(counts);
  WorkCounter work(work_limit);
  ExactMovResult result;
  result.budget = std::min(budget, profile.num_voters());
  TargetSearch search(eval, counts, original, result.budget + 1, work);
  search.run(profile.num_voters());
  if (!search.found()) return result;
  std::vector<std::int64_t> removals(counts.size());
  std::vector<std::int64_t> additions(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    removals[i] = std::max<std::int64_t>(0, counts[i] - search.target()[i]);
    additions[i] = std::max<std::int64_t>(0, search.target()[i] - counts[i]);
  }
  result.status = ExactMovResult::Status::Exact;
  result.value = search.best();
  result.witness = build_witness(profile.votes(), space, removals, additions);
  return result;
}

template <class Ballot>
std::vector<WeightedBallot<Ballot>> merge_in_order(const std::vector<Ballot>& ballots) {
  std::vector<WeightedBallot<Ballot>> out;
  std::map<Ballot, std::size_t> slot;
  for (const auto& b : ballots) {
    auto [it, inserted] = slot.emplace(b, out.size());
    if (inserted) out.push_back(WeightedBallot<Ballot>{b, 1});
    else ++out[it->second].count;
  }
  return out;
}

std::vector<std::int64_t> kernel_keys(const RankedProfile& profile, const Rule& rule) {
  const detail::RankedKernel kernel(rule, profile.num_candidates());
  std::vector<Ranking> ballots;
  std::vector<std::int64_t> counts;
  for (const auto& v : profile.votes()) {
    ballots.push_back(v.ballot);
    counts.push_back(v.count);
  }
  std::vector<std::int64_t> keys;
  kernel.keys(ballots, counts, keys);
  return keys;
}

std::int64_t closed_form_from_keys(std::vector<std::int64_t> keys) {
  if (keys.size() < 2) throw InputError("margin of victory needs at least two candidates");
  std::sort(keys.begin(), keys.end(), std::greater<>());
  const std::int64_t gap = keys[0] - keys[1];
  if (gap == 0) throw NotApplicableError("winner is tied; the closed form needs a unique winner");
  return (gap + 1) / 2;
}

/// Number of z != skip with d(v, z) compared to the threshold, as (strictly below, equal).
template <class MarginAt>
std::int64_t relative_margin_impl(int m, std::int64_t n, Candidate x, Candidate y,
                                  const Rational& alpha, MarginAt margin_at) {
  if (x == y) throw InputError("relative margin needs two distinct candidates");
  if (x < 0 || y < 0 || x >= m || y >= m) throw InputError("candidate index out of range");
  auto shifted = [&](Candidate z, std::int64_t t) {
    std::int64_t below = 0;
    std::int64_t equal = 0;
    for (Candidate v = 0; v < m; ++v) {
      if (v == z) continue;
      const int cmp = margin_at(v, z, 2 * t);
      if (cmp < 0) ++below;
      else if (cmp == 0) ++equal;
    }
    return std::pair{below, equal};
  };
  auto holds = [&](std::int64_t t) {
    const auto [below_x, equal_x] = shifted(x, -t);
    const auto [below_y, equal_y] = shifted(y, t);
    return Rational(below_x - below_y) <= alpha * (equal_y - equal_x);
  };
  // holds(lo) is false and holds(hi) is true; holds is monotone in t.
  const std::int64_t reach = (n + 1) / 2 + 1;
  std::int64_t lo = -reach;
  std::int64_t hi = reach;
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (holds(mid)) hi = mid;
    else lo = mid;
  }
  return hi;
}

Candidate lowest_winner(const std::vector<Rational>& scores) {
  return static_cast<Candidate>(std::max_element(scores.begin(), scores.end()) - scores.begin());
}

}  // namespace

ExactMovResult mov_brute_force(const Profile& profile, const Rule& rule, std::int64_t budget,
                               std::int64_t work_limit) {
  if (budget < 1) throw InputError("budget must be at least 1");
  return std::visit([&](const auto& p) { return brute_force_impl(p, rule, budget, work_limit); },
                    profile);
}

ExactMovResult mov_target_search(const Profile& profile, const Rule& rule, std::int64_t budget,
                                 std::int64_t work_limit) {
  if (budget < 1) throw InputError("budget must be at least 1");
  return std::visit([&](const auto& p) { return target_search_impl(p, rule, budget, work_limit); },
                    profile);
}

Profile apply_witness(const Profile& profile, std::span<const Replacement> witness) {
  return std::visit(
      [&](const auto& p) -> Profile {
        using P = std::decay_t<decltype(p)>;
        auto ballots = p.expanded();
        using Ballot = typename decltype(ballots)::value_type;
        for (const auto& r : witness) {
          if (r.vote_index < 0 || r.vote_index >= static_cast<std::int64_t>(ballots.size())) {
            throw InputError("witness vote index out of range");
          }
          const auto* b = std::get_if<Ballot>(&r.ballot);
          if (b == nullptr) throw InputError("witness ballot kind does not match the profile");
          ballots[static_cast<std::size_t>(r.vote_index)] = *b;
        }
        return P(p.num_candidates(), merge_in_order(ballots), p.names());
      },
      profile);
}

std::int64_t mov_kapproval_closed_form(const RankedProfile& profile, int k) {
  return closed_form_from_keys(kernel_keys(profile, KApprovalRule{k}));
}

std::int64_t mov_approval_closed_form(const ApprovalProfile& profile) {
  return closed_form_from_keys(approval_scores(profile));
}

std::optional<std::int64_t> bucklin_delta(const RankedProfile& profile) {
  const int m = profile.num_candidates();
  const std::int64_t n = profile.num_voters();
  const auto counts = top_k_counts(profile);
  const auto levels = bucklin_scores(counts, n);
  const Candidate w =
      static_cast<Candidate>(std::min_element(levels.begin(), levels.end()) - levels.begin());
  std::optional<std::int64_t> best;
  for (int l = 0; l + 1 < m; ++l) {
    if (2 * counts(l, w) <= n) continue;
    for (Candidate x = 0; x < m; ++x) {
      if (x == w || 2 * counts(l, x) > n) continue;
      const std::int64_t value = counts(l, w) - counts(l, x) + 1;
      if (!best || value < *best) best = value;
    }
  }
  return best;
}

std::int64_t bucklin_threshold_margin(const RankedProfile& profile) {
  const int m = profile.num_candidates();
  const std::int64_t n = profile.num_voters();
  const auto counts = top_k_counts(profile);
  const auto levels = bucklin_scores(counts, n);
  const Candidate w =
      static_cast<Candidate>(std::min_element(levels.begin(), levels.end()) - levels.begin());
  const int row = levels[w] - 1;
  const std::int64_t half = n / 2;
  std::int64_t best = counts(row, w) - half;
  for (Candidate x = 0; x < m; ++x) {
    if (x != w) best = std::min(best, half + 1 - counts(row, x));
  }
  return std::max<std::int64_t>(best, 1);
}

std::int64_t relative_margin(const PairwiseMatrix& d, std::int64_t n, Candidate x, Candidate y,
                             const Rational& alpha) {
  return relative_margin_impl(d.size(), n, x, y, alpha,
                              [&](Candidate v, Candidate z, std::int64_t threshold) {
                                const std::int64_t value = d(v, z);
                                return value < threshold ? -1 : (value == threshold ? 0 : 1);
                              });
}

std::int64_t relative_margin(const Matrix<Rational>& d, std::int64_t n, Candidate x, Candidate y,
                             const Rational& alpha) {
  return relative_margin_impl(d.rows(), n, x, y, alpha,
                              [&](Candidate v, Candidate z, std::int64_t threshold) {
                                const Rational& value = d(v, z);
                                return value < threshold ? -1 : (value == threshold ? 0 : 1);
                              });
}

std::int64_t relative_margin(const RankedProfile& profile, Candidate x, Candidate y,
                             const Rational& alpha) {
  return relative_margin(pairwise_matrix(profile), profile.num_voters(), x, y, alpha);
}

std::int64_t copeland_gamma(const RankedProfile& profile, const Rational& alpha) {
  const int m = profile.num_candidates();
  if (m < 2) throw InputError("Copeland relative margin needs at least two candidates");
  const auto d = pairwise_matrix(profile);
  const Candidate w = lowest_winner(copeland_scores(d, alpha));
  std::int64_t best = std::numeric_limits<std::int64_t>::max();
  for (Candidate x = 0; x < m; ++x) {
    if (x != w) best = std::min(best, relative_margin(d, profile.num_voters(), w, x, alpha));
  }
  return std::max<std::int64_t>(best, 0);
}

int ceil_log2(int m) {
  if (m < 1) throw InputError("log2 of a non-positive count");
  int bits = 0;
  while ((1 << bits) < m) ++bits;
  return bits;
}

namespace {

MovBounds gap_bounds(std::span<const Rational> scores, const Rational& lower_div,
                     const Rational& upper_div, const Rational& upper_add, std::string source) {
  const auto [w, z] = top_two(scores);
  const Rational gap = scores[w] - scores[z];
  return MovBounds{gap / lower_div, gap / upper_div + upper_add, std::move(source)};
}

MovBounds ranked_bounds(const RankedProfile& profile, const Rule& rule) {
  const int m = profile.num_candidates();
  validate_rule(rule, m);
  switch (kind_of(rule)) {
    case RuleKind::Scoring: {
      const auto alpha = normalize_score_vector(std::get<ScoringRule>(rule).alpha.alphas());
      const auto scores = positional_scores(profile, alpha);
      // alpha_1 (MoV - 1) <= gap <= 2 alpha_1 MoV
      return gap_bounds(scores, 2 * alpha.top(), alpha.top(), 1, "scoring score-gap lemma");
    }
    case RuleKind::KApproval: {
      const auto scores =
          positional_scores(profile, k_approval_vector(m, std::get<KApprovalRule>(rule).k));
      return gap_bounds(scores, 2, 2, 1, "k-approval favorable-vote lemma");
    }
    case RuleKind::Bucklin: {
      const auto delta = bucklin_delta(profile);
      const bool tied = winner_set(profile, rule).winners.size() > 1;
      MovBounds bounds;
      bounds.source = "Bucklin majority-threshold margin, delta upper bound";
      if (delta) bounds.upper = Rational(*delta);
      bounds.lower = Rational(bucklin_threshold_margin(profile));
      if (tied) bounds.source += " (tied winners: lower bound 1)";
      return bounds;
    }
    case RuleKind::Maximin: {
      const auto raw = maximin_scores(pairwise_matrix(profile));
      std::vector<Rational> scores(raw.begin(), raw.end());
      const auto [w, z] = top_two(scores);
      const Rational gap = scores[w] - scores[z];
      MovBounds bounds{gap / 4, std::max(Rational(gap / 2), Rational(1)), "maximin score-gap lemma"};
      if (gap == 0) bounds.source += " (tied winners: one change breaks the tie)";
      return bounds;
    }
    case RuleKind::Copeland: {
      const auto gamma = copeland_gamma(profile, std::get<CopelandRule>(rule).alpha);
      if (gamma == 0) {
        return MovBounds{1, std::nullopt, "Copeland relative-margin lemma (tied winners: no upper bound)"};
      }
      return MovBounds{Rational(gamma), Rational(2 * (ceil_log2(m) + 1) * gamma),
                       "Copeland relative-margin lemma"};
    }
    case RuleKind::Approval:
      break;
  }
  throw InputError("approval rule needs an approval profile");
}

}  // namespace

MovBounds mov_bounds(const Profile& profile, const Rule& rule) {
  if (num_candidates(profile) < 2) throw InputError("margin of victory needs at least two candidates");
  if (const auto* ranked = std::get_if<RankedProfile>(&profile)) return ranked_bounds(*ranked, rule);
  const auto& approval = std::get<ApprovalProfile>(profile);
  if (kind_of(rule) != RuleKind::Approval) {
    throw InputError("rule '" + to_string(rule) + "' needs a ranked profile");
  }
  const auto raw = approval_scores(approval);
  std::vector<Rational> scores(raw.begin(), raw.end());
  return gap_bounds(scores, 2, 2, 1, "approval favorable-ballot lemma");
}

}  // namespace movest
