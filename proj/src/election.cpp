#include "movest/election.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "kernel.hpp"
#include "movest/error.hpp"

namespace movest {

Ranking::Ranking(std::vector<Candidate> order) : order_(std::move(order)) {
  const int m = static_cast<int>(order_.size());
  if (m == 0) throw InputError("ranking must contain at least one candidate");
  position_.assign(static_cast<std::size_t>(m), -1);
  for (int pos = 0; pos < m; ++pos) {
    const Candidate x = order_[pos];
    if (x < 0 || x >= m) {
      throw InputError("candidate index " + std::to_string(x) + " out of range for m=" +
                       std::to_string(m));
    }
    if (position_[x] != -1) throw InputError("duplicate candidate " + std::to_string(x) + " in ranking");
    position_[x] = pos;
  }
}

ApprovalBallot::ApprovalBallot(std::vector<Candidate> approved, int m) : approved_(std::move(approved)) {
  std::sort(approved_.begin(), approved_.end());
  for (std::size_t i = 0; i < approved_.size(); ++i) {
    if (approved_[i] < 0 || approved_[i] >= m) {
      throw InputError("candidate index " + std::to_string(approved_[i]) + " out of range for m=" +
                       std::to_string(m));
    }
    if (i > 0 && approved_[i] == approved_[i - 1]) {
      throw InputError("duplicate candidate " + std::to_string(approved_[i]) + " in approval ballot");
    }
  }
}

bool ApprovalBallot::contains(Candidate x) const {
  return std::binary_search(approved_.begin(), approved_.end(), x);
}

std::string default_candidate_name(Candidate x) {
  if (x >= 0 && x < 26) return std::string(1, static_cast<char>('a' + x));
  return "c" + std::to_string(x);
}

namespace detail {

template <class Ballot>
ProfileBase<Ballot>::ProfileBase(int m, std::vector<WeightedBallot<Ballot>> votes,
                                 std::vector<std::string> names)
    : m_(m), votes_(std::move(votes)), names_(std::move(names)) {
  if (m_ < 1) throw InputError("profile needs at least one candidate");
  if (!names_.empty() && static_cast<int>(names_.size()) != m_) {
    throw InputError("expected " + std::to_string(m_) + " candidate names, got " +
                     std::to_string(names_.size()));
  }
  for (const auto& v : votes_) {
    if (v.count < 1) throw InputError("ballot multiplicity must be positive");
    n_ += v.count;
  }
  if (n_ < 1) throw InputError("profile needs at least one vote");
}

template class ProfileBase<Ranking>;
template class ProfileBase<ApprovalBallot>;

}  // namespace detail

RankedProfile::RankedProfile(int m, std::vector<WeightedBallot<Ranking>> votes,
                             std::vector<std::string> names)
    : ProfileBase(m, std::move(votes), std::move(names)) {
  for (const auto& v : votes_) {
    if (v.ballot.size() != m_) {
      throw InputError("ranking of length " + std::to_string(v.ballot.size()) +
                       " in a profile with m=" + std::to_string(m_));
    }
  }
}

ApprovalProfile::ApprovalProfile(int m, std::vector<WeightedBallot<ApprovalBallot>> votes,
                                 std::vector<std::string> names)
    : ProfileBase(m, std::move(votes), std::move(names)) {
  for (const auto& v : votes_) {
    for (Candidate x : v.ballot.approved()) {
      if (x >= m_) throw InputError("approved candidate out of range for m=" + std::to_string(m_));
    }
  }
}

int num_candidates(const Profile& profile) {
  return std::visit([](const auto& p) { return p.num_candidates(); }, profile);
}

std::int64_t num_voters(const Profile& profile) {
  return std::visit([](const auto& p) { return p.num_voters(); }, profile);
}

// ---------------------------------------------------------------------------------------------
// Score vectors

ScoreVector::ScoreVector(std::vector<Rational> alphas) : alphas_(std::move(alphas)) {
  if (alphas_.empty()) throw InvalidScoreVector("score vector is empty");
  for (std::size_t i = 1; i < alphas_.size(); ++i) {
    if (alphas_[i] > alphas_[i - 1]) throw InvalidScoreVector("score vector must be non-increasing");
  }
  if (!(alphas_.front() > alphas_.back())) {
    throw InvalidScoreVector("score vector is constant (alpha_1 must exceed alpha_m)");
  }
}

bool ScoreVector::is_normalized() const {
  if (alphas_.back() != 0) return false;
  int last_positive = -1;
  for (int i = 0; i < size(); ++i) {
    if (alphas_[i] > 0) last_positive = i;
  }
  return last_positive >= 0 && alphas_[last_positive] == 1;
}

ScoreVector normalize_score_vector(std::span<const Rational> raw) {
  if (raw.empty()) throw InvalidScoreVector("score vector is empty");
  if (raw.front() == raw.back()) {
    throw InvalidScoreVector("score vector is constant (alpha_1 must exceed alpha_m)");
  }
  ScoreVector checked(std::vector<Rational>(raw.begin(), raw.end()));
  const Rational shift = raw.back();
  std::vector<Rational> shifted;
  shifted.reserve(raw.size());
  for (const auto& a : raw) shifted.push_back(a - shift);
  Rational lambda = 0;
  for (const auto& a : shifted) {
    if (a > 0) lambda = a;
  }
  for (auto& a : shifted) a /= lambda;
  return ScoreVector(std::move(shifted));
}

ScoreVector borda_vector(int m) {
  if (m < 2) throw InputError("Borda needs at least two candidates");
  std::vector<Rational> alphas;
  for (int i = 0; i < m; ++i) alphas.emplace_back(m - 1 - i);
  return ScoreVector(std::move(alphas));
}

ScoreVector k_approval_vector(int m, int k) {
  if (k < 1 || k > m - 1) {
    throw InputError("k-approval requires 1 <= k <= m-1 (k=" + std::to_string(k) +
                     ", m=" + std::to_string(m) + ")");
  }
  std::vector<Rational> alphas(static_cast<std::size_t>(m), Rational(0));
  for (int i = 0; i < k; ++i) alphas[i] = 1;
  return ScoreVector(std::move(alphas));
}

PairwiseMatrix::PairwiseMatrix(Matrix<std::int64_t> margins) : margins_(std::move(margins)) {
  if (margins_.rows() != margins_.cols()) throw DimensionError("pairwise matrix must be square");
  for (int x = 0; x < size(); ++x) {
    if (margins_(x, x) != 0) throw InputError("pairwise matrix diagonal must be zero");
    for (int y = 0; y < x; ++y) {
      if (margins_(x, y) != -margins_(y, x)) throw InputError("pairwise matrix must be antisymmetric");
    }
  }
}

// ---------------------------------------------------------------------------------------------
// Rules

RuleKind kind_of(const Rule& rule) { return static_cast<RuleKind>(rule.index()); }

std::string_view to_string(RuleKind kind) {
  switch (kind) {
    case RuleKind::Scoring: return "scoring";
    case RuleKind::KApproval: return "kapproval";
    case RuleKind::Approval: return "approval";
    case RuleKind::Bucklin: return "bucklin";
    case RuleKind::Maximin: return "maximin";
    case RuleKind::Copeland: return "copeland";
  }
  return "unknown";
}

std::string to_string(const Rule& rule) {
  struct Visitor {
    std::string operator()(const ScoringRule& r) const {
      std::string out = "scoring:";
      for (int i = 0; i < r.alpha.size(); ++i) {
        if (i) out += ',';
        out += to_fraction_string(r.alpha[i]);
      }
      return out;
    }
    std::string operator()(const KApprovalRule& r) const { return "kapproval:" + std::to_string(r.k); }
    std::string operator()(const ApprovalRule&) const { return "approval"; }
    std::string operator()(const BucklinRule&) const { return "bucklin"; }
    std::string operator()(const MaximinRule&) const { return "maximin"; }
    std::string operator()(const CopelandRule& r) const {
      return "copeland:" + to_fraction_string(r.alpha);
    }
  };
  return std::visit(Visitor{}, rule);
}

Rule parse_rule(std::string_view text, int m) {
  std::string_view name = text;
  std::string_view arg;
  const bool has_arg = text.find(':') != std::string_view::npos;
  if (has_arg) {
    name = text.substr(0, text.find(':'));
    arg = text.substr(text.find(':') + 1);
  }
  auto require_no_arg = [&] {
    if (has_arg) throw InputError("rule '" + std::string(name) + "' takes no parameter");
  };
  if (name == "plurality") {
    require_no_arg();
    return KApprovalRule{1};
  }
  if (name == "antiplurality" || name == "veto") {
    require_no_arg();
    return KApprovalRule{m - 1};
  }
  if (name == "borda") {
    require_no_arg();
    return ScoringRule{borda_vector(m)};
  }
  if (name == "approval") {
    require_no_arg();
    return ApprovalRule{};
  }
  if (name == "bucklin") {
    require_no_arg();
    return BucklinRule{};
  }
  if (name == "maximin") {
    require_no_arg();
    return MaximinRule{};
  }
  if (name == "kapproval") {
    if (arg.empty()) throw InputError("kapproval needs a parameter, e.g. kapproval:2");
    const Rational k = parse_rational(arg);
    if (boost::multiprecision::denominator(k) != 1) throw InputError("k must be an integer");
    return KApprovalRule{static_cast<int>(to_int64(boost::multiprecision::numerator(k)))};
  }
  if (name == "copeland") {
    Rational alpha = arg.empty() ? Rational(1, 2) : parse_rational(arg);
    if (alpha < 0 || alpha > 1) throw InputError("Copeland alpha must lie in [0, 1]");
    return CopelandRule{alpha};
  }
  if (name == "scoring") {
    std::vector<Rational> alphas;
    std::string_view rest = arg;
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      alphas.push_back(parse_rational(rest.substr(0, comma)));
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
    return ScoringRule{ScoreVector(std::move(alphas))};
  }
  throw InputError("unknown rule '" + std::string(text) + "'");
}

void validate_rule(const Rule& rule, int m) {
  if (const auto* s = std::get_if<ScoringRule>(&rule)) {
    if (s->alpha.size() != m) {
      throw DimensionError("score vector has length " + std::to_string(s->alpha.size()) +
                           " but m=" + std::to_string(m));
    }
  } else if (const auto* k = std::get_if<KApprovalRule>(&rule)) {
    if (k->k < 1 || k->k > m - 1) {
      throw InputError("k-approval requires 1 <= k <= m-1 (k=" + std::to_string(k->k) +
                       ", m=" + std::to_string(m) + ")");
    }
  } else if (const auto* c = std::get_if<CopelandRule>(&rule)) {
    if (c->alpha < 0 || c->alpha > 1) throw InputError("Copeland alpha must lie in [0, 1]");
  }
}

// ---------------------------------------------------------------------------------------------
// Kernels

namespace detail {

void pairwise_counts(std::span<const Ranking> ballots, std::span<const std::int64_t> counts, int m,
                     Matrix<std::int64_t>& margins) {
  if (margins.rows() != m || margins.cols() != m) margins = Matrix<std::int64_t>(m, m);
  std::fill_n(&margins(0, 0), static_cast<std::size_t>(m) * m, 0);
  for (std::size_t b = 0; b < ballots.size(); ++b) {
    const std::int64_t c = counts[b];
    if (c == 0) continue;
    const auto order = ballots[b].order();
    for (int i = 0; i < m; ++i) {
      for (int j = i + 1; j < m; ++j) {
        margins(order[i], order[j]) += c;
        margins(order[j], order[i]) -= c;
      }
    }
  }
}

void top_counts(std::span<const Ranking> ballots, std::span<const std::int64_t> counts, int m,
                Matrix<std::int64_t>& out) {
  if (out.rows() != m || out.cols() != m) out = Matrix<std::int64_t>(m, m);
  std::fill_n(&out(0, 0), static_cast<std::size_t>(m) * m, 0);
  // out(l, x) first holds the count of x at position l exactly, then prefix sums over l.
  for (std::size_t b = 0; b < ballots.size(); ++b) {
    if (counts[b] == 0) continue;
    for (int pos = 0; pos < m; ++pos) out(pos, ballots[b].at(pos)) += counts[b];
  }
  for (int l = 1; l < m; ++l) {
    for (int x = 0; x < m; ++x) out(l, x) += out(l - 1, x);
  }
}

namespace {

std::int64_t lcm_of_denominators(std::span<const Rational> values) {
  BigInt acc = 1;
  for (const auto& v : values) {
    const BigInt den = boost::multiprecision::denominator(v);
    acc = acc / boost::multiprecision::gcd(acc, den) * den;
  }
  return to_int64(acc);
}

}  // namespace

RankedKernel::RankedKernel(const Rule& rule, int m) : kind_(kind_of(rule)), m_(m) {
  if (kind_ == RuleKind::Approval) throw InputError("approval rule needs an approval profile");
  validate_rule(rule, m);
  if (const auto* s = std::get_if<ScoringRule>(&rule)) {
    scale_ = lcm_of_denominators(s->alpha.alphas());
    for (const auto& a : s->alpha.alphas()) {
      weights_.push_back(to_int64(boost::multiprecision::numerator(Rational(a * scale_))));
    }
  } else if (const auto* k = std::get_if<KApprovalRule>(&rule)) {
    weights_.assign(static_cast<std::size_t>(m), 0);
    for (int i = 0; i < k->k; ++i) weights_[i] = 1;
  } else if (const auto* c = std::get_if<CopelandRule>(&rule)) {
    scale_ = to_int64(boost::multiprecision::denominator(c->alpha));
    tie_weight_ = to_int64(boost::multiprecision::numerator(c->alpha));
  }
}

void RankedKernel::keys(std::span<const Ranking> ballots, std::span<const std::int64_t> counts,
                        std::vector<std::int64_t>& out) const {
  out.assign(static_cast<std::size_t>(m_), 0);
  switch (kind_) {
    case RuleKind::Scoring:
    case RuleKind::KApproval:
      for (std::size_t b = 0; b < ballots.size(); ++b) {
        if (counts[b] == 0) continue;
        for (int pos = 0; pos < m_; ++pos) out[ballots[b].at(pos)] += counts[b] * weights_[pos];
      }
      return;
    case RuleKind::Bucklin: {
      top_counts(ballots, counts, m_, buffer_);
      const std::int64_t n = std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
      for (int x = 0; x < m_; ++x) {
        int level = m_;
        for (int l = 0; l < m_; ++l) {
          if (2 * buffer_(l, x) > n) {
            level = l + 1;
            break;
          }
        }
        out[x] = -level;
      }
      return;
    }
    case RuleKind::Maximin:
      pairwise_counts(ballots, counts, m_, buffer_);
      for (int x = 0; x < m_; ++x) {
        std::int64_t best = std::numeric_limits<std::int64_t>::max();
        for (int y = 0; y < m_; ++y) {
          if (y != x) best = std::min(best, buffer_(x, y));
        }
        out[x] = m_ == 1 ? 0 : best;
      }
      return;
    case RuleKind::Copeland:
      pairwise_counts(ballots, counts, m_, buffer_);
      for (int x = 0; x < m_; ++x) {
        std::int64_t wins = 0;
        std::int64_t ties = 0;
        for (int y = 0; y < m_; ++y) {
          if (y == x) continue;
          if (buffer_(x, y) > 0) ++wins;
          else if (buffer_(x, y) == 0) ++ties;
        }
        out[x] = scale_ * wins + tie_weight_ * ties;
      }
      return;
    case RuleKind::Approval:
      break;
  }
}

Rational RankedKernel::score_of(std::int64_t key) const {
  if (kind_ == RuleKind::Bucklin) return Rational(-key);
  return Rational(key, scale_);
}

void approval_keys(std::span<const ApprovalBallot> ballots, std::span<const std::int64_t> counts,
                   int m, std::vector<std::int64_t>& out) {
  out.assign(static_cast<std::size_t>(m), 0);
  for (std::size_t b = 0; b < ballots.size(); ++b) {
    for (Candidate x : ballots[b].approved()) out[x] += counts[b];
  }
}

std::vector<Candidate> argmax_set(std::span<const std::int64_t> keys) {
  std::vector<Candidate> out;
  const auto best = *std::max_element(keys.begin(), keys.end());
  for (std::size_t x = 0; x < keys.size(); ++x) {
    if (keys[x] == best) out.push_back(static_cast<Candidate>(x));
  }
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------------------------
// Tallies

namespace {

template <class Ballot>
std::pair<std::vector<Ballot>, std::vector<std::int64_t>> split_votes(
    std::span<const WeightedBallot<Ballot>> votes) {
  std::vector<Ballot> ballots;
  std::vector<std::int64_t> counts;
  ballots.reserve(votes.size());
  counts.reserve(votes.size());
  for (const auto& v : votes) {
    ballots.push_back(v.ballot);
    counts.push_back(v.count);
  }
  return {std::move(ballots), std::move(counts)};
}

}  // namespace

std::vector<Rational> positional_scores(const RankedProfile& profile, const ScoreVector& alpha) {
  const int m = profile.num_candidates();
  if (alpha.size() != m) {
    throw DimensionError("score vector has length " + std::to_string(alpha.size()) +
                         " but m=" + std::to_string(m));
  }
  std::vector<Rational> scores(static_cast<std::size_t>(m), Rational(0));
  for (const auto& v : profile.votes()) {
    for (int pos = 0; pos < m; ++pos) scores[v.ballot.at(pos)] += alpha[pos] * v.count;
  }
  return scores;
}

std::vector<std::int64_t> approval_scores(const ApprovalProfile& profile) {
  const auto [ballots, counts] = split_votes(profile.votes());
  std::vector<std::int64_t> out;
  detail::approval_keys(ballots, counts, profile.num_candidates(), out);
  return out;
}

Matrix<std::int64_t> top_k_counts(const RankedProfile& profile) {
  const auto [ballots, counts] = split_votes(profile.votes());
  Matrix<std::int64_t> out;
  detail::top_counts(ballots, counts, profile.num_candidates(), out);
  return out;
}

PairwiseMatrix pairwise_matrix(const RankedProfile& profile) {
  const auto [ballots, counts] = split_votes(profile.votes());
  Matrix<std::int64_t> margins;
  detail::pairwise_counts(ballots, counts, profile.num_candidates(), margins);
  return PairwiseMatrix(std::move(margins));
}

std::vector<int> bucklin_scores(const Matrix<std::int64_t>& top_counts, std::int64_t n) {
  const int m = top_counts.cols();
  std::vector<int> out(static_cast<std::size_t>(m), m);
  for (int x = 0; x < m; ++x) {
    for (int l = 0; l < m; ++l) {
      if (2 * top_counts(l, x) > n) {
        out[x] = l + 1;
        break;
      }
    }
  }
  return out;
}

std::vector<std::int64_t> maximin_scores(const PairwiseMatrix& d) {
  const int m = d.size();
  std::vector<std::int64_t> out(static_cast<std::size_t>(m), 0);
  for (int x = 0; x < m; ++x) {
    std::int64_t best = std::numeric_limits<std::int64_t>::max();
    for (int y = 0; y < m; ++y) {
      if (y != x) best = std::min(best, d(x, y));
    }
    if (m > 1) out[x] = best;
  }
  return out;
}

std::vector<Rational> copeland_scores(const PairwiseMatrix& d, const Rational& alpha) {
  const int m = d.size();
  std::vector<Rational> out(static_cast<std::size_t>(m), Rational(0));
  for (int x = 0; x < m; ++x) {
    for (int y = 0; y < m; ++y) {
      if (y == x) continue;
      if (d(x, y) > 0) out[x] += 1;
      else if (d(x, y) == 0) out[x] += alpha;
    }
  }
  return out;
}

WinnerResult winner_set(const RankedProfile& profile, const Rule& rule) {
  const detail::RankedKernel kernel(rule, profile.num_candidates());
  const auto [ballots, counts] = split_votes(profile.votes());
  std::vector<std::int64_t> keys;
  kernel.keys(ballots, counts, keys);
  WinnerResult result;
  result.winners = detail::argmax_set(keys);
  for (auto key : keys) result.scores.push_back(kernel.score_of(key));
  return result;
}

WinnerResult winner_set(const ApprovalProfile& profile, const Rule& rule) {
  if (kind_of(rule) != RuleKind::Approval) {
    throw InputError("rule '" + to_string(rule) + "' needs a ranked profile");
  }
  std::vector<std::int64_t> keys = approval_scores(profile);
  WinnerResult result;
  result.winners = detail::argmax_set(keys);
  for (auto key : keys) result.scores.emplace_back(key);
  return result;
}

WinnerResult winner_set(const Profile& profile, const Rule& rule) {
  return std::visit([&](const auto& p) { return winner_set(p, rule); }, profile);
}

std::pair<Candidate, Candidate> top_two(std::span<const Rational> scores) {
  if (scores.size() < 2) throw InputError("need at least two candidates");
  Candidate best = 0;
  for (Candidate x = 1; x < static_cast<Candidate>(scores.size()); ++x) {
    if (scores[x] > scores[best]) best = x;
  }
  Candidate second = best == 0 ? 1 : 0;
  for (Candidate x = 0; x < static_cast<Candidate>(scores.size()); ++x) {
    if (x != best && scores[x] > scores[second]) second = x;
  }
  return {best, second};
}

}  // namespace movest
