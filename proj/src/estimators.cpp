#include "movest/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "kernel.hpp"
#include "movest/error.hpp"
#include "movest/mov_oracle.hpp"

namespace movest {
namespace {

using Float50 = boost::multiprecision::cpp_bin_float_50;

Float50 to_float50(const Rational& value) {
  return Float50(boost::multiprecision::numerator(value)) /
         Float50(boost::multiprecision::denominator(value));
}

void check_unit_open(const Rational& value, const char* name) {
  if (!(value > 0 && value < 1)) {
    throw InputError(std::string(name) + " must lie in (0, 1), got " + to_display_string(value));
  }
}

/// Leading constant and union-bound count of the sample-size formula.
std::pair<int, int> formula_terms(RuleKind kind, int m, int k) {
  if (kind == RuleKind::KApproval) {
    if (k < 1 || (m > 0 && k > m - 1)) throw InputError("k-approval requires 1 <= k <= m-1");
    return {12, k};
  }
  if (m < 2) throw InputError("sample size needs m >= 2");
  switch (kind) {
    case RuleKind::Maximin: return {24, m};
    case RuleKind::Copeland: return {96, m};
    default: return {12, m};
  }
}

Rational scaled(std::int64_t n, std::int64_t count, std::int64_t ell) {
  return Rational(BigInt(n) * count, BigInt(ell));
}

}  // namespace

std::int64_t sample_size(RuleKind kind, const Rational& epsilon, const Rational& delta, int m, int k) {
  check_unit_open(epsilon, "epsilon");
  check_unit_open(delta, "delta");
  const auto [constant, count] = formula_terms(kind, m, k);
  const Float50 eps = to_float50(epsilon);
  const Float50 value = Float50(constant) / (eps * eps) * log(Float50(2 * count) / to_float50(delta));
  return ceil(value).convert_to<std::int64_t>();
}

double effective_epsilon(RuleKind kind, std::int64_t ell, const Rational& delta, int m, int k) {
  if (ell < 1) throw InputError("sample count must be positive");
  check_unit_open(delta, "delta");
  const auto [constant, count] = formula_terms(kind, m, k);
  return std::sqrt(constant * std::log(2.0 * count / to_double(delta)) / static_cast<double>(ell));
}

double lower_bound_samples(const Rational& c, const Rational& epsilon, const Rational& delta) {
  if (c < 0 || c > 1) throw InputError("c must lie in [0, 1)");
  check_unit_open(epsilon, "epsilon");
  check_unit_open(delta, "delta");
  const long double pi = 3.141592653589793238462643383279502884L;
  const long double e = 2.718281828459045235360287471352662498L;
  const long double one_minus_c = 1.0L - static_cast<long double>(to_double(c));
  const long double eps = static_cast<long double>(to_double(epsilon));
  const long double log_term =
      std::log(1.0L / (8.0L * e * std::sqrt(pi) * static_cast<long double>(to_double(delta))));
  const long double value = one_minus_c * one_minus_c / (36.0L * eps * eps) * log_term;
  return static_cast<double>(std::max(value, 0.0L));
}

Rational guarantee_factor(RuleKind kind, int m) {
  switch (kind) {
    case RuleKind::KApproval:
    case RuleKind::Approval:
      return 0;
    case RuleKind::Scoring:
    case RuleKind::Bucklin:
    case RuleKind::Maximin:
      return Rational(1, 3);
    case RuleKind::Copeland: {
      const int lg = ceil_log2(m);
      return Rational(2 * lg + 1, 2 * lg + 3);
    }
  }
  return 0;
}

// ---------------------------------------------------------------------------------------------
// Vote sources

template <class ProfileT, class Ballot>
BasicVoteSource<ProfileT, Ballot>::BasicVoteSource(ProfileT profile) : profile_(std::move(profile)) {
  std::int64_t running = 0;
  for (const auto& v : profile_.votes()) {
    running += v.count;
    cumulative_.push_back(running);
  }
}

template <class ProfileT, class Ballot>
template <class Visit>
void BasicVoteSource<ProfileT, Ballot>::draw_indices(std::int64_t ell, std::uint64_t seed,
                                                     Visit&& visit) const {
  if (ell < 1) throw InputError("sample count must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::int64_t> uniform(0, n() - 1);
  for (std::int64_t i = 0; i < ell; ++i) {
    const std::int64_t voter = uniform(rng);
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), voter);
    visit(static_cast<std::size_t>(it - cumulative_.begin()));
  }
}

template <class ProfileT, class Ballot>
std::vector<std::int64_t> BasicVoteSource<ProfileT, Ballot>::draw_counts(std::int64_t ell,
                                                                         std::uint64_t seed) const {
  std::vector<std::int64_t> counts(cumulative_.size(), 0);
  draw_indices(ell, seed, [&](std::size_t entry) { ++counts[entry]; });
  return counts;
}

template <class ProfileT, class Ballot>
std::vector<Ballot> BasicVoteSource<ProfileT, Ballot>::draw(std::int64_t ell, std::uint64_t seed) const {
  std::vector<Ballot> out;
  out.reserve(static_cast<std::size_t>(ell));
  const auto votes = profile_.votes();
  draw_indices(ell, seed, [&](std::size_t entry) { out.push_back(votes[entry].ballot); });
  return out;
}

template class BasicVoteSource<RankedProfile, Ranking>;
template class BasicVoteSource<ApprovalProfile, ApprovalBallot>;

VoteSource make_vote_source(const Profile& profile) {
  if (const auto* ranked = std::get_if<RankedProfile>(&profile)) return RankedVoteSource(*ranked);
  return ApprovalVoteSource(std::get<ApprovalProfile>(profile));
}

std::vector<Ranking> sample_votes(const RankedVoteSource& source, std::int64_t ell, std::uint64_t seed) {
  return source.draw(ell, seed);
}

std::vector<ApprovalBallot> sample_votes(const ApprovalVoteSource& source, std::int64_t ell,
                                         std::uint64_t seed) {
  return source.draw(ell, seed);
}

// ---------------------------------------------------------------------------------------------
// Estimators

bool MovEstimate::within_guarantee(const Rational& mov, std::int64_t n) const {
  return abs(Rational(m_bar - mov)) <= c * mov + guarantee_epsilon * n;
}

namespace {

struct Sample {
  std::vector<std::int64_t> counts;
  std::int64_t ell;
};

MovEstimate start_estimate(RuleKind kind, int m, int k, const EstimateOptions& options) {
  check_unit_open(options.epsilon, "epsilon");
  check_unit_open(options.delta, "delta");
  if (m < 2) throw InputError("estimating a margin of victory needs m >= 2");
  MovEstimate out;
  out.rule = kind;
  out.seed = options.seed;
  out.c = guarantee_factor(kind, m);
  out.epsilon = options.epsilon;
  out.delta = options.delta;
  if (options.samples) {
    out.ell = *options.samples;
    out.guarantee_epsilon = Rational(effective_epsilon(kind, out.ell, options.delta, m, k));
  } else {
    out.ell = sample_size(kind, options.epsilon, options.delta, m, k);
    out.guarantee_epsilon = options.epsilon;
  }
  if (out.ell < 1) throw InputError("sample count must be positive");
  return out;
}

std::vector<Ranking> distinct_rankings(const RankedProfile& profile) {
  std::vector<Ranking> out;
  for (const auto& v : profile.votes()) out.push_back(v.ballot);
  return out;
}

/// Fills scores from integer keys scaled by n / (ell * scale) and picks the top two.
void finish_gap_estimate(MovEstimate& out, std::span<const std::int64_t> keys, std::int64_t n,
                         std::int64_t scale) {
  out.estimated_scores.clear();
  for (auto key : keys) out.estimated_scores.push_back(scaled(n, key, out.ell * scale));
  std::tie(out.w_bar, out.z_bar) = top_two(out.estimated_scores);
}

Matrix<Rational> scaled_matrix(const Matrix<std::int64_t>& counts, std::int64_t n, std::int64_t ell) {
  Matrix<Rational> out(counts.rows(), counts.cols());
  for (int r = 0; r < counts.rows(); ++r) {
    for (int c = 0; c < counts.cols(); ++c) out(r, c) = scaled(n, counts(r, c), ell);
  }
  return out;
}

}  // namespace

MovEstimate estimate_scoring(const RankedVoteSource& source, const ScoreVector& alpha,
                             const EstimateOptions& options) {
  MovEstimate out = start_estimate(RuleKind::Scoring, source.m(), 0, options);
  if (alpha.size() != source.m()) throw DimensionError("score vector length does not match m");
  const ScoreVector normalized = normalize_score_vector(alpha.alphas());
  const detail::RankedKernel kernel(ScoringRule{normalized}, source.m());
  const auto counts = source.draw_counts(out.ell, options.seed);
  std::vector<std::int64_t> keys;
  kernel.keys(distinct_rankings(source.profile()), counts, keys);
  // The kernel scales alpha to integers; score_of(1) is the reciprocal of that scale.
  const Rational unit = kernel.score_of(1);
  out.estimated_scores.clear();
  for (auto key : keys) out.estimated_scores.push_back(scaled(source.n(), key, out.ell) * unit);
  std::tie(out.w_bar, out.z_bar) = top_two(out.estimated_scores);
  out.m_bar = (out.estimated_scores[out.w_bar] - out.estimated_scores[out.z_bar]) /
              (Rational(3, 2) * normalized.top());
  return out;
}

MovEstimate estimate_kapproval(const RankedVoteSource& source, int k, const EstimateOptions& options) {
  MovEstimate out = start_estimate(RuleKind::KApproval, source.m(), k, options);
  const detail::RankedKernel kernel(KApprovalRule{k}, source.m());
  const auto counts = source.draw_counts(out.ell, options.seed);
  std::vector<std::int64_t> keys;
  kernel.keys(distinct_rankings(source.profile()), counts, keys);
  finish_gap_estimate(out, keys, source.n(), 1);
  out.m_bar = (out.estimated_scores[out.w_bar] - out.estimated_scores[out.z_bar]) / 2;
  return out;
}

MovEstimate estimate_approval(const ApprovalVoteSource& source, const EstimateOptions& options) {
  MovEstimate out = start_estimate(RuleKind::Approval, source.m(), 0, options);
  const auto counts = source.draw_counts(out.ell, options.seed);
  std::vector<ApprovalBallot> ballots;
  for (const auto& v : source.profile().votes()) ballots.push_back(v.ballot);
  std::vector<std::int64_t> keys;
  detail::approval_keys(ballots, counts, source.m(), keys);
  finish_gap_estimate(out, keys, source.n(), 1);
  out.m_bar = (out.estimated_scores[out.w_bar] - out.estimated_scores[out.z_bar]) / 2;
  return out;
}

MovEstimate estimate_bucklin(const RankedVoteSource& source, const EstimateOptions& options) {
  const int m = source.m();
  MovEstimate out = start_estimate(RuleKind::Bucklin, m, 0, options);
  const auto counts = source.draw_counts(out.ell, options.seed);
  Matrix<std::int64_t> top;
  detail::top_counts(distinct_rankings(source.profile()), counts, m, top);
  const std::int64_t n = source.n();
  const std::int64_t ell = out.ell;
  out.estimated_matrix = scaled_matrix(top, n, ell);
  // Estimated count exceeds n/2 exactly when the sampled count exceeds ell/2.
  const auto levels = bucklin_scores(top, ell);
  out.estimated_scores.assign(levels.begin(), levels.end());
  out.w_bar = static_cast<Candidate>(std::min_element(levels.begin(), levels.end()) - levels.begin());
  std::optional<Rational> delta_bar;
  for (int l = 0; l + 1 < m; ++l) {
    if (2 * top(l, out.w_bar) <= ell) continue;
    for (Candidate x = 0; x < m; ++x) {
      if (x == out.w_bar || 2 * top(l, x) > ell) continue;
      const Rational value = out.estimated_matrix(l, out.w_bar) - out.estimated_matrix(l, x) + 1;
      if (!delta_bar || value < *delta_bar) {
        delta_bar = value;
        out.z_bar = x;
      }
    }
  }
  if (delta_bar) {
    out.m_bar = *delta_bar / Rational(3, 2);
  } else {
    out.sentinel = true;
    out.m_bar = n;
    out.z_bar = out.w_bar == 0 ? 1 : 0;
  }
  return out;
}

MovEstimate estimate_maximin(const RankedVoteSource& source, const EstimateOptions& options) {
  const int m = source.m();
  MovEstimate out = start_estimate(RuleKind::Maximin, m, 0, options);
  const auto counts = source.draw_counts(out.ell, options.seed);
  Matrix<std::int64_t> margins;
  detail::pairwise_counts(distinct_rankings(source.profile()), counts, m, margins);
  out.estimated_matrix = scaled_matrix(margins, source.n(), out.ell);
  out.estimated_scores.assign(static_cast<std::size_t>(m), Rational(0));
  for (Candidate x = 0; x < m; ++x) {
    std::optional<Rational> lowest;
    for (Candidate y = 0; y < m; ++y) {
      if (y != x && (!lowest || out.estimated_matrix(x, y) < *lowest)) lowest = out.estimated_matrix(x, y);
    }
    out.estimated_scores[x] = *lowest;
  }
  std::tie(out.w_bar, out.z_bar) = top_two(out.estimated_scores);
  out.m_bar = (out.estimated_scores[out.w_bar] - out.estimated_scores[out.z_bar]) / 3;
  return out;
}

MovEstimate estimate_copeland(const RankedVoteSource& source, const Rational& alpha,
                              const EstimateOptions& options) {
  const int m = source.m();
  if (alpha < 0 || alpha > 1) throw InputError("Copeland alpha must lie in [0, 1]");
  MovEstimate out = start_estimate(RuleKind::Copeland, m, 0, options);
  const auto counts = source.draw_counts(out.ell, options.seed);
  Matrix<std::int64_t> margins;
  detail::pairwise_counts(distinct_rankings(source.profile()), counts, m, margins);
  out.estimated_matrix = scaled_matrix(margins, source.n(), out.ell);
  // Signs of the estimated margins equal the signs of the sampled counts.
  out.estimated_scores = copeland_scores(PairwiseMatrix(margins), alpha);
  out.w_bar = static_cast<Candidate>(
      std::max_element(out.estimated_scores.begin(), out.estimated_scores.end()) -
      out.estimated_scores.begin());
  std::optional<std::int64_t> gamma_bar;
  for (Candidate x = 0; x < m; ++x) {
    if (x == out.w_bar) continue;
    const auto rm = relative_margin(out.estimated_matrix, source.n(), out.w_bar, x, alpha);
    if (!gamma_bar || rm < *gamma_bar) {
      gamma_bar = rm;
      out.z_bar = x;
    }
  }
  const int lg = ceil_log2(m);
  out.m_bar = Rational(4 * (lg + 1), 2 * lg + 3) * std::max<std::int64_t>(*gamma_bar, 0);
  return out;
}

MovEstimate estimate(const VoteSource& source, const Rule& rule, const EstimateOptions& options) {
  if (const auto* approval = std::get_if<ApprovalVoteSource>(&source)) {
    if (kind_of(rule) != RuleKind::Approval) {
      throw InputError("rule '" + to_string(rule) + "' needs a ranked profile");
    }
    return estimate_approval(*approval, options);
  }
  const auto& ranked = std::get<RankedVoteSource>(source);
  validate_rule(rule, ranked.m());
  switch (kind_of(rule)) {
    case RuleKind::Scoring: return estimate_scoring(ranked, std::get<ScoringRule>(rule).alpha, options);
    case RuleKind::KApproval: return estimate_kapproval(ranked, std::get<KApprovalRule>(rule).k, options);
    case RuleKind::Bucklin: return estimate_bucklin(ranked, options);
    case RuleKind::Maximin: return estimate_maximin(ranked, options);
    case RuleKind::Copeland: return estimate_copeland(ranked, std::get<CopelandRule>(rule).alpha, options);
    case RuleKind::Approval: break;
  }
  throw InputError("approval rule needs an approval profile");
}

}  // namespace movest
