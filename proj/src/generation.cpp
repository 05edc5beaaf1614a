#include "movest/generation.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <random>

#include "movest/error.hpp"

namespace movest {
namespace {

constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

void check_spec(const GenSpec& spec) {
  if (spec.n < 1) throw InputError("n must be positive");
  if (spec.m < 1) throw InputError("m must be positive");
}

/// `top` first, then every other candidate in ascending index order.
Ranking canonical_ranking(Candidate top, int m) {
  std::vector<Candidate> order{top};
  for (Candidate x = 0; x < m; ++x) {
    if (x != top) order.push_back(x);
  }
  return Ranking(std::move(order));
}

RankedProfile from_top_counts(std::span<const std::int64_t> tops, int m) {
  std::vector<WeightedBallot<Ranking>> votes;
  for (Candidate x = 0; x < m; ++x) {
    if (tops[x] > 0) votes.push_back({canonical_ranking(x, m), tops[x]});
  }
  return RankedProfile(m, std::move(votes));
}

RankedProfile impartial_culture(const GenSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  std::map<std::vector<Candidate>, std::int64_t> tally;
  std::vector<Candidate> order(static_cast<std::size_t>(spec.m));
  for (std::int64_t v = 0; v < spec.n; ++v) {
    std::iota(order.begin(), order.end(), 0);
    for (int i = spec.m - 1; i > 0; --i) {
      std::uniform_int_distribution<int> pick(0, i);
      std::swap(order[i], order[pick(rng)]);
    }
    ++tally[order];
  }
  std::vector<WeightedBallot<Ranking>> votes;
  for (auto& [ballot, count] : tally) votes.push_back({Ranking(ballot), count});
  return RankedProfile(spec.m, std::move(votes));
}

RankedProfile planted_gap(const GenSpec& spec, const PlantedGap& plant) {
  const int m = spec.m;
  const std::int64_t n = spec.n;
  const std::int64_t g = plant.gap;
  if (m < 2) throw InputError("planted gap needs m >= 2");
  if (plant.winner < 0 || plant.winner >= m) throw InputError("planted winner out of range");
  if (g < 1 || g > n) throw InputError("planted gap must lie in [1, n]");
  // Smallest winner score leaving room for the others below the runner-up.
  const std::int64_t s_w = (n + (m - 1) * g + m - 1) / m;
  const std::int64_t rest = n - 2 * s_w + g;
  if (m == 2 && (n - g) % 2 != 0) throw InputError("with m = 2 the gap must have the parity of n");
  if (rest < 0) throw InputError("gap " + std::to_string(g) + " is unachievable with n = " + std::to_string(n));
  const Candidate runner_up = plant.winner == 0 ? 1 : 0;
  std::vector<std::int64_t> tops(static_cast<std::size_t>(m), 0);
  tops[plant.winner] = s_w;
  tops[runner_up] = s_w - g;
  int slot = 0;
  for (Candidate x = 0; x < m; ++x) {
    if (x == plant.winner || x == runner_up) continue;
    tops[x] = rest / (m - 2) + (slot < rest % (m - 2) ? 1 : 0);
    ++slot;
  }
  return from_top_counts(tops, m);
}

RankedProfile two_candidate(const GenSpec& spec, const TwoCandidate& model) {
  if (spec.m != 2) throw InputError("two-candidate model needs m = 2");
  if (model.p < 0 || model.p > 1) throw InputError("p must lie in [0, 1]");
  const std::int64_t a = to_int64(floor_of(model.p * spec.n));
  const std::int64_t tops[2] = {a, spec.n - a};
  return from_top_counts(tops, 2);
}

}  // namespace

RankedProfile generate(const GenSpec& spec) {
  check_spec(spec);
  return std::visit(
      [&](const auto& model) -> RankedProfile {
        using T = std::decay_t<decltype(model)>;
        if constexpr (std::is_same_v<T, ImpartialCulture>) {
          return impartial_culture(spec);
        } else if constexpr (std::is_same_v<T, PlantedGap>) {
          return planted_gap(spec, model);
        } else {
          return two_candidate(spec, model);
        }
      },
      spec.model);
}

ApprovalProfile generate_approval(const GenSpec& spec) {
  const RankedProfile ranked = generate(spec);
  std::mt19937_64 rng(split_seed(spec.seed, 0));
  std::uniform_int_distribution<int> prefix(0, spec.m);
  std::map<std::vector<Candidate>, std::int64_t> tally;
  for (const auto& v : ranked.votes()) {
    for (std::int64_t i = 0; i < v.count; ++i) {
      const int k = prefix(rng);
      std::vector<Candidate> approved(v.ballot.order().begin(), v.ballot.order().begin() + k);
      std::sort(approved.begin(), approved.end());
      ++tally[approved];
    }
  }
  std::vector<WeightedBallot<ApprovalBallot>> votes;
  for (auto& [approved, count] : tally) votes.push_back({ApprovalBallot(approved, spec.m), count});
  return ApprovalProfile(spec.m, std::move(votes));
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += kGoldenGamma;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t split_seed(std::uint64_t base, std::uint64_t index) {
  return splitmix64(base + (index + 1) * kGoldenGamma);
}

TwoCandidateSplit lower_bound_split(const Rational& epsilon, const Rational& c, std::int64_t n) {
  if (n < 1) throw InputError("n must be positive");
  if (epsilon <= 0 || c < 0 || c >= 1) throw InputError("need epsilon > 0 and c in [0, 1)");
  TwoCandidateSplit out;
  out.requested_fraction = Rational(1, 2) + (6 * epsilon + 2 * c / n) / (1 - c);
  if (out.requested_fraction > 1) {
    throw InputError("fraction " + to_display_string(out.requested_fraction) +
                     " exceeds 1; use a smaller epsilon");
  }
  out.a_votes = to_int64(floor_of(out.requested_fraction * n));
  out.realized_fraction = Rational(out.a_votes, n);
  return out;
}

}  // namespace movest
