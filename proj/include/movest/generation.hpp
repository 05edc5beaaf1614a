#pragma once

// Synthetic profiles: impartial culture, planted plurality gaps and two-candidate splits.

#include <cstdint>
#include <variant>

#include "movest/election.hpp"

namespace movest {

struct ImpartialCulture {};

/// Plurality score of `winner` exceeds the runner-up's by exactly `gap`.
struct PlantedGap {
  Candidate winner = 0;
  std::int64_t gap = 1;
};

/// floor(p * n) votes a>b, the rest b>a. Requires m = 2.
struct TwoCandidate {
  Rational p{1, 2};
};

using GenModel = std::variant<ImpartialCulture, PlantedGap, TwoCandidate>;

struct GenSpec {
  GenModel model;
  std::int64_t n = 1;
  int m = 2;
  std::uint64_t seed = 0;
};

/// Votes are merged by ballot and listed in ascending ballot order. Throws InputError when the
/// spec is invalid or the plant is unachievable.
RankedProfile generate(const GenSpec& spec);

/// Ranked generation followed by truncation of every ballot to its top-k prefix, k uniform in
/// [0, m] per ballot.
ApprovalProfile generate_approval(const GenSpec& spec);

std::uint64_t splitmix64(std::uint64_t x);

/// Seed of stream `index` derived from `base`: splitmix64(base + (index + 1) * golden gamma).
std::uint64_t split_seed(std::uint64_t base, std::uint64_t index);

/// X distribution of the two-candidate lower-bound construction: a fraction
/// 1/2 + (6 eps + 2c/n) / (1 - c) of the n voters prefer a, rounded down to whole votes.
struct TwoCandidateSplit {
  Rational requested_fraction;
  std::int64_t a_votes = 0;
  Rational realized_fraction;
};

/// Throws InputError when the requested fraction exceeds 1.
TwoCandidateSplit lower_bound_split(const Rational& epsilon, const Rational& c, std::int64_t n);

}  // namespace movest
