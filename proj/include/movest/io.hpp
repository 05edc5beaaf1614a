#pragma once

// Election file format and experiment CSV.
//
//   # comment
//   m 3
//   candidates alice,bob,carol      (optional; default names a, b, c, ...)
//   2: alice>bob>carol              ranked ballot with multiplicity 2
//   1: {alice,carol}                approval ballot ({} is the empty set)
//
// A file holds ranked or approval ballots, never both. Candidates may also be written as
// 0-based indices.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "movest/election.hpp"

namespace movest {

/// Throws ParseError (with the 1-based line number) on malformed input.
Profile parse_election(std::string_view text);

/// Canonical text: ballots sorted by candidate index sequence, equal ballots merged, the
/// candidates header written only when the profile carries names.
std::string write_election(const Profile& profile);

/// Same profile with equal ballots merged and listed in ascending ballot order.
Profile canonicalize(const Profile& profile);

struct ExperimentRow {
  std::int64_t trial = 0;
  std::uint64_t seed = 0;
  std::string rule;
  std::int64_t n = 0;
  int m = 0;
  Rational epsilon;
  Rational delta;
  std::int64_t ell = 0;
  std::optional<std::int64_t> mov_exact;
  Rational mov_lower;
  std::optional<Rational> mov_upper;  // nullopt = +infinity
  Rational estimate;
  Rational abs_error;  // |estimate - mov_exact|, or distance to [mov_lower, mov_upper]
  bool within_guarantee = false;
};

inline constexpr std::string_view kExperimentCsvHeader =
    "trial,seed,rule,n,m,epsilon,delta,ell,mov_exact,mov_lower,mov_upper,estimate,abs_error,"
    "within_guarantee";

/// Header line plus one line per row, "\n" terminated.
std::string write_experiment_csv(std::span<const ExperimentRow> rows);

/// RFC 4180 field quoting: wraps in quotes when the field holds a comma, quote or line break.
std::string csv_field(std::string_view text);

/// printf "%#.12g" of the value, "inf" for infinity.
std::string format_decimal(double value);

}  // namespace movest
