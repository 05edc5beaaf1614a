#pragma once

#include <string_view>

#include "movest/io.hpp"

namespace testing_helpers {

inline movest::RankedProfile ranked(std::string_view text) {
  return std::get<movest::RankedProfile>(movest::parse_election(text));
}

inline movest::ApprovalProfile approval(std::string_view text) {
  return std::get<movest::ApprovalProfile>(movest::parse_election(text));
}

inline std::vector<movest::Rational> q(std::initializer_list<movest::Rational> values) { return values; }

}  // namespace testing_helpers
