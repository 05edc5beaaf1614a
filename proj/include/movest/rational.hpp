#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace movest {

/// Exact arbitrary-precision rational used for every score, parameter and estimate.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

/// Parses "3", "-2", "0.125", "1/3" or "2.5e-1" exactly. Throws InputError.
Rational parse_rational(std::string_view text);

/// "p/q" or "p" when the denominator is 1.
std::string to_fraction_string(const Rational& value);

/// Exact decimal when the denominator has only factors 2 and 5, otherwise "p/q".
std::string to_display_string(const Rational& value);

double to_double(const Rational& value);

Rational abs(const Rational& value);

/// Smallest integer >= value.
BigInt ceil_of(const Rational& value);
/// Largest integer <= value.
BigInt floor_of(const Rational& value);

std::int64_t to_int64(const BigInt& value);

}  // namespace movest
