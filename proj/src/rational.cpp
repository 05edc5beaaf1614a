#include "movest/rational.hpp"

#include <cctype>
#include <limits>

#include "movest/error.hpp"

namespace movest {
namespace {

BigInt parse_integer_digits(std::string_view digits, std::string_view whole) {
  if (digits.empty()) throw InputError("not a number: '" + std::string(whole) + "'");
  BigInt out = 0;
  for (char ch : digits) {
    if (!std::isdigit(static_cast<unsigned char>(ch))) {
      throw InputError("not a number: '" + std::string(whole) + "'");
    }
    out = out * 10 + (ch - '0');
  }
  return out;
}

BigInt pow10(long exponent) {
  BigInt out = 1;
  for (long i = 0; i < exponent; ++i) out *= 10;
  return out;
}

Rational parse_decimal(std::string_view text, std::string_view whole) {
  bool negative = false;
  if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }
  long exponent = 0;
  if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
    std::string_view exp_part = text.substr(e + 1);
    bool exp_negative = false;
    if (!exp_part.empty() && (exp_part.front() == '-' || exp_part.front() == '+')) {
      exp_negative = exp_part.front() == '-';
      exp_part.remove_prefix(1);
    }
    BigInt magnitude = parse_integer_digits(exp_part, whole);
    if (magnitude > 4000) throw InputError("exponent out of range: '" + std::string(whole) + "'");
    exponent = magnitude.convert_to<long>();
    if (exp_negative) exponent = -exponent;
    text = text.substr(0, e);
  }
  std::string_view int_part = text;
  std::string_view frac_part;
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    int_part = text.substr(0, dot);
    frac_part = text.substr(dot + 1);
  }
  if (int_part.empty() && frac_part.empty()) {
    throw InputError("not a number: '" + std::string(whole) + "'");
  }
  BigInt mantissa = int_part.empty() ? BigInt(0) : parse_integer_digits(int_part, whole);
  if (!frac_part.empty()) {
    mantissa = mantissa * pow10(static_cast<long>(frac_part.size())) +
               parse_integer_digits(frac_part, whole);
    exponent -= static_cast<long>(frac_part.size());
  }
  Rational value = exponent >= 0 ? Rational(mantissa * pow10(exponent))
                                 : Rational(mantissa, pow10(-exponent));
  return negative ? Rational(-value) : value;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) throw InputError("empty number");
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    Rational num = parse_decimal(text.substr(0, slash), text);
    Rational den = parse_decimal(text.substr(slash + 1), text);
    if (den == 0) throw InputError("zero denominator: '" + std::string(text) + "'");
    return num / den;
  }
  return parse_decimal(text, text);
}

std::string to_fraction_string(const Rational& value) {
  const BigInt num = boost::multiprecision::numerator(value);
  const BigInt den = boost::multiprecision::denominator(value);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

std::string to_display_string(const Rational& value) {
  BigInt den = boost::multiprecision::denominator(value);
  int twos = 0;
  int fives = 0;
  while (den % 2 == 0) { den /= 2; ++twos; }
  while (den % 5 == 0) { den /= 5; ++fives; }
  if (den != 1) return to_fraction_string(value);
  const int digits = std::max(twos, fives);
  if (digits == 0) return boost::multiprecision::numerator(value).str();
  const BigInt scaled = boost::multiprecision::numerator(value) * pow10(digits) /
                        boost::multiprecision::denominator(value);
  const bool negative = scaled < 0;
  std::string body = (negative ? BigInt(-scaled) : scaled).str();
  if (body.size() <= static_cast<std::size_t>(digits)) {
    body.insert(0, static_cast<std::size_t>(digits) + 1 - body.size(), '0');
  }
  body.insert(body.size() - static_cast<std::size_t>(digits), ".");
  return negative ? "-" + body : body;
}

double to_double(const Rational& value) { return value.convert_to<double>(); }

Rational abs(const Rational& value) { return value < 0 ? Rational(-value) : value; }

BigInt floor_of(const Rational& value) {
  const BigInt num = boost::multiprecision::numerator(value);
  const BigInt den = boost::multiprecision::denominator(value);
  BigInt q = num / den;  // truncates toward zero
  if (num < 0 && q * den != num) q -= 1;
  return q;
}

BigInt ceil_of(const Rational& value) { return -floor_of(Rational(-value)); }

std::int64_t to_int64(const BigInt& value) {
  if (value > std::numeric_limits<std::int64_t>::max() ||
      value < std::numeric_limits<std::int64_t>::min()) {
    throw InputError("integer out of 64-bit range: " + value.str());
  }
  return value.convert_to<std::int64_t>();
}

}  // namespace movest
