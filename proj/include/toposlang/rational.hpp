#pragma once

#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

#include "toposlang/common.hpp"

namespace toposlang {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Accepts "n", "n/d" and finite decimals "-2.75"; the value is exact.
inline Rational parse_rational(std::string_view text) {
  auto bad = [&] { return Error("bad_rational", "malformed rational '" + std::string(text) + "'"); };
  if (text.empty()) throw bad();
  std::string s(text);
  auto digits = [](std::string_view d) {
    return !d.empty() && std::all_of(d.begin(), d.end(), [](char c) { return c >= '0' && c <= '9'; });
  };
  bool negative = false;
  std::string_view body(s);
  if (body.front() == '+' || body.front() == '-') {
    negative = body.front() == '-';
    body.remove_prefix(1);
  }
  Rational value;
  if (auto slash = body.find('/'); slash != std::string_view::npos) {
    auto num = body.substr(0, slash), den = body.substr(slash + 1);
    if (!digits(num) || !digits(den)) throw bad();
    Integer d{std::string(den)};
    if (d == 0) throw Error("bad_rational", "zero denominator in '" + s + "'");
    value = Rational(Integer(std::string(num)), d);
  } else if (auto dot = body.find('.'); dot != std::string_view::npos) {
    auto whole = body.substr(0, dot), frac = body.substr(dot + 1);
    if ((!whole.empty() && !digits(whole)) || !digits(frac)) throw bad();
    Integer scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    Integer w = whole.empty() ? Integer(0) : Integer(std::string(whole));
    value = Rational(w * scale + Integer(std::string(frac)), scale);
  } else {
    if (!digits(body)) throw bad();
    value = Rational(Integer(std::string(body)));
  }
  return negative ? Rational(-value) : value;
}

/// Lowest terms, "n" when integral and "n/d" otherwise.
inline std::string format_rational(const Rational& q) {
  const Integer& n = boost::multiprecision::numerator(q);
  const Integer& d = boost::multiprecision::denominator(q);
  if (d == 1) return n.str();
  return n.str() + "/" + d.str();
}

}  // namespace toposlang
