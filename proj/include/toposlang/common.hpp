#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/dynamic_bitset.hpp>

namespace toposlang {

/// Base of every error thrown by the library. `what()` is a human message;
/// `kind()` is a stable machine tag used by the CLI when it reports failures.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

class UnknownElementError : public Error {
 public:
  explicit UnknownElementError(const std::string& m) : Error("unknown_element", m) {}
};

class CapExceededError : public Error {
 public:
  explicit CapExceededError(const std::string& m) : Error("cap_exceeded", m) {}
};

class InvalidStructureError : public Error {
 public:
  explicit InvalidStructureError(const std::string& m) : Error("invalid_structure", m) {}
};

class ParseError : public Error {
 public:
  ParseError(const std::string& m, std::size_t position)
      : Error("parse_error", m + " at position " + std::to_string(position)), position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

class TypeError : public Error {
 public:
  TypeError(const std::string& m, std::string subterm)
      : Error("type_error", m + " in `" + subterm + "`"), subterm_(std::move(subterm)) {}
  const std::string& subterm() const noexcept { return subterm_; }

 private:
  std::string subterm_;
};

using Bitset = boost::dynamic_bitset<std::uint64_t>;

/// Numeric order on equal-width bitsets, reading bit i as 2^i.
inline bool bitset_numeric_less(const Bitset& a, const Bitset& b) {
  const std::size_t n = std::max(a.size(), b.size());
  for (std::size_t i = n; i-- > 0;) {
    const bool x = i < a.size() && a.test(i);
    const bool y = i < b.size() && b.test(i);
    if (x != y) return y;
  }
  return false;
}

inline std::vector<std::size_t> bitset_members(const Bitset& b) {
  std::vector<std::size_t> out;
  for (auto i = b.find_first(); i != Bitset::npos; i = b.find_next(i)) out.push_back(i);
  return out;
}

inline std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

/// "{a,b}" rendering of the members of `b` under `names`.
inline std::string set_label(const Bitset& b, const std::vector<std::string>& names) {
  std::vector<std::string> parts;
  for (auto i : bitset_members(b)) parts.push_back(names.at(i));
  return "{" + join(parts, ",") + "}";
}

/// Enumerates every subset S of {0..n-1} that is closed under `down`:
/// i in S implies down[i] is a subset of S. `down[i]` must already be
/// transitively closed and contain i. Results are sorted in numeric bitset
/// order. Throws CapExceededError once more than `cap` sets are produced.
inline std::vector<Bitset> enumerate_closed_subsets(const std::vector<Bitset>& down, std::size_t cap) {
  const std::size_t n = down.size();
  std::vector<Bitset> up(n, Bitset(n));
  for (std::size_t i = 0; i < n; ++i)
    for (auto j : bitset_members(down[i])) up[j].set(i);

  std::vector<Bitset> out;
  Bitset included(n), excluded(n);
  auto recurse = [&](auto&& self) -> void {
    Bitset decided = included | excluded;
    std::size_t next = n;
    for (std::size_t i = 0; i < n; ++i)
      if (!decided.test(i)) {
        next = i;
        break;
      }
    if (next == n) {
      if (out.size() >= cap)
        throw CapExceededError("closed-subset enumeration exceeds cap of " + std::to_string(cap));
      out.push_back(included);
      return;
    }
    const Bitset saved_in = included, saved_ex = excluded;
    excluded |= up[next];
    self(self);
    included = saved_in;
    excluded = saved_ex;
    included |= down[next];
    self(self);
    included = saved_in;
    excluded = saved_ex;
  };
  recurse(recurse);
  std::sort(out.begin(), out.end(), bitset_numeric_less);
  return out;
}

}  // namespace toposlang
