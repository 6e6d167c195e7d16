#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "toposlang/common.hpp"

namespace toposlang {

/// A finite partial order given by generating pairs (a <= b). The reflexive
/// transitive closure is computed on construction.
class Poset {
 public:
  Poset(std::vector<std::string> elements, const std::vector<std::pair<std::string, std::string>>& order)
      : elements_(std::move(elements)) {
    const std::size_t n = elements_.size();
    for (std::size_t i = 0; i < n; ++i) {
      if (!index_.emplace(elements_[i], i).second)
        throw InvalidStructureError("duplicate poset element '" + elements_[i] + "'");
    }
    leq_.assign(n, Bitset(n));
    for (std::size_t i = 0; i < n; ++i) leq_[i].set(i);
    for (const auto& [a, b] : order) leq_[index_of(a)].set(index_of(b));
    // Warshall closure on rows: leq_[i] is the up-set of i.
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i)
        if (leq_[i].test(k)) leq_[i] |= leq_[k];
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (leq_[i].test(j) && leq_[j].test(i))
          throw InvalidStructureError("cycle detected: '" + elements_[i] + "' and '" + elements_[j] +
                                      "' are mutually related");
  }

  std::size_t size() const { return elements_.size(); }
  const std::vector<std::string>& elements() const { return elements_; }
  const std::string& element(std::size_t i) const { return elements_.at(i); }

  std::size_t index_of(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw UnknownElementError("unknown poset element '" + name + "'");
    return it->second;
  }

  bool leq(std::size_t a, std::size_t b) const { return leq_.at(a).test(b); }

  /// {r : r <= p}
  Bitset down(std::size_t p) const {
    Bitset out(size());
    for (std::size_t r = 0; r < size(); ++r)
      if (leq(r, p)) out.set(r);
    return out;
  }

  /// All lower sets, numeric bitset order.
  std::vector<Bitset> lower_sets(std::size_t cap = std::size_t{1} << 20) const {
    std::vector<Bitset> downs;
    for (std::size_t i = 0; i < size(); ++i) downs.push_back(down(i));
    return enumerate_closed_subsets(downs, cap);
  }

 private:
  std::vector<std::string> elements_;
  std::map<std::string, std::size_t> index_;
  std::vector<Bitset> leq_;
};

}  // namespace toposlang
