#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "probsem/rational.hpp"

namespace probsem {

// Ordered set of program variables. Stores and distributions are total maps
// over a universe; sharing it by pointer keeps stores small.
class Universe {
public:
  explicit Universe(std::vector<std::string> names);

  static std::shared_ptr<const Universe> of(std::vector<std::string> names) {
    return std::make_shared<const Universe>(std::move(names));
  }

  std::size_t size() const { return names_.size(); }
  const std::string& name(std::size_t i) const { return names_.at(i); }
  const std::vector<std::string>& names() const { return names_; }
  std::optional<std::size_t> index_of(std::string_view name) const;

  friend bool operator==(const Universe& a, const Universe& b) { return a.names_ == b.names_; }

private:
  std::vector<std::string> names_;
};

using UniversePtr = std::shared_ptr<const Universe>;

// True when both pointers denote the same variable list (not necessarily the
// same object).
bool same_universe(const UniversePtr& a, const UniversePtr& b);

// A program state: one integer per universe variable.
class Store {
public:
  explicit Store(UniversePtr u);
  Store(UniversePtr u, std::vector<Int> values);

  const UniversePtr& universe() const { return universe_; }
  const Int& value(std::size_t idx) const { return values_.at(idx); }
  const std::vector<Int>& values() const { return values_; }

  // Functional update s[x -> v].
  Store with(std::size_t idx, Int v) const;

  std::string str() const;  // "{x=2, y=3}"

  friend bool operator==(const Store& a, const Store& b) { return a.values_ == b.values_; }
  friend bool operator<(const Store& a, const Store& b);  // lexicographic on values

private:
  UniversePtr universe_;
  std::vector<Int> values_;
};

}  // namespace probsem
