#include "probsem/store.hpp"

#include <algorithm>
#include <stdexcept>

namespace probsem {

Universe::Universe(std::vector<std::string> names) : names_(std::move(names)) {
  if (names_.empty()) throw std::invalid_argument("universe must declare at least one variable");
  for (const auto& n : names_) {
    if (n.empty()) throw std::invalid_argument("empty variable name");
    if (std::count(names_.begin(), names_.end(), n) != 1)
      throw std::invalid_argument("duplicate variable name: " + n);
  }
}

std::optional<std::size_t> Universe::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return i;
  return std::nullopt;
}

bool same_universe(const UniversePtr& a, const UniversePtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return *a == *b;
}

Store::Store(UniversePtr u) : universe_(std::move(u)), values_(universe_->size(), Int(0)) {}

Store::Store(UniversePtr u, std::vector<Int> values)
    : universe_(std::move(u)), values_(std::move(values)) {
  if (values_.size() != universe_->size())
    throw std::invalid_argument("store arity does not match universe");
}

Store Store::with(std::size_t idx, Int v) const {
  Store out = *this;
  out.values_.at(idx) = std::move(v);
  return out;
}

std::string Store::str() const {
  std::string out = "{";
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (i) out += ", ";
    out += universe_->name(i) + "=" + values_[i].get_str();
  }
  return out + "}";
}

bool operator<(const Store& a, const Store& b) {
  return std::lexicographical_compare(
      a.values_.begin(), a.values_.end(), b.values_.begin(), b.values_.end(),
      [](const Int& x, const Int& y) { return cmp(x, y) < 0; });
}

}  // namespace probsem
