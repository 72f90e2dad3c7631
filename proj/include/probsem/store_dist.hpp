#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "probsem/rational.hpp"
#include "probsem/store.hpp"
#include "probsem/syntax.hpp"

namespace probsem {

// Finite-support subprobability distribution over stores: a total map
// store -> Weight with finitely many nonzero entries. Zero weights are never
// stored, so equality of the entry maps is exactly pointwise equality.
class Dist {
public:
  explicit Dist(UniversePtr u) : universe_(std::move(u)) {}

  static Dist point(const Store& s, Weight w = Weight::one());

  const UniversePtr& universe() const { return universe_; }

  // Accumulates weight on a store, dropping the entry if it ends up zero.
  void add_mass(const Store& s, const Weight& w);
  void add_mass(std::vector<Int> values, const Weight& w);

  Weight at(const Store& s) const;
  Weight at(const std::vector<Int>& values) const;

  const std::map<std::vector<Int>, Weight>& entries() const { return entries_; }
  std::size_t support_size() const { return entries_.size(); }
  bool is_zero() const { return entries_.empty(); }

  std::string str() const;
  // Compact stable serialization; equal distributions yield equal keys.
  std::string canonical_key() const;

  friend bool operator==(const Dist& a, const Dist& b) {
    return same_universe(a.universe_, b.universe_) && a.entries_ == b.entries_;
  }

private:
  UniversePtr universe_;
  std::map<std::vector<Int>, Weight> entries_;
};

Weight mass(const Dist& d);

// Pointwise sum; universes must agree.
Dist add(const Dist& a, const Dist& b);

// Pointwise scaling by a non-negative rational.
Dist scale(const Weight& c, const Dist& d);

struct Concentration {
  bool concentrated = false;          // |support| <= 1
  std::optional<Store> witness;       // the unique support store, if any
};
Concentration is_concentrated(const Dist& d);

// Conditioning without renormalization: keeps exactly the stores satisfying b.
Dist select(const BoolExpr& b, const Dist& d);

// Pushforward along the deterministic update x := e.
Dist apply_assign(std::size_t var, const Expr& e, const Dist& d);

// Pushforward along the random update x ~ ds.
Dist apply_rassign(std::size_t var, const DistSpec& ds, const Dist& d);

// ---------------------------------------------------------------------------
// Serialization
//
//   {"universe":["x","y"],
//    "entries":[{"store":[2,3],"weight":"1/16"}, ...]}
//
// Entries are sorted by store value tuple and weights are reduced fractions,
// so the byte output is canonical: equal distributions serialize identically.
// ---------------------------------------------------------------------------

nlohmann::ordered_json dist_to_json(const Dist& d);
std::string dist_to_json_string(const Dist& d);
Dist dist_from_json(const nlohmann::json& j);

}  // namespace probsem
