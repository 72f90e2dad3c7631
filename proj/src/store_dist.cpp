#include "probsem/store_dist.hpp"

#include <stdexcept>

namespace probsem {

Dist Dist::point(const Store& s, Weight w) {
  Dist d(s.universe());
  d.add_mass(s, w);
  return d;
}

void Dist::add_mass(const Store& s, const Weight& w) {
  if (!same_universe(s.universe(), universe_))
    throw std::invalid_argument("store universe does not match distribution universe");
  add_mass(s.values(), w);
}

void Dist::add_mass(std::vector<Int> values, const Weight& w) {
  if (values.size() != universe_->size())
    throw std::invalid_argument("store arity does not match distribution universe");
  if (w.is_zero()) return;
  auto [it, inserted] = entries_.try_emplace(std::move(values), w);
  if (!inserted) {
    it->second += w;
    if (it->second.is_zero()) entries_.erase(it);
  }
}

Weight Dist::at(const Store& s) const {
  if (!same_universe(s.universe(), universe_))
    throw std::invalid_argument("store universe does not match distribution universe");
  return at(s.values());
}

Weight Dist::at(const std::vector<Int>& values) const {
  auto it = entries_.find(values);
  return it == entries_.end() ? Weight() : it->second;
}

std::string Dist::str() const {
  std::string out = "{";
  bool first = true;
  for (const auto& [values, w] : entries_) {
    if (!first) out += ", ";
    first = false;
    out += Store(universe_, values).str() + " -> " + w.str();
  }
  return out + "}";
}

std::string Dist::canonical_key() const {
  std::string out;
  for (const auto& n : universe_->names()) {
    out += n;
    out += ',';
  }
  out += '|';
  for (const auto& [values, w] : entries_) {
    for (const auto& v : values) {
      out += v.get_str();
      out += ',';
    }
    out += ':';
    out += w.str();
    out += ';';
  }
  return out;
}

Weight mass(const Dist& d) {
  Weight total;
  for (const auto& [values, w] : d.entries()) total += w;
  return total;
}

Dist add(const Dist& a, const Dist& b) {
  if (!same_universe(a.universe(), b.universe()))
    throw std::invalid_argument("adding distributions over different universes");
  Dist out = a;
  for (const auto& [values, w] : b.entries()) out.add_mass(values, w);
  return out;
}

Dist scale(const Weight& c, const Dist& d) {
  Dist out(d.universe());
  if (c.is_zero()) return out;
  for (const auto& [values, w] : d.entries()) out.add_mass(values, c * w);
  return out;
}

Concentration is_concentrated(const Dist& d) {
  Concentration r;
  if (d.support_size() > 1) return r;
  r.concentrated = true;
  if (d.support_size() == 1) r.witness = Store(d.universe(), d.entries().begin()->first);
  return r;
}

Dist select(const BoolExpr& b, const Dist& d) {
  Dist out(d.universe());
  for (const auto& [values, w] : d.entries()) {
    if (eval_bool(b, Store(d.universe(), values))) out.add_mass(values, w);
  }
  return out;
}

Dist apply_assign(std::size_t var, const Expr& e, const Dist& d) {
  Dist out(d.universe());
  for (const auto& [values, w] : d.entries()) {
    Store s(d.universe(), values);
    out.add_mass(s.with(var, eval_expr(e, s)), w);
  }
  return out;
}

Dist apply_rassign(std::size_t var, const DistSpec& ds, const Dist& d) {
  Dist out(d.universe());
  for (const auto& [values, w] : d.entries()) {
    Store s(d.universe(), values);
    for (const auto& [value, p] : ds.entries()) out.add_mass(s.with(var, value), p * w);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace {

nlohmann::ordered_json int_to_json(const Int& v) {
  if (v.fits_slong_p()) return nlohmann::ordered_json(v.get_si());
  return nlohmann::ordered_json(v.get_str());
}

Int int_from_json(const nlohmann::json& j) {
  if (j.is_number_integer()) return Int(static_cast<long>(j.get<long long>()));
  // Base 10 explicitly: GMP's default base 0 would read leading zeros as octal.
  if (j.is_string()) return Int(j.get<std::string>(), 10);
  throw std::invalid_argument("store value must be an integer or an integer string");
}

}  // namespace

nlohmann::ordered_json dist_to_json(const Dist& d) {
  nlohmann::ordered_json j;
  j["universe"] = d.universe()->names();
  auto entries = nlohmann::ordered_json::array();
  for (const auto& [values, w] : d.entries()) {
    nlohmann::ordered_json e;
    auto store = nlohmann::ordered_json::array();
    for (const auto& v : values) store.push_back(int_to_json(v));
    e["store"] = std::move(store);
    e["weight"] = w.str();
    entries.push_back(std::move(e));
  }
  j["entries"] = std::move(entries);
  return j;
}

std::string dist_to_json_string(const Dist& d) { return dist_to_json(d).dump(); }

Dist dist_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("universe") || !j.contains("entries"))
    throw std::invalid_argument("distribution JSON needs 'universe' and 'entries'");
  auto universe = Universe::of(j.at("universe").get<std::vector<std::string>>());
  Dist d(universe);
  for (const auto& e : j.at("entries")) {
    const auto& store = e.at("store");
    if (!store.is_array() || store.size() != universe->size())
      throw std::invalid_argument("store tuple arity does not match universe");
    std::vector<Int> values;
    values.reserve(store.size());
    for (const auto& v : store) values.push_back(int_from_json(v));
    Weight w = Weight::parse(e.at("weight").get<std::string>());
    if (!d.at(values).is_zero())
      throw std::invalid_argument("duplicate store tuple in distribution JSON");
    d.add_mass(std::move(values), w);
  }
  return d;
}

}  // namespace probsem
