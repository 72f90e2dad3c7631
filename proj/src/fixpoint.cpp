#include "probsem/fixpoint.hpp"

#include <algorithm>

namespace probsem {

nlohmann::ordered_json report_to_json(const ConvergenceReport& r) {
  nlohmann::ordered_json j;
  j["iterations_used"] = r.iterations_used;
  j["converged"] = r.converged;
  j["exact"] = r.exact;
  j["budget_exhausted"] = r.budget_exhausted;
  j["sup_delta"] = r.sup_delta.str();
  j["mass_delta"] = r.mass_delta.str();
  return j;
}

Weight sup_distance(const Dist& a, const Dist& b) {
  Weight best;
  for (const auto& [values, w] : a.entries()) best = std::max(best, Weight::abs_diff(w, b.at(values)));
  for (const auto& [values, w] : b.entries()) best = std::max(best, Weight::abs_diff(w, a.at(values)));
  return best;
}

SemanticsEngine::SemanticsEngine(Pcfg g, EngineOptions opts)
    : graph_(std::move(g)), analysis_(GraphAnalysis::analyze(graph_, opts.path_guard)), opts_(opts) {
  require_valid(graph_);
}

bool SemanticsEngine::graph_is_acyclic() const {
  return std::none_of(analysis_.cycle_inducing_set.begin(), analysis_.cycle_inducing_set.end(),
                      [](bool b) { return b; });
}

void SemanticsEngine::check_pair(NodeId v, NodeId w) const {
  if (!graph_.valid_id(v) || !graph_.valid_id(w))
    throw GraphError("node id out of range");
  if (!analysis_.pd.holds(v, w))
    throw GraphError("node " + std::to_string(w) + " does not postdominate node " +
                     std::to_string(v) + "; the transformer is undefined for this pair");
}

Dist SemanticsEngine::omega_k(unsigned long k, NodeId v, NodeId w, const Dist& d) {
  check_pair(v, w);
  if (!same_universe(d.universe(), graph_.universe()))
    throw std::invalid_argument("distribution universe does not match graph universe");
  if (mass(d) > Weight::one())
    throw std::invalid_argument("input distribution has mass greater than 1");
  // Warm lower levels first: keeps the recursion depth bounded by the graph
  // rather than by k, and they are what level k is built from anyway.
  Dist out(graph_.universe());
  for (unsigned long j = k == 0 ? 0 : 1; j <= k; ++j) out = memoized(j, v, w, d);
  return out;
}

Dist SemanticsEngine::memoized(unsigned long k, NodeId v, NodeId w, const Dist& d) {
  if (k == 0 || d.is_zero()) return Dist(graph_.universe());

  std::string key = std::to_string(k) + '|' + std::to_string(v) + '|' + std::to_string(w) + '#' +
                    d.canonical_key();
  if (auto it = memo_.find(key); it != memo_.end()) {
    lru_.splice(lru_.begin(), lru_, it->second.lru_pos);
    return it->second.value;
  }

  Dist result = eval(k, v, w, d);

  lru_.push_front(key);
  memo_.emplace(std::move(key), MemoEntry{result, lru_.begin()});
  while (memo_.size() > opts_.memo_capacity) {
    memo_.erase(lru_.back());
    lru_.pop_back();
  }
  return result;
}

// One clause application of the defining functional, with structural
// recursion along decreasing longest-acyclic-path distance at the same level
// k and references to level k-1 exactly at cycle-inducing successors.
Dist SemanticsEngine::eval(unsigned long k, NodeId v, NodeId w, const Dist& d) {
  if (v == w) return d;

  NodeId mid = *analysis_.first_pd.at(static_cast<std::size_t>(v));
  if (mid != w) return memoized(k, mid, w, memoized(k, v, mid, d));

  const NodeLabel& l = graph_.label(v);
  switch (l.kind) {
    case LabelKind::Skip:
      return d;
    case LabelKind::Assign:
      return apply_assign(l.var, *l.expr, d);
    case LabelKind::RAssign:
      return apply_rassign(l.var, *l.dist, d);
    case LabelKind::Observe:
      return select(*l.cond, d);
    case LabelKind::Branch: {
      const auto& succ = graph_.successors(v);
      const unsigned base = analysis_.lap_of(v, w);
      Dist out(graph_.universe());
      for (std::size_t i = 0; i < 2; ++i) {
        Dist di = i == 0 ? select(*l.cond, d) : select(*make_not(l.cond), d);
        if (di.is_zero()) continue;
        NodeId si = succ.at(i);
        if (analysis_.lap_of(si, w) < base) {
          out = add(out, memoized(k, si, w, di));
        } else {
          out = add(out, memoized(k - 1, si, w, di));
        }
      }
      return out;
    }
    case LabelKind::Return:
    case LabelKind::Unlabeled:
      // Only the end node carries these labels, and v == w covered it.
      throw GraphError("transformer reached the end label without matching the target");
  }
  throw GraphError("corrupt node label");
}

std::pair<Dist, ConvergenceReport> SemanticsEngine::omega(
    NodeId v, NodeId w, const Dist& d, const Weight& tol, unsigned long max_k,
    const std::function<void(unsigned long, const Weight&)>& on_iterate) {
  check_pair(v, w);
  if (tol.is_zero()) throw std::invalid_argument("tolerance must be positive");
  if (mass(d) > Weight::one())
    throw std::invalid_argument("input distribution has mass greater than 1");

  const Weight input_mass = mass(d);
  const unsigned long window =
      opts_.stable_window ? opts_.stable_window
                          : std::max<unsigned long>(2, graph_.node_count());
  const bool acyclic = graph_is_acyclic();

  ConvergenceReport report;
  Dist prev(graph_.universe());  // D_0 = 0
  Dist cur = prev;
  unsigned long stable = 0;

  for (unsigned long k = 1; k <= max_k; ++k) {
    // Levels build on each other, so the sequential loop keeps the memoized
    // recursion shallow.
    cur = memoized(k, v, w, d);
    Weight cur_mass = mass(cur);
    report.iterations_used = k;
    report.sup_delta = sup_distance(cur, prev);
    report.mass_delta = cur_mass - mass(prev);
    if (on_iterate) on_iterate(k, cur_mass);

    // Exactness certificates: an acyclic graph is fixed from k = 1 on; and a
    // monotone chain that already carries the full input mass cannot grow.
    if (acyclic || cur_mass == input_mass) {
      report.converged = true;
      report.exact = true;
      return {cur, report};
    }
    stable = report.sup_delta <= tol ? stable + 1 : 0;
    if (stable >= window) {
      report.converged = true;
      return {cur, report};
    }
    prev = cur;
  }
  report.budget_exhausted = true;
  return {cur, report};
}

std::pair<Dist, ConvergenceReport> SemanticsEngine::run(
    const Dist& d0, const Weight& tol, unsigned long max_k,
    const std::function<void(unsigned long, const Weight&)>& on_iterate) {
  return omega(graph_.start(), graph_.end(), d0, tol, max_k, on_iterate);
}

}  // namespace probsem
