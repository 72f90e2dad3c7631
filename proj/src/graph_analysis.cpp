#include "probsem/graph_analysis.hpp"

#include <algorithm>
#include <string>

namespace probsem {

std::vector<NodeId> PdRelation::of(NodeId v) const {
  std::vector<NodeId> out;
  const auto& row = rows_.at(static_cast<std::size_t>(v));
  for (std::size_t w = 0; w < row.size(); ++w)
    if (row[w]) out.push_back(static_cast<NodeId>(w));
  return out;
}

std::vector<NodeId> PdRelation::proper_of(NodeId v) const {
  auto out = of(v);
  out.erase(std::remove(out.begin(), out.end(), v), out.end());
  return out;
}

PdRelation postdominators(const Pcfg& g) {
  const std::size_t n = g.node_count();
  const auto end = static_cast<std::size_t>(g.end());
  std::vector<std::vector<bool>> pd(n, std::vector<bool>(n, true));
  pd[end] = std::vector<bool>(n, false);
  pd[end][end] = true;

  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t v = 0; v < n; ++v) {
      if (v == end) continue;
      std::vector<bool> next(n, true);
      const auto& succ = g.successors(static_cast<NodeId>(v));
      if (succ.empty()) next = std::vector<bool>(n, false);  // degenerate; validate() flags it
      for (NodeId w : succ) {
        const auto& pw = pd.at(static_cast<std::size_t>(w));
        for (std::size_t i = 0; i < n; ++i) next[i] = next[i] && pw[i];
      }
      next[v] = true;
      if (next != pd[v]) {
        pd[v] = std::move(next);
        changed = true;
      }
    }
  }
  return PdRelation(std::move(pd));
}

namespace {

void check_guard(const Pcfg& g, std::size_t node_guard) {
  if (g.node_count() > node_guard)
    throw GraphError("graph has " + std::to_string(g.node_count()) +
                     " nodes, exceeding the exhaustive path-search bound of " +
                     std::to_string(node_guard));
}

void simple_path_dfs(const Pcfg& g, NodeId u, NodeId to, std::vector<NodeId>& path,
                     std::vector<bool>& on_path,
                     const std::function<void(const std::vector<NodeId>&)>& visit) {
  if (u == to) {
    visit(path);
    return;
  }
  for (NodeId w : g.successors(u)) {
    if (!g.valid_id(w) || on_path[static_cast<std::size_t>(w)]) continue;
    on_path[static_cast<std::size_t>(w)] = true;
    path.push_back(w);
    simple_path_dfs(g, w, to, path, on_path, visit);
    path.pop_back();
    on_path[static_cast<std::size_t>(w)] = false;
  }
}

}  // namespace

void for_each_simple_path(const Pcfg& g, NodeId from, NodeId to,
                          const std::function<void(const std::vector<NodeId>&)>& visit) {
  std::vector<NodeId> path{from};
  std::vector<bool> on_path(g.node_count(), false);
  on_path.at(static_cast<std::size_t>(from)) = true;
  simple_path_dfs(g, from, to, path, on_path, visit);
}

namespace {

void bounded_path_dfs(const Pcfg& g, NodeId u, NodeId to, std::size_t budget,
                      std::vector<NodeId>& path,
                      const std::function<void(const std::vector<NodeId>&)>& visit) {
  if (u == to) visit(path);
  if (budget == 0) return;
  for (NodeId w : g.successors(u)) {
    if (!g.valid_id(w)) continue;
    path.push_back(w);
    bounded_path_dfs(g, w, to, budget - 1, path, visit);
    path.pop_back();
  }
}

}  // namespace

void for_each_bounded_path(const Pcfg& g, NodeId from, NodeId to, std::size_t max_edges,
                           const std::function<void(const std::vector<NodeId>&)>& visit) {
  std::vector<NodeId> path{from};
  bounded_path_dfs(g, from, to, max_edges, path, visit);
}

unsigned lap(const Pcfg& g, const PdRelation& pd, NodeId v, NodeId w, std::size_t node_guard) {
  if (!pd.holds(v, w))
    throw GraphError("lap(" + std::to_string(v) + "," + std::to_string(w) + "): node " +
                     std::to_string(w) + " does not postdominate node " + std::to_string(v));
  check_guard(g, node_guard);
  if (v == w) return 0;
  unsigned best = 0;
  bool found = false;
  for_each_simple_path(g, v, w, [&](const std::vector<NodeId>& path) {
    found = true;
    best = std::max(best, static_cast<unsigned>(path.size() - 1));
  });
  if (!found)
    throw GraphError("no path from " + std::to_string(v) + " to " + std::to_string(w));
  return best;
}

NodeId fppd(const Pcfg& g, const PdRelation& pd, NodeId v, std::size_t node_guard) {
  auto proper = pd.proper_of(v);
  if (proper.empty())
    throw GraphError("node " + std::to_string(v) + " has no proper postdominator");
  NodeId best = -1;
  unsigned best_lap = 0;
  bool tie = false;
  for (NodeId w : proper) {
    unsigned l = lap(g, pd, v, w, node_guard);
    if (best == -1 || l < best_lap) {
      best = w;
      best_lap = l;
      tie = false;
    } else if (l == best_lap) {
      tie = true;
    }
  }
  if (tie)
    throw GraphError("postdominators of node " + std::to_string(v) +
                     " are not totally ordered (tied path lengths)");
  return best;
}

bool prec(const Pcfg& g, const PdRelation& pd, NodeId v, NodeId w1, NodeId w2) {
  if (!pd.holds(v, w1) || !pd.holds(v, w2))
    throw GraphError("prec requires both nodes to postdominate " + std::to_string(v));
  bool ok = true;
  for_each_simple_path(g, v, g.end(), [&](const std::vector<NodeId>& path) {
    std::size_t i1 = path.size(), i2 = path.size();
    for (std::size_t i = 0; i < path.size(); ++i) {
      if (path[i] == w1 && i1 == path.size()) i1 = i;
      if (path[i] == w2 && i2 == path.size()) i2 = i;
    }
    if (i1 > i2) ok = false;
  });
  return ok;
}

bool cycle_inducing(const Pcfg& g, const PdRelation& pd, NodeId v, std::size_t node_guard) {
  if (v == g.end()) return false;
  NodeId w = fppd(g, pd, v, node_guard);
  unsigned base = lap(g, pd, v, w, node_guard);
  for (NodeId s : g.successors(v)) {
    if (s == w) continue;  // lap(w, w) = 0 < base
    if (lap(g, pd, s, w, node_guard) >= base) return true;
  }
  return false;
}

GraphAnalysis GraphAnalysis::analyze(const Pcfg& g, std::size_t node_guard) {
  GraphAnalysis a{postdominators(g), {}, {}, {}};
  const auto n = static_cast<NodeId>(g.node_count());
  a.first_pd.resize(g.node_count());
  a.cycle_inducing_set.assign(g.node_count(), false);
  for (NodeId v = 0; v < n; ++v) {
    for (NodeId w : a.pd.of(v))
      a.lap_table.emplace(std::make_pair(v, w), lap(g, a.pd, v, w, node_guard));
    if (v != g.end()) a.first_pd[static_cast<std::size_t>(v)] = fppd(g, a.pd, v, node_guard);
  }
  for (NodeId v = 0; v < n; ++v)
    a.cycle_inducing_set[static_cast<std::size_t>(v)] = cycle_inducing(g, a.pd, v, node_guard);
  return a;
}

unsigned GraphAnalysis::lap_of(NodeId v, NodeId w) const {
  auto it = lap_table.find({v, w});
  if (it == lap_table.end())
    throw GraphError("lap undefined: node " + std::to_string(w) + " does not postdominate node " +
                     std::to_string(v));
  return it->second;
}

std::vector<std::vector<NodeId>> simple_cycles(const Pcfg& g) {
  std::vector<std::vector<NodeId>> out;
  const auto n = static_cast<NodeId>(g.node_count());
  for (NodeId m = 0; m < n; ++m) {
    // Cycles whose smallest node is m: simple paths through nodes > m only.
    std::vector<NodeId> path{m};
    std::vector<bool> on_path(g.node_count(), false);
    std::function<void(NodeId)> dfs = [&](NodeId u) {
      for (NodeId w : g.successors(u)) {
        if (!g.valid_id(w)) continue;
        if (w == m) {
          out.push_back(path);
        } else if (w > m && !on_path[static_cast<std::size_t>(w)]) {
          on_path[static_cast<std::size_t>(w)] = true;
          path.push_back(w);
          dfs(w);
          path.pop_back();
          on_path[static_cast<std::size_t>(w)] = false;
        }
      }
    };
    dfs(m);
  }
  return out;
}

}  // namespace probsem
