#pragma once

#include <functional>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "probsem/pcfg.hpp"

namespace probsem {

// Exhaustive simple-path search refuses graphs larger than this by default;
// the bound is configurable wherever it applies.
inline constexpr std::size_t kDefaultPathGuard = 64;

// The postdomination relation: holds(v, w) iff w lies on every path from v to
// the end node.
class PdRelation {
public:
  explicit PdRelation(std::vector<std::vector<bool>> rows) : rows_(std::move(rows)) {}

  bool holds(NodeId v, NodeId w) const {
    return rows_.at(static_cast<std::size_t>(v)).at(static_cast<std::size_t>(w));
  }
  std::vector<NodeId> of(NodeId v) const;         // all postdominators, ascending
  std::vector<NodeId> proper_of(NodeId v) const;  // excluding v itself
  std::size_t node_count() const { return rows_.size(); }

private:
  std::vector<std::vector<bool>> rows_;
};

// Computed by the standard backward round-robin fixed point
//   PD(end) = {end},  PD(v) = {v} ∪ ⋂_{w ∈ succ(v)} PD(w).
// The graph must be valid (in particular end reachable from every node).
PdRelation postdominators(const Pcfg& g);

// Length (in edges) of a longest acyclic path from v to w, for w a
// postdominator of v. Exhaustive DFS over simple paths; throws GraphError when
// the graph exceeds node_guard nodes or when w does not postdominate v.
unsigned lap(const Pcfg& g, const PdRelation& pd, NodeId v, NodeId w,
             std::size_t node_guard = kDefaultPathGuard);

// First proper postdominator: the unique proper postdominator at minimal
// longest-acyclic-path distance. Throws GraphError for the end node.
NodeId fppd(const Pcfg& g, const PdRelation& pd, NodeId v,
            std::size_t node_guard = kDefaultPathGuard);

// Occurrence order of two postdominators of v: true iff on every simple path
// from v to end, the first occurrence of w1 is no later than that of w2.
bool prec(const Pcfg& g, const PdRelation& pd, NodeId v, NodeId w1, NodeId w2);

// v is cycle-inducing iff some successor s of v has
// lap(s, fppd(v)) >= lap(v, fppd(v)). False for the end node.
bool cycle_inducing(const Pcfg& g, const PdRelation& pd, NodeId v,
                    std::size_t node_guard = kDefaultPathGuard);

// One-shot bundle of everything the fixed-point engine needs.
struct GraphAnalysis {
  PdRelation pd;
  std::vector<std::optional<NodeId>> first_pd;           // per node; empty for end
  std::map<std::pair<NodeId, NodeId>, unsigned> lap_table;  // all PD pairs
  std::vector<bool> cycle_inducing_set;

  static GraphAnalysis analyze(const Pcfg& g, std::size_t node_guard = kDefaultPathGuard);

  bool in_pd(NodeId v, NodeId w) const { return pd.holds(v, w); }
  unsigned lap_of(NodeId v, NodeId w) const;  // throws GraphError if (v,w) not in PD
};

// ---------------------------------------------------------------------------
// Path enumeration (analysis oracles and tests)
// ---------------------------------------------------------------------------

// Every simple path from -> to, as an inclusive node list. from == to yields
// the single trivial path {from}.
void for_each_simple_path(const Pcfg& g, NodeId from, NodeId to,
                          const std::function<void(const std::vector<NodeId>&)>& visit);

// Every walk from -> to with at most max_edges edges (cycles allowed).
void for_each_bounded_path(const Pcfg& g, NodeId from, NodeId to, std::size_t max_edges,
                           const std::function<void(const std::vector<NodeId>&)>& visit);

// All simple cycles, each reported once starting at its smallest node id.
std::vector<std::vector<NodeId>> simple_cycles(const Pcfg& g);

}  // namespace probsem
