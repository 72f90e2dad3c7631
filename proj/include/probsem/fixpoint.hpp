#pragma once

#include <functional>
#include <list>
#include <string>
#include <unordered_map>
#include <utility>

#include <json.hpp>

#include "probsem/graph_analysis.hpp"
#include "probsem/report.hpp"
#include "probsem/store_dist.hpp"

namespace probsem {

struct EngineOptions {
  std::size_t memo_capacity = std::size_t{1} << 16;
  std::size_t path_guard = kDefaultPathGuard;
  // Consecutive iterations the pointwise change must stay within tol before
  // we report convergence; 0 means max(2, node_count). Plateaus shorter than
  // the window (mass still in flight around a cycle) are ridden out.
  unsigned long stable_window = 0;
};

// Pointwise sup |a(s) - b(s)| over all stores.
Weight sup_distance(const Dist& a, const Dist& b);

// Evaluates the distribution-transformer semantics of a validated graph by
// Kleene iteration of the defining functional. Query results are memoized per
// (k, node pair, input distribution) with LRU eviction.
class SemanticsEngine {
public:
  explicit SemanticsEngine(Pcfg g, EngineOptions opts = {});

  const Pcfg& graph() const { return graph_; }
  const GraphAnalysis& analysis() const { return analysis_; }
  const EngineOptions& options() const { return opts_; }

  // The k-th iterate of the transformer for the postdomination pair (v, w),
  // applied to d. k = 0 is the zero transformer. Requires (v, w) in PD and
  // mass(d) <= 1.
  Dist omega_k(unsigned long k, NodeId v, NodeId w, const Dist& d);

  // Iterates omega_k for k = 1, 2, ... until either the pointwise change
  // stays within tol for a full stabilization window, the result is certified
  // exact, or max_k is hit. on_iterate (if set) observes (k, mass(D_k)).
  std::pair<Dist, ConvergenceReport> omega(
      NodeId v, NodeId w, const Dist& d, const Weight& tol, unsigned long max_k,
      const std::function<void(unsigned long, const Weight&)>& on_iterate = {});

  // omega over the full graph, start to end.
  std::pair<Dist, ConvergenceReport> run(
      const Dist& d0, const Weight& tol, unsigned long max_k,
      const std::function<void(unsigned long, const Weight&)>& on_iterate = {});

  std::size_t memo_size() const { return memo_.size(); }
  bool graph_is_acyclic() const;  // no cycle-inducing node anywhere

private:
  Dist eval(unsigned long k, NodeId v, NodeId w, const Dist& d);
  Dist memoized(unsigned long k, NodeId v, NodeId w, const Dist& d);
  void check_pair(NodeId v, NodeId w) const;

  Pcfg graph_;
  GraphAnalysis analysis_;
  EngineOptions opts_;

  struct MemoEntry {
    Dist value;
    std::list<std::string>::iterator lru_pos;
  };
  std::unordered_map<std::string, MemoEntry> memo_;
  std::list<std::string> lru_;
};

}  // namespace probsem
