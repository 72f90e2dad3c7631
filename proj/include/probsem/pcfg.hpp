#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "probsem/syntax.hpp"

namespace probsem {

struct GraphError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class LabelKind { Skip, Assign, RAssign, Observe, Branch, Return, Unlabeled };

// Node payload. Which fields are meaningful depends on kind:
//   Assign: var/var_name/expr   RAssign: var/var_name/dist
//   Observe, Branch: cond       Return: expr
struct NodeLabel {
  LabelKind kind = LabelKind::Unlabeled;
  std::size_t var = 0;
  std::string var_name;
  ExprPtr expr;
  DistSpecPtr dist;
  BoolExprPtr cond;

  static NodeLabel skip() { return {LabelKind::Skip, 0, {}, nullptr, nullptr, nullptr}; }
  static NodeLabel assign(const UniversePtr& u, const std::string& var, ExprPtr e);
  static NodeLabel rassign(const UniversePtr& u, const std::string& var, DistSpecPtr d);
  static NodeLabel observe(BoolExprPtr b) {
    return {LabelKind::Observe, 0, {}, nullptr, nullptr, std::move(b)};
  }
  static NodeLabel branch(BoolExprPtr b) {
    return {LabelKind::Branch, 0, {}, nullptr, nullptr, std::move(b)};
  }
  static NodeLabel ret(ExprPtr e) {
    return {LabelKind::Return, 0, {}, std::move(e), nullptr, nullptr};
  }
  static NodeLabel unlabeled() { return {}; }
};

bool label_equal(const NodeLabel& a, const NodeLabel& b);
std::string label_to_string(const NodeLabel& l);
std::string label_kind_name(LabelKind k);

using NodeId = int;

// Probabilistic control-flow graph. Branch nodes carry an ordered successor
// pair (true then false); every other interior node has exactly one
// successor; the unique end node has none.
class Pcfg {
public:
  explicit Pcfg(UniversePtr u) : universe_(std::move(u)) {}

  NodeId add_node(NodeLabel label);
  void set_succ(NodeId v, NodeId to);
  void set_branch_succ(NodeId v, NodeId on_true, NodeId on_false);
  // Raw successor list; no degree or range checks, validate() reports those.
  void set_successors(NodeId v, std::vector<NodeId> succ);
  void set_label(NodeId v, NodeLabel label);
  void set_start(NodeId v);
  void set_end(NodeId v);

  const UniversePtr& universe() const { return universe_; }
  std::size_t node_count() const { return nodes_.size(); }
  bool valid_id(NodeId v) const {
    return v >= 0 && static_cast<std::size_t>(v) < nodes_.size();
  }
  const NodeLabel& label(NodeId v) const { return nodes_.at(as_index(v)).label; }
  const std::vector<NodeId>& successors(NodeId v) const { return nodes_.at(as_index(v)).succ; }
  NodeId start() const { return start_; }
  NodeId end() const { return end_; }

private:
  struct Node {
    NodeLabel label;
    std::vector<NodeId> succ;
  };
  std::size_t as_index(NodeId v) const;

  UniversePtr universe_;
  std::vector<Node> nodes_;
  NodeId start_ = 0;
  NodeId end_ = 0;
};

struct Violation {
  std::string code;  // stable identifier, e.g. "end-has-successor"
  NodeId node;       // offending node, or -1 for graph-level issues
  std::string message;
};

// Structural well-formedness: label/out-degree agreement, reachability from
// start, reachability of end, end labeled Return or Unlabeled.
std::vector<Violation> validate(const Pcfg& g);

// Throws GraphError with all violation messages when validate() is nonempty.
void require_valid(const Pcfg& g);

// No Observe and no RAssign nodes.
bool is_deterministic(const Pcfg& g);

// Graphviz rendering; node ids and labels, T/F edge marks on branches.
std::string to_dot(const Pcfg& g);

// Contracts away interior Skip nodes (start and end are kept). The result
// transforms distributions exactly like the input.
Pcfg compress_skips(const Pcfg& g);

// Renumbers nodes in BFS order from start (branch: true successor first), so
// isomorphic graphs become identical.
Pcfg canonical_form(const Pcfg& g);

// Literal structural equality: same universe, labels, edges, start and end.
bool same_shape(const Pcfg& a, const Pcfg& b);

// ---------------------------------------------------------------------------
// Serialization: expressions and conditions are stored as source text.
// ---------------------------------------------------------------------------

nlohmann::ordered_json pcfg_to_json(const Pcfg& g);
std::string pcfg_to_json_string(const Pcfg& g);
Pcfg pcfg_from_json(const nlohmann::json& j);

}  // namespace probsem
