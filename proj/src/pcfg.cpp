#include "probsem/pcfg.hpp"

#include <algorithm>
#include <deque>

namespace probsem {

NodeLabel NodeLabel::assign(const UniversePtr& u, const std::string& var, ExprPtr e) {
  auto idx = u->index_of(var);
  if (!idx) throw std::invalid_argument("unknown variable: " + var);
  return {LabelKind::Assign, *idx, var, std::move(e), nullptr, nullptr};
}

NodeLabel NodeLabel::rassign(const UniversePtr& u, const std::string& var, DistSpecPtr d) {
  auto idx = u->index_of(var);
  if (!idx) throw std::invalid_argument("unknown variable: " + var);
  return {LabelKind::RAssign, *idx, var, nullptr, std::move(d), nullptr};
}

bool label_equal(const NodeLabel& a, const NodeLabel& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case LabelKind::Skip:
    case LabelKind::Unlabeled: return true;
    case LabelKind::Assign: return a.var == b.var && expr_equal(*a.expr, *b.expr);
    case LabelKind::RAssign: return a.var == b.var && *a.dist == *b.dist;
    case LabelKind::Observe:
    case LabelKind::Branch: return bool_equal(*a.cond, *b.cond);
    case LabelKind::Return: return expr_equal(*a.expr, *b.expr);
  }
  return false;
}

std::string label_kind_name(LabelKind k) {
  switch (k) {
    case LabelKind::Skip: return "skip";
    case LabelKind::Assign: return "assign";
    case LabelKind::RAssign: return "rassign";
    case LabelKind::Observe: return "observe";
    case LabelKind::Branch: return "branch";
    case LabelKind::Return: return "return";
    case LabelKind::Unlabeled: return "unlabeled";
  }
  return "?";
}

std::string label_to_string(const NodeLabel& l) {
  switch (l.kind) {
    case LabelKind::Skip: return "skip";
    case LabelKind::Assign: return l.var_name + " := " + expr_to_string(*l.expr);
    case LabelKind::RAssign: return l.var_name + " ~ " + distspec_to_string(*l.dist);
    case LabelKind::Observe: return "observe(" + bool_to_string(*l.cond) + ")";
    case LabelKind::Branch: return "branch " + bool_to_string(*l.cond);
    case LabelKind::Return: return "return " + expr_to_string(*l.expr);
    case LabelKind::Unlabeled: return "unlabeled";
  }
  return "?";
}

std::size_t Pcfg::as_index(NodeId v) const {
  if (!valid_id(v)) throw GraphError("node id out of range: " + std::to_string(v));
  return static_cast<std::size_t>(v);
}

NodeId Pcfg::add_node(NodeLabel label) {
  nodes_.push_back(Node{std::move(label), {}});
  return static_cast<NodeId>(nodes_.size() - 1);
}

void Pcfg::set_succ(NodeId v, NodeId to) { nodes_.at(as_index(v)).succ = {to}; }

void Pcfg::set_branch_succ(NodeId v, NodeId on_true, NodeId on_false) {
  nodes_.at(as_index(v)).succ = {on_true, on_false};
}

void Pcfg::set_successors(NodeId v, std::vector<NodeId> succ) {
  nodes_.at(as_index(v)).succ = std::move(succ);
}

void Pcfg::set_label(NodeId v, NodeLabel label) { nodes_.at(as_index(v)).label = std::move(label); }

void Pcfg::set_start(NodeId v) { start_ = static_cast<NodeId>(as_index(v)); }

void Pcfg::set_end(NodeId v) { end_ = static_cast<NodeId>(as_index(v)); }

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

std::vector<Violation> validate(const Pcfg& g) {
  std::vector<Violation> out;
  auto flag = [&](std::string code, NodeId node, std::string message) {
    out.push_back(Violation{std::move(code), node, std::move(message)});
  };

  const int n = static_cast<int>(g.node_count());
  if (n == 0) {
    flag("empty-graph", -1, "graph has no nodes");
    return out;
  }

  for (NodeId v = 0; v < n; ++v) {
    const auto& succ = g.successors(v);
    const auto kind = g.label(v).kind;
    const bool is_end = v == g.end();

    for (NodeId w : succ)
      if (!g.valid_id(w))
        flag("dangling-edge", v, "node " + std::to_string(v) + " points at missing node " +
                                     std::to_string(w));

    if (is_end) {
      if (!succ.empty())
        flag("end-has-successor", v, "end node " + std::to_string(v) + " has outgoing edges");
      if (kind != LabelKind::Return && kind != LabelKind::Unlabeled)
        flag("end-label", v, "end node must be labeled return or left unlabeled, got " +
                                 label_kind_name(kind));
      continue;
    }

    switch (kind) {
      case LabelKind::Branch:
        if (succ.size() != 2)
          flag("branch-degree", v, "branch node " + std::to_string(v) + " has " +
                                       std::to_string(succ.size()) + " successors, expected 2");
        break;
      case LabelKind::Skip:
      case LabelKind::Assign:
      case LabelKind::RAssign:
      case LabelKind::Observe:
        if (succ.size() != 1)
          flag("out-degree", v, label_kind_name(kind) + " node " + std::to_string(v) + " has " +
                                    std::to_string(succ.size()) + " successors, expected 1");
        break;
      case LabelKind::Return:
      case LabelKind::Unlabeled:
        flag("interior-label", v, "only the end node may be labeled " + label_kind_name(kind) +
                                      " (node " + std::to_string(v) + ")");
        break;
    }
  }

  // Reachability from start.
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  std::deque<NodeId> work{g.start()};
  seen[static_cast<std::size_t>(g.start())] = true;
  while (!work.empty()) {
    NodeId v = work.front();
    work.pop_front();
    for (NodeId w : g.successors(v)) {
      if (g.valid_id(w) && !seen[static_cast<std::size_t>(w)]) {
        seen[static_cast<std::size_t>(w)] = true;
        work.push_back(w);
      }
    }
  }
  for (NodeId v = 0; v < n; ++v)
    if (!seen[static_cast<std::size_t>(v)])
      flag("unreachable", v, "node " + std::to_string(v) + " is unreachable from start");

  // End must be reachable from every node (co-reachability over reversed edges).
  std::vector<bool> coseen(static_cast<std::size_t>(n), false);
  std::vector<std::vector<NodeId>> preds(static_cast<std::size_t>(n));
  for (NodeId v = 0; v < n; ++v)
    for (NodeId w : g.successors(v))
      if (g.valid_id(w)) preds[static_cast<std::size_t>(w)].push_back(v);
  work.push_back(g.end());
  coseen[static_cast<std::size_t>(g.end())] = true;
  while (!work.empty()) {
    NodeId v = work.front();
    work.pop_front();
    for (NodeId p : preds[static_cast<std::size_t>(v)]) {
      if (!coseen[static_cast<std::size_t>(p)]) {
        coseen[static_cast<std::size_t>(p)] = true;
        work.push_back(p);
      }
    }
  }
  for (NodeId v = 0; v < n; ++v)
    if (!coseen[static_cast<std::size_t>(v)])
      flag("end-unreachable", v, "end is unreachable from node " + std::to_string(v));

  return out;
}

void require_valid(const Pcfg& g) {
  auto violations = validate(g);
  if (violations.empty()) return;
  std::string msg = "invalid graph:";
  for (const auto& v : violations) msg += "\n  [" + v.code + "] " + v.message;
  throw GraphError(msg);
}

bool is_deterministic(const Pcfg& g) {
  for (NodeId v = 0; v < static_cast<NodeId>(g.node_count()); ++v) {
    auto k = g.label(v).kind;
    if (k == LabelKind::Observe || k == LabelKind::RAssign) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

namespace {

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

std::string to_dot(const Pcfg& g) {
  std::string out = "digraph pcfg {\n";
  for (NodeId v = 0; v < static_cast<NodeId>(g.node_count()); ++v) {
    const auto& l = g.label(v);
    std::string shape = l.kind == LabelKind::Branch ? "diamond" : "box";
    if (v == g.end()) shape = "oval";
    out += "  " + std::to_string(v) + " [label=\"" + std::to_string(v) + ": " +
           dot_escape(label_to_string(l)) + "\", shape=" + shape;
    if (v == g.start()) out += ", peripheries=2";
    out += "];\n";
  }
  for (NodeId v = 0; v < static_cast<NodeId>(g.node_count()); ++v) {
    const auto& succ = g.successors(v);
    const bool branch = g.label(v).kind == LabelKind::Branch && succ.size() == 2;
    for (std::size_t i = 0; i < succ.size(); ++i) {
      out += "  " + std::to_string(v) + " -> " + std::to_string(succ[i]);
      if (branch) out += std::string(" [label=\"") + (i == 0 ? "T" : "F") + "\"]";
      out += ";\n";
    }
  }
  return out + "}\n";
}

// ---------------------------------------------------------------------------
// Transformations
// ---------------------------------------------------------------------------

Pcfg compress_skips(const Pcfg& g) {
  const int n = static_cast<int>(g.node_count());
  auto removable = [&](NodeId v) {
    return g.label(v).kind == LabelKind::Skip && v != g.start() && v != g.end() &&
           g.successors(v).size() == 1;
  };

  // Where does an edge into v land once skip chains are contracted?
  std::vector<NodeId> target(static_cast<std::size_t>(n), -1);
  auto resolve = [&](NodeId v) {
    std::vector<NodeId> chain;
    std::vector<bool> on_chain(static_cast<std::size_t>(n), false);
    NodeId cur = v;
    while (target[static_cast<std::size_t>(cur)] == -1 && removable(cur) &&
           !on_chain[static_cast<std::size_t>(cur)]) {
      on_chain[static_cast<std::size_t>(cur)] = true;
      chain.push_back(cur);
      cur = g.successors(cur)[0];
    }
    NodeId dest = target[static_cast<std::size_t>(cur)] != -1
                      ? target[static_cast<std::size_t>(cur)]
                      : cur;  // non-removable node, or a skip cycle breaker
    for (NodeId c : chain) target[static_cast<std::size_t>(c)] = dest;
    return dest;
  };
  for (NodeId v = 0; v < n; ++v)
    if (target[static_cast<std::size_t>(v)] == -1) resolve(v);
  for (NodeId v = 0; v < n; ++v)
    if (target[static_cast<std::size_t>(v)] == -1) target[static_cast<std::size_t>(v)] = v;

  std::vector<NodeId> new_id(static_cast<std::size_t>(n), -1);
  Pcfg out(g.universe());
  for (NodeId v = 0; v < n; ++v) {
    if (removable(v)) continue;
    new_id[static_cast<std::size_t>(v)] = out.add_node(g.label(v));
  }
  auto mapped = [&](NodeId v) { return new_id[static_cast<std::size_t>(target[static_cast<std::size_t>(v)])]; };
  for (NodeId v = 0; v < n; ++v) {
    if (removable(v)) continue;
    const auto& succ = g.successors(v);
    std::vector<NodeId> mapped_succ;
    mapped_succ.reserve(succ.size());
    for (NodeId w : succ) mapped_succ.push_back(mapped(w));
    out.set_successors(new_id[static_cast<std::size_t>(v)], std::move(mapped_succ));
  }
  out.set_start(new_id[static_cast<std::size_t>(g.start())]);
  out.set_end(new_id[static_cast<std::size_t>(g.end())]);
  return out;
}

Pcfg canonical_form(const Pcfg& g) {
  const int n = static_cast<int>(g.node_count());
  std::vector<NodeId> order;
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  std::deque<NodeId> work{g.start()};
  seen[static_cast<std::size_t>(g.start())] = true;
  while (!work.empty()) {
    NodeId v = work.front();
    work.pop_front();
    order.push_back(v);
    for (NodeId w : g.successors(v)) {
      if (g.valid_id(w) && !seen[static_cast<std::size_t>(w)]) {
        seen[static_cast<std::size_t>(w)] = true;
        work.push_back(w);
      }
    }
  }
  for (NodeId v = 0; v < n; ++v)
    if (!seen[static_cast<std::size_t>(v)]) order.push_back(v);

  std::vector<NodeId> new_id(static_cast<std::size_t>(n), -1);
  for (std::size_t i = 0; i < order.size(); ++i)
    new_id[static_cast<std::size_t>(order[i])] = static_cast<NodeId>(i);

  Pcfg out(g.universe());
  for (NodeId v : order) out.add_node(g.label(v));
  for (NodeId v : order) {
    std::vector<NodeId> succ;
    succ.reserve(g.successors(v).size());
    for (NodeId w : g.successors(v)) succ.push_back(new_id.at(static_cast<std::size_t>(w)));
    out.set_successors(new_id[static_cast<std::size_t>(v)], std::move(succ));
  }
  out.set_start(new_id[static_cast<std::size_t>(g.start())]);
  out.set_end(new_id[static_cast<std::size_t>(g.end())]);
  return out;
}

bool same_shape(const Pcfg& a, const Pcfg& b) {
  if (!same_universe(a.universe(), b.universe())) return false;
  if (a.node_count() != b.node_count() || a.start() != b.start() || a.end() != b.end())
    return false;
  for (NodeId v = 0; v < static_cast<NodeId>(a.node_count()); ++v) {
    if (!label_equal(a.label(v), b.label(v))) return false;
    if (a.successors(v) != b.successors(v)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

nlohmann::ordered_json pcfg_to_json(const Pcfg& g) {
  nlohmann::ordered_json j;
  j["universe"] = g.universe()->names();
  j["start"] = g.start();
  j["end"] = g.end();
  auto nodes = nlohmann::ordered_json::array();
  for (NodeId v = 0; v < static_cast<NodeId>(g.node_count()); ++v) {
    const auto& l = g.label(v);
    nlohmann::ordered_json label;
    label["kind"] = label_kind_name(l.kind);
    switch (l.kind) {
      case LabelKind::Assign:
        label["var"] = l.var_name;
        label["expr"] = expr_to_string(*l.expr);
        break;
      case LabelKind::RAssign:
        label["var"] = l.var_name;
        label["dist"] = distspec_to_string(*l.dist);
        break;
      case LabelKind::Observe:
      case LabelKind::Branch:
        label["cond"] = bool_to_string(*l.cond);
        break;
      case LabelKind::Return:
        label["expr"] = expr_to_string(*l.expr);
        break;
      default:
        break;
    }
    nlohmann::ordered_json node;
    node["id"] = v;
    node["label"] = std::move(label);
    node["succ"] = g.successors(v);
    nodes.push_back(std::move(node));
  }
  j["nodes"] = std::move(nodes);
  return j;
}

std::string pcfg_to_json_string(const Pcfg& g) { return pcfg_to_json(g).dump(); }

Pcfg pcfg_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("universe") || !j.contains("nodes") || !j.contains("start") ||
      !j.contains("end"))
    throw std::invalid_argument("graph JSON needs 'universe', 'start', 'end' and 'nodes'");
  auto universe = Universe::of(j.at("universe").get<std::vector<std::string>>());
  const auto& nodes = j.at("nodes");
  const int n = static_cast<int>(nodes.size());

  Pcfg g(universe);
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  std::vector<NodeLabel> labels(static_cast<std::size_t>(n));
  std::vector<std::vector<NodeId>> succs(static_cast<std::size_t>(n));

  for (const auto& node : nodes) {
    NodeId id = node.at("id").get<NodeId>();
    if (id < 0 || id >= n)
      throw std::invalid_argument("node ids must be dense 0.." + std::to_string(n - 1) +
                                  ", got " + std::to_string(id));
    if (seen[static_cast<std::size_t>(id)])
      throw std::invalid_argument("duplicate node id " + std::to_string(id));
    seen[static_cast<std::size_t>(id)] = true;

    const auto& label = node.at("label");
    std::string kind = label.at("kind").get<std::string>();
    NodeLabel l;
    if (kind == "skip") {
      l = NodeLabel::skip();
    } else if (kind == "assign") {
      l = NodeLabel::assign(universe, label.at("var").get<std::string>(),
                            parse_expr_text(label.at("expr").get<std::string>(), universe));
    } else if (kind == "rassign") {
      l = NodeLabel::rassign(universe, label.at("var").get<std::string>(),
                             parse_distspec_text(label.at("dist").get<std::string>()));
    } else if (kind == "observe") {
      l = NodeLabel::observe(parse_bool_text(label.at("cond").get<std::string>(), universe));
    } else if (kind == "branch") {
      l = NodeLabel::branch(parse_bool_text(label.at("cond").get<std::string>(), universe));
    } else if (kind == "return") {
      l = NodeLabel::ret(parse_expr_text(label.at("expr").get<std::string>(), universe));
    } else if (kind == "unlabeled") {
      l = NodeLabel::unlabeled();
    } else {
      throw std::invalid_argument("unknown label kind '" + kind + "'");
    }
    labels[static_cast<std::size_t>(id)] = std::move(l);
    succs[static_cast<std::size_t>(id)] = node.at("succ").get<std::vector<NodeId>>();
  }
  for (int i = 0; i < n; ++i)
    if (!seen[static_cast<std::size_t>(i)])
      throw std::invalid_argument("missing node id " + std::to_string(i));

  for (int i = 0; i < n; ++i) g.add_node(std::move(labels[static_cast<std::size_t>(i)]));
  for (int i = 0; i < n; ++i) g.set_successors(i, std::move(succs[static_cast<std::size_t>(i)]));
  g.set_start(j.at("start").get<NodeId>());
  g.set_end(j.at("end").get<NodeId>());
  return g;
}

}  // namespace probsem
