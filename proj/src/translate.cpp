#include "probsem/translate.hpp"

namespace probsem {

namespace {

struct Frag {
  NodeId start;
  NodeId end;
};

Frag tr(const Stmt& s, Pcfg& g, const UniversePtr& u) {
  if (std::holds_alternative<Stmt::Skip>(s.node)) {
    NodeId v = g.add_node(NodeLabel::skip());
    NodeId e = g.add_node(NodeLabel::unlabeled());
    g.set_succ(v, e);
    return {v, e};
  }
  if (const auto* a = std::get_if<Stmt::Assign>(&s.node)) {
    NodeId v = g.add_node(NodeLabel::assign(u, a->var_name, a->expr));
    NodeId e = g.add_node(NodeLabel::unlabeled());
    g.set_succ(v, e);
    return {v, e};
  }
  if (const auto* r = std::get_if<Stmt::RAssign>(&s.node)) {
    NodeId v = g.add_node(NodeLabel::rassign(u, r->var_name, r->dist));
    NodeId e = g.add_node(NodeLabel::unlabeled());
    g.set_succ(v, e);
    return {v, e};
  }
  if (const auto* o = std::get_if<Stmt::Observe>(&s.node)) {
    NodeId v = g.add_node(NodeLabel::observe(o->cond));
    NodeId e = g.add_node(NodeLabel::unlabeled());
    g.set_succ(v, e);
    return {v, e};
  }
  if (const auto* q = std::get_if<Stmt::Seq>(&s.node)) {
    Frag f1 = tr(*q->first, g, u);
    Frag f2 = tr(*q->second, g, u);
    g.set_label(f1.end, NodeLabel::skip());
    g.set_succ(f1.end, f2.start);
    return {f1.start, f2.end};
  }
  if (const auto* i = std::get_if<Stmt::If>(&s.node)) {
    NodeId v = g.add_node(NodeLabel::branch(i->cond));
    Frag ft = tr(*i->then_branch, g, u);
    Frag fe = tr(*i->else_branch, g, u);
    NodeId e = g.add_node(NodeLabel::unlabeled());
    g.set_branch_succ(v, ft.start, fe.start);
    g.set_label(ft.end, NodeLabel::skip());
    g.set_succ(ft.end, e);
    g.set_label(fe.end, NodeLabel::skip());
    g.set_succ(fe.end, e);
    return {v, e};
  }
  const auto& w = std::get<Stmt::While>(s.node);
  NodeId e = g.add_node(NodeLabel::unlabeled());
  NodeId v = g.add_node(NodeLabel::branch(w.cond));
  Frag fb = tr(*w.body, g, u);
  g.set_branch_succ(v, fb.start, e);
  g.set_label(fb.end, NodeLabel::skip());
  g.set_succ(fb.end, v);
  return {v, e};
}

}  // namespace

Pcfg translate_stmt(const StmtPtr& s, const UniversePtr& u) {
  Pcfg g(u);
  Frag f = tr(*s, g, u);
  g.set_start(f.start);
  g.set_end(f.end);
  require_valid(g);
  return g;
}

Pcfg translate_program(const Program& p) {
  Pcfg g(p.universe);
  Frag f = tr(*p.body, g, p.universe);
  g.set_label(f.end, NodeLabel::ret(p.return_expr));
  g.set_start(f.start);
  g.set_end(f.end);
  require_valid(g);
  return g;
}

}  // namespace probsem
