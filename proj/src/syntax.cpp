#include "probsem/syntax.hpp"

#include <algorithm>
#include <cctype>
#include <map>

namespace probsem {

// ---------------------------------------------------------------------------
// AST constructors
// ---------------------------------------------------------------------------

ExprPtr make_const(Int v) { return std::make_shared<const Expr>(Expr{Expr::Const{std::move(v)}}); }

ExprPtr make_var(const UniversePtr& u, const std::string& name) {
  auto idx = u->index_of(name);
  if (!idx) throw std::invalid_argument("unknown variable: " + name);
  return std::make_shared<const Expr>(Expr{Expr::Var{*idx, name}});
}

ExprPtr make_bin(ArithOp op, ExprPtr lhs, ExprPtr rhs) {
  return std::make_shared<const Expr>(Expr{Expr::Bin{op, std::move(lhs), std::move(rhs)}});
}

BoolExprPtr make_bool_lit(bool v) {
  return std::make_shared<const BoolExpr>(BoolExpr{BoolExpr::Lit{v}});
}
BoolExprPtr make_cmp(CmpOp op, ExprPtr lhs, ExprPtr rhs) {
  return std::make_shared<const BoolExpr>(BoolExpr{BoolExpr::Cmp{op, std::move(lhs), std::move(rhs)}});
}
BoolExprPtr make_and(BoolExprPtr a, BoolExprPtr b) {
  return std::make_shared<const BoolExpr>(BoolExpr{BoolExpr::And{std::move(a), std::move(b)}});
}
BoolExprPtr make_or(BoolExprPtr a, BoolExprPtr b) {
  return std::make_shared<const BoolExpr>(BoolExpr{BoolExpr::Or{std::move(a), std::move(b)}});
}
BoolExprPtr make_not(BoolExprPtr a) {
  return std::make_shared<const BoolExpr>(BoolExpr{BoolExpr::Not{std::move(a)}});
}

StmtPtr make_skip() { return std::make_shared<const Stmt>(Stmt{Stmt::Skip{}}); }

StmtPtr make_assign(const UniversePtr& u, const std::string& var, ExprPtr e) {
  auto idx = u->index_of(var);
  if (!idx) throw std::invalid_argument("unknown variable: " + var);
  return std::make_shared<const Stmt>(Stmt{Stmt::Assign{*idx, var, std::move(e)}});
}

StmtPtr make_rassign(const UniversePtr& u, const std::string& var, DistSpecPtr d) {
  auto idx = u->index_of(var);
  if (!idx) throw std::invalid_argument("unknown variable: " + var);
  return std::make_shared<const Stmt>(Stmt{Stmt::RAssign{*idx, var, std::move(d)}});
}

StmtPtr make_observe(BoolExprPtr b) {
  return std::make_shared<const Stmt>(Stmt{Stmt::Observe{std::move(b)}});
}
StmtPtr make_seq(StmtPtr a, StmtPtr b) {
  return std::make_shared<const Stmt>(Stmt{Stmt::Seq{std::move(a), std::move(b)}});
}
StmtPtr make_if(BoolExprPtr b, StmtPtr t, StmtPtr e) {
  return std::make_shared<const Stmt>(Stmt{Stmt::If{std::move(b), std::move(t), std::move(e)}});
}
StmtPtr make_while(BoolExprPtr b, StmtPtr body) {
  return std::make_shared<const Stmt>(Stmt{Stmt::While{std::move(b), std::move(body)}});
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

Int eval_expr(const Expr& e, const Store& s) {
  struct V {
    const Store& s;
    Int operator()(const Expr::Const& c) const { return c.value; }
    Int operator()(const Expr::Var& v) const { return s.value(v.index); }
    Int operator()(const Expr::Bin& b) const {
      Int l = eval_expr(*b.lhs, s);
      Int r = eval_expr(*b.rhs, s);
      switch (b.op) {
        case ArithOp::Add: return l + r;
        case ArithOp::Sub: return l - r;
        case ArithOp::Mul: return l * r;
        case ArithOp::Div:
          if (r == 0) throw EvalError("division by zero in '" + expr_to_string(*b.rhs) + "'");
          return l / r;  // truncation toward zero
      }
      throw EvalError("corrupt expression node");
    }
  };
  return std::visit(V{s}, e.node);
}

bool eval_bool(const BoolExpr& b, const Store& s) {
  struct V {
    const Store& s;
    bool operator()(const BoolExpr::Lit& l) const { return l.value; }
    bool operator()(const BoolExpr::Cmp& c) const {
      int r = cmp(eval_expr(*c.lhs, s), eval_expr(*c.rhs, s));
      switch (c.op) {
        case CmpOp::Lt: return r < 0;
        case CmpOp::Le: return r <= 0;
        case CmpOp::Eq: return r == 0;
        case CmpOp::Ne: return r != 0;
        case CmpOp::Ge: return r >= 0;
        case CmpOp::Gt: return r > 0;
      }
      throw EvalError("corrupt comparison node");
    }
    bool operator()(const BoolExpr::And& a) const {
      return eval_bool(*a.lhs, s) && eval_bool(*a.rhs, s);
    }
    bool operator()(const BoolExpr::Or& o) const {
      return eval_bool(*o.lhs, s) || eval_bool(*o.rhs, s);
    }
    bool operator()(const BoolExpr::Not& n) const { return !eval_bool(*n.arg, s); }
  };
  return std::visit(V{s}, b.node);
}

// ---------------------------------------------------------------------------
// Structural equality
// ---------------------------------------------------------------------------

bool expr_equal(const Expr& a, const Expr& b) {
  if (a.node.index() != b.node.index()) return false;
  if (const auto* c = std::get_if<Expr::Const>(&a.node))
    return c->value == std::get<Expr::Const>(b.node).value;
  if (const auto* v = std::get_if<Expr::Var>(&a.node))
    return v->index == std::get<Expr::Var>(b.node).index;
  const auto& x = std::get<Expr::Bin>(a.node);
  const auto& y = std::get<Expr::Bin>(b.node);
  return x.op == y.op && expr_equal(*x.lhs, *y.lhs) && expr_equal(*x.rhs, *y.rhs);
}

bool bool_equal(const BoolExpr& a, const BoolExpr& b) {
  if (a.node.index() != b.node.index()) return false;
  if (const auto* l = std::get_if<BoolExpr::Lit>(&a.node))
    return l->value == std::get<BoolExpr::Lit>(b.node).value;
  if (const auto* c = std::get_if<BoolExpr::Cmp>(&a.node)) {
    const auto& d = std::get<BoolExpr::Cmp>(b.node);
    return c->op == d.op && expr_equal(*c->lhs, *d.lhs) && expr_equal(*c->rhs, *d.rhs);
  }
  if (const auto* x = std::get_if<BoolExpr::And>(&a.node)) {
    const auto& y = std::get<BoolExpr::And>(b.node);
    return bool_equal(*x->lhs, *y.lhs) && bool_equal(*x->rhs, *y.rhs);
  }
  if (const auto* x = std::get_if<BoolExpr::Or>(&a.node)) {
    const auto& y = std::get<BoolExpr::Or>(b.node);
    return bool_equal(*x->lhs, *y.lhs) && bool_equal(*x->rhs, *y.rhs);
  }
  return bool_equal(*std::get<BoolExpr::Not>(a.node).arg, *std::get<BoolExpr::Not>(b.node).arg);
}

namespace {

void flatten_seq(const Stmt& s, std::vector<const Stmt*>& out) {
  if (const auto* q = std::get_if<Stmt::Seq>(&s.node)) {
    flatten_seq(*q->first, out);
    flatten_seq(*q->second, out);
  } else {
    out.push_back(&s);
  }
}

}  // namespace

bool stmt_equal(const Stmt& a, const Stmt& b) {
  // Sequencing compares as a flattened chain; the association is not
  // observable in concrete syntax.
  if (std::holds_alternative<Stmt::Seq>(a.node) || std::holds_alternative<Stmt::Seq>(b.node)) {
    std::vector<const Stmt*> xs, ys;
    flatten_seq(a, xs);
    flatten_seq(b, ys);
    if (xs.size() != ys.size()) return false;
    for (std::size_t i = 0; i < xs.size(); ++i)
      if (!stmt_equal(*xs[i], *ys[i])) return false;
    return true;
  }
  if (a.node.index() != b.node.index()) return false;
  if (std::holds_alternative<Stmt::Skip>(a.node)) return true;
  if (const auto* x = std::get_if<Stmt::Assign>(&a.node)) {
    const auto& y = std::get<Stmt::Assign>(b.node);
    return x->var == y.var && expr_equal(*x->expr, *y.expr);
  }
  if (const auto* x = std::get_if<Stmt::RAssign>(&a.node)) {
    const auto& y = std::get<Stmt::RAssign>(b.node);
    return x->var == y.var && *x->dist == *y.dist;
  }
  if (const auto* x = std::get_if<Stmt::Observe>(&a.node))
    return bool_equal(*x->cond, *std::get<Stmt::Observe>(b.node).cond);
  if (const auto* x = std::get_if<Stmt::If>(&a.node)) {
    const auto& y = std::get<Stmt::If>(b.node);
    return bool_equal(*x->cond, *y.cond) && stmt_equal(*x->then_branch, *y.then_branch) &&
           stmt_equal(*x->else_branch, *y.else_branch);
  }
  const auto& x = std::get<Stmt::While>(a.node);
  const auto& y = std::get<Stmt::While>(b.node);
  return bool_equal(*x.cond, *y.cond) && stmt_equal(*x.body, *y.body);
}

bool program_equal(const Program& a, const Program& b) {
  return same_universe(a.universe, b.universe) && stmt_equal(*a.body, *b.body) &&
         expr_equal(*a.return_expr, *b.return_expr);
}

// ---------------------------------------------------------------------------
// Variable collection
// ---------------------------------------------------------------------------

void collect_vars(const Expr& e, std::vector<bool>& used) {
  if (const auto* v = std::get_if<Expr::Var>(&e.node)) {
    used.at(v->index) = true;
  } else if (const auto* b = std::get_if<Expr::Bin>(&e.node)) {
    collect_vars(*b->lhs, used);
    collect_vars(*b->rhs, used);
  }
}

void collect_vars(const BoolExpr& b, std::vector<bool>& used) {
  if (const auto* c = std::get_if<BoolExpr::Cmp>(&b.node)) {
    collect_vars(*c->lhs, used);
    collect_vars(*c->rhs, used);
  } else if (const auto* x = std::get_if<BoolExpr::And>(&b.node)) {
    collect_vars(*x->lhs, used);
    collect_vars(*x->rhs, used);
  } else if (const auto* x = std::get_if<BoolExpr::Or>(&b.node)) {
    collect_vars(*x->lhs, used);
    collect_vars(*x->rhs, used);
  } else if (const auto* n = std::get_if<BoolExpr::Not>(&b.node)) {
    collect_vars(*n->arg, used);
  }
}

// ---------------------------------------------------------------------------
// DistSpec
// ---------------------------------------------------------------------------

DistSpec::DistSpec(std::vector<std::pair<Int, Weight>> entries) : entries_(std::move(entries)) {
  if (entries_.empty()) throw std::invalid_argument("distribution literal has no entries");
  std::sort(entries_.begin(), entries_.end(),
            [](const auto& a, const auto& b) { return cmp(a.first, b.first) < 0; });
  Weight total;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (i > 0 && entries_[i].first == entries_[i - 1].first)
      throw std::invalid_argument("duplicate value in distribution literal: " +
                                  entries_[i].first.get_str());
    if (entries_[i].second.is_zero())
      throw std::invalid_argument("zero weight in distribution literal for value " +
                                  entries_[i].first.get_str());
    total += entries_[i].second;
  }
  if (total != Weight::one())
    throw std::invalid_argument("distribution weights sum to " + total.str() + ", expected 1");
}

Weight DistSpec::weight_of(const Int& v) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), v, [](const auto& e, const Int& x) {
    return cmp(e.first, x) < 0;
  });
  if (it != entries_.end() && it->first == v) return it->second;
  return Weight();
}

std::string distspec_to_string(const DistSpec& d) {
  std::string out = "{";
  bool first = true;
  for (const auto& [v, w] : d.entries()) {
    if (!first) out += ", ";
    first = false;
    out += v.get_str() + ":" + w.str();
  }
  return out + "}";
}

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

namespace {

int arith_prec(ArithOp op) {
  return (op == ArithOp::Add || op == ArithOp::Sub) ? 1 : 2;
}

const char* arith_sym(ArithOp op) {
  switch (op) {
    case ArithOp::Add: return "+";
    case ArithOp::Sub: return "-";
    case ArithOp::Mul: return "*";
    case ArithOp::Div: return "/";
  }
  return "?";
}

const char* cmp_sym(CmpOp op) {
  switch (op) {
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Eq: return "==";
    case CmpOp::Ne: return "!=";
    case CmpOp::Ge: return ">=";
    case CmpOp::Gt: return ">";
  }
  return "?";
}

// parent_prec/right_child drive minimal parenthesization that still
// reproduces the tree shape exactly on re-parse (binary ops parse
// left-associatively).
std::string expr_str(const Expr& e, int parent_prec, bool right_child) {
  if (const auto* c = std::get_if<Expr::Const>(&e.node)) return c->value.get_str();
  if (const auto* v = std::get_if<Expr::Var>(&e.node)) return v->name;
  const auto& b = std::get<Expr::Bin>(e.node);
  int p = arith_prec(b.op);
  std::string s = expr_str(*b.lhs, p, false) + " " + arith_sym(b.op) + " " +
                  expr_str(*b.rhs, p, true);
  if (p < parent_prec || (p == parent_prec && right_child)) return "(" + s + ")";
  return s;
}

// Bool precedence: or=1, and=2, not=3, atoms=4.
int bool_prec(const BoolExpr& b) {
  if (std::holds_alternative<BoolExpr::Or>(b.node)) return 1;
  if (std::holds_alternative<BoolExpr::And>(b.node)) return 2;
  if (std::holds_alternative<BoolExpr::Not>(b.node)) return 3;
  return 4;
}

std::string bool_str(const BoolExpr& b, int parent_prec, bool right_child) {
  std::string s;
  int p = bool_prec(b);
  if (const auto* l = std::get_if<BoolExpr::Lit>(&b.node)) {
    return l->value ? "true" : "false";
  } else if (const auto* c = std::get_if<BoolExpr::Cmp>(&b.node)) {
    return expr_str(*c->lhs, 0, false) + " " + cmp_sym(c->op) + " " + expr_str(*c->rhs, 0, false);
  } else if (const auto* x = std::get_if<BoolExpr::And>(&b.node)) {
    s = bool_str(*x->lhs, p, false) + " && " + bool_str(*x->rhs, p, true);
  } else if (const auto* x = std::get_if<BoolExpr::Or>(&b.node)) {
    s = bool_str(*x->lhs, p, false) + " || " + bool_str(*x->rhs, p, true);
  } else {
    const auto& n = std::get<BoolExpr::Not>(b.node);
    // A bare comparison under '!' would re-parse as !(lhs op rhs) anyway,
    // but parentheses keep the intent readable.
    int ap = bool_prec(*n.arg);
    std::string inner = bool_str(*n.arg, 0, false);
    s = "!" + (ap >= 3 ? inner : "(" + inner + ")");
    if (ap == 4 && std::holds_alternative<BoolExpr::Cmp>(n.arg->node)) s = "!(" + inner + ")";
    return p < parent_prec ? "(" + s + ")" : s;
  }
  if (p < parent_prec || (p == parent_prec && right_child)) return "(" + s + ")";
  return s;
}

}  // namespace

std::string expr_to_string(const Expr& e) { return expr_str(e, 0, false); }
std::string bool_to_string(const BoolExpr& b) { return bool_str(b, 0, false); }

std::string stmt_to_string(const Stmt& s, int indent) {
  std::string pad(static_cast<std::size_t>(indent), ' ');
  struct V {
    const std::string& pad;
    int indent;
    std::string operator()(const Stmt::Skip&) const { return pad + "skip"; }
    std::string operator()(const Stmt::Assign& a) const {
      return pad + a.var_name + " := " + expr_to_string(*a.expr);
    }
    std::string operator()(const Stmt::RAssign& r) const {
      return pad + r.var_name + " ~ " + distspec_to_string(*r.dist);
    }
    std::string operator()(const Stmt::Observe& o) const {
      return pad + "observe(" + bool_to_string(*o.cond) + ")";
    }
    std::string operator()(const Stmt::Seq& q) const {
      return stmt_to_string(*q.first, indent) + ";\n" + stmt_to_string(*q.second, indent);
    }
    std::string operator()(const Stmt::If& i) const {
      return pad + "if " + bool_to_string(*i.cond) + " {\n" +
             stmt_to_string(*i.then_branch, indent + 2) + "\n" + pad + "} else {\n" +
             stmt_to_string(*i.else_branch, indent + 2) + "\n" + pad + "}";
    }
    std::string operator()(const Stmt::While& w) const {
      return pad + "while " + bool_to_string(*w.cond) + " {\n" +
             stmt_to_string(*w.body, indent + 2) + "\n" + pad + "}";
    }
  };
  return std::visit(V{pad, indent}, s.node);
}

std::string pretty_print(const Program& p) {
  std::string out = "var";
  for (const auto& n : p.universe->names()) out += " " + n;
  out += ";\n";
  out += stmt_to_string(*p.body, 0);
  out += ";\nreturn " + expr_to_string(*p.return_expr);
  return out;
}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

namespace {

enum class Tok {
  Ident, Integer,
  KwVar, KwSkip, KwObserve, KwIf, KwElse, KwWhile, KwReturn, KwTrue, KwFalse,
  Assign, Tilde, Colon, Comma, Semi, LParen, RParen, LBrace, RBrace,
  Plus, Minus, Star, Slash,
  Lt, Le, Gt, Ge, Eq, Ne, AndAnd, OrOr, Bang,
  Eof,
};

struct Token {
  Tok kind;
  std::string text;
  Int int_value;
  int line = 1;
  int col = 1;
};

std::vector<Token> lex(const std::string& src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto push = [&](Tok k, std::string text, int l, int c) {
    out.push_back(Token{k, std::move(text), Int(0), l, c});
  };
  while (i < src.size()) {
    char c = src[i];
    if (c == '\n') {
      ++line;
      col = 1;
      ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++col;
      ++i;
      continue;
    }
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') ++i;
      continue;
    }
    int tl = line, tc = col;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string word;
      while (i < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '_')) {
        word += src[i++];
        ++col;
      }
      static const std::map<std::string, Tok> keywords = {
          {"var", Tok::KwVar},     {"skip", Tok::KwSkip},   {"observe", Tok::KwObserve},
          {"if", Tok::KwIf},       {"else", Tok::KwElse},   {"while", Tok::KwWhile},
          {"return", Tok::KwReturn}, {"true", Tok::KwTrue}, {"false", Tok::KwFalse},
          {"and", Tok::AndAnd},    {"or", Tok::OrOr},       {"not", Tok::Bang},
      };
      auto it = keywords.find(word);
      push(it != keywords.end() ? it->second : Tok::Ident, word, tl, tc);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::string digits;
      while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) {
        digits += src[i++];
        ++col;
      }
      // Base 10 explicitly: GMP's default base 0 would read "010" as octal.
      Token t{Tok::Integer, digits, Int(digits, 10), tl, tc};
      out.push_back(std::move(t));
      continue;
    }
    auto two = [&](char a, char b) {
      return c == a && i + 1 < src.size() && src[i + 1] == b;
    };
    if (two(':', '=')) { push(Tok::Assign, ":=", tl, tc); i += 2; col += 2; continue; }
    if (two('<', '=')) { push(Tok::Le, "<=", tl, tc); i += 2; col += 2; continue; }
    if (two('>', '=')) { push(Tok::Ge, ">=", tl, tc); i += 2; col += 2; continue; }
    if (two('=', '=')) { push(Tok::Eq, "==", tl, tc); i += 2; col += 2; continue; }
    if (two('!', '=')) { push(Tok::Ne, "!=", tl, tc); i += 2; col += 2; continue; }
    if (two('&', '&')) { push(Tok::AndAnd, "&&", tl, tc); i += 2; col += 2; continue; }
    if (two('|', '|')) { push(Tok::OrOr, "||", tl, tc); i += 2; col += 2; continue; }
    Tok k;
    switch (c) {
      case '~': k = Tok::Tilde; break;
      case ':': k = Tok::Colon; break;
      case ',': k = Tok::Comma; break;
      case ';': k = Tok::Semi; break;
      case '(': k = Tok::LParen; break;
      case ')': k = Tok::RParen; break;
      case '{': k = Tok::LBrace; break;
      case '}': k = Tok::RBrace; break;
      case '+': k = Tok::Plus; break;
      case '-': k = Tok::Minus; break;
      case '*': k = Tok::Star; break;
      case '/': k = Tok::Slash; break;
      case '<': k = Tok::Lt; break;
      case '>': k = Tok::Gt; break;
      case '=': k = Tok::Eq; break;
      case '!': k = Tok::Bang; break;
      default:
        throw ParseError(tl, tc, std::string("unexpected character '") + c + "'");
    }
    push(k, std::string(1, c), tl, tc);
    ++i;
    ++col;
  }
  out.push_back(Token{Tok::Eof, "", Int(0), line, col});
  return out;
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

class Parser {
public:
  Parser(std::vector<Token> tokens, UniversePtr universe)
      : toks_(std::move(tokens)), universe_(std::move(universe)) {}

  static Program program(const std::string& text) {
    Parser p(lex(text), nullptr);
    return p.parse_program_toks();
  }

  ExprPtr expr_all() {
    ExprPtr e = parse_expr();
    expect(Tok::Eof, "end of input");
    return e;
  }
  BoolExprPtr bool_all() {
    BoolExprPtr b = parse_bor();
    expect(Tok::Eof, "end of input");
    return b;
  }
  DistSpecPtr distspec_all() {
    DistSpecPtr d = parse_distspec();
    expect(Tok::Eof, "end of input");
    return d;
  }

private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  UniversePtr universe_;

  const Token& cur() const { return toks_[pos_]; }
  const Token& peek(std::size_t n = 1) const {
    return toks_[std::min(pos_ + n, toks_.size() - 1)];
  }
  Token advance() { return toks_[pos_++]; }
  bool at(Tok k) const { return cur().kind == k; }
  bool accept(Tok k) {
    if (!at(k)) return false;
    ++pos_;
    return true;
  }
  Token expect(Tok k, const std::string& what) {
    if (!at(k))
      throw ParseError(cur().line, cur().col,
                       "expected " + what + ", found '" +
                           (cur().kind == Tok::Eof ? "end of input" : cur().text) + "'");
    return advance();
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(cur().line, cur().col, msg);
  }

  Program parse_program_toks() {
    expect(Tok::KwVar, "'var'");
    std::vector<std::string> names;
    while (at(Tok::Ident)) names.push_back(advance().text);
    if (names.empty()) fail("expected at least one variable name after 'var'");
    expect(Tok::Semi, "';' after variable declarations");
    try {
      universe_ = Universe::of(names);
    } catch (const std::invalid_argument& e) {
      fail(e.what());
    }
    StmtPtr body = parse_stmt();
    expect(Tok::Semi, "';' before 'return'");
    expect(Tok::KwReturn, "'return'");
    ExprPtr ret = parse_expr();
    expect(Tok::Eof, "end of input after return expression");
    return Program{universe_, body, ret};
  }

  static bool starts_stmt(Tok k) {
    return k == Tok::Ident || k == Tok::KwSkip || k == Tok::KwObserve || k == Tok::KwIf ||
           k == Tok::KwWhile;
  }

  StmtPtr parse_stmt() {
    StmtPtr first = parse_simple_stmt();
    // A ';' continues the sequence only when a statement follows; otherwise it
    // belongs to the enclosing production (the one before 'return').
    if (at(Tok::Semi) && starts_stmt(peek().kind)) {
      advance();
      return make_seq(std::move(first), parse_stmt());
    }
    return first;
  }

  StmtPtr parse_simple_stmt() {
    if (accept(Tok::KwSkip)) return make_skip();
    if (accept(Tok::KwObserve)) {
      expect(Tok::LParen, "'(' after 'observe'");
      BoolExprPtr b = parse_bor();
      expect(Tok::RParen, "')' after observe condition");
      return make_observe(std::move(b));
    }
    if (accept(Tok::KwIf)) {
      BoolExprPtr b = parse_bor();
      StmtPtr t = parse_block();
      expect(Tok::KwElse, "'else'");
      StmtPtr e = parse_block();
      return make_if(std::move(b), std::move(t), std::move(e));
    }
    if (accept(Tok::KwWhile)) {
      BoolExprPtr b = parse_bor();
      StmtPtr body = parse_block();
      return make_while(std::move(b), std::move(body));
    }
    if (at(Tok::Ident)) {
      Token name = advance();
      if (accept(Tok::Assign)) {
        ExprPtr e = parse_expr();
        return checked(name, [&](const UniversePtr& u) { return make_assign(u, name.text, e); });
      }
      if (accept(Tok::Tilde)) {
        DistSpecPtr d = parse_distspec();
        return checked(name, [&](const UniversePtr& u) { return make_rassign(u, name.text, d); });
      }
      throw ParseError(name.line, name.col, "expected ':=' or '~' after '" + name.text + "'");
    }
    fail("expected a statement");
  }

  template <typename F>
  StmtPtr checked(const Token& name, F f) {
    try {
      return f(universe_);
    } catch (const std::invalid_argument& e) {
      throw ParseError(name.line, name.col, e.what());
    }
  }

  StmtPtr parse_block() {
    expect(Tok::LBrace, "'{'");
    StmtPtr s = parse_stmt();
    expect(Tok::RBrace, "'}'");
    return s;
  }

  DistSpecPtr parse_distspec() {
    Token open = expect(Tok::LBrace, "'{' opening a distribution literal");
    std::vector<std::pair<Int, Weight>> entries;
    do {
      Int value = parse_signed_int();
      expect(Tok::Colon, "':' between value and weight");
      entries.emplace_back(std::move(value), parse_weight());
    } while (accept(Tok::Comma));
    expect(Tok::RBrace, "'}' closing a distribution literal");
    try {
      return std::make_shared<const DistSpec>(std::move(entries));
    } catch (const std::invalid_argument& e) {
      throw ParseError(open.line, open.col, e.what());
    }
  }

  Int parse_signed_int() {
    bool neg = accept(Tok::Minus);
    Token t = expect(Tok::Integer, "an integer");
    return neg ? Int(-t.int_value) : t.int_value;
  }

  Weight parse_weight() {
    Token t = cur();
    Int num = parse_signed_int();
    Int den = 1;
    if (accept(Tok::Slash)) den = parse_signed_int();
    try {
      return Weight(num, den);
    } catch (const std::exception& e) {
      throw ParseError(t.line, t.col, e.what());
    }
  }

  // expr := term (('+'|'-') term)*, left-associative
  ExprPtr parse_expr() {
    ExprPtr e = parse_term();
    while (at(Tok::Plus) || at(Tok::Minus)) {
      ArithOp op = advance().kind == Tok::Plus ? ArithOp::Add : ArithOp::Sub;
      e = make_bin(op, std::move(e), parse_term());
    }
    return e;
  }

  ExprPtr parse_term() {
    ExprPtr e = parse_factor();
    while (at(Tok::Star) || at(Tok::Slash)) {
      ArithOp op = advance().kind == Tok::Star ? ArithOp::Mul : ArithOp::Div;
      e = make_bin(op, std::move(e), parse_factor());
    }
    return e;
  }

  ExprPtr parse_factor() {
    if (at(Tok::Integer)) return make_const(advance().int_value);
    if (accept(Tok::Minus)) {
      ExprPtr f = parse_factor();
      if (const auto* c = std::get_if<Expr::Const>(&f->node)) return make_const(Int(-c->value));
      return make_bin(ArithOp::Sub, make_const(Int(0)), std::move(f));
    }
    if (at(Tok::Ident)) {
      Token name = advance();
      if (!universe_) throw ParseError(name.line, name.col, "variable outside a program");
      auto idx = universe_->index_of(name.text);
      if (!idx)
        throw ParseError(name.line, name.col, "undeclared variable '" + name.text + "'");
      return std::make_shared<const Expr>(Expr{Expr::Var{*idx, name.text}});
    }
    if (accept(Tok::LParen)) {
      ExprPtr e = parse_expr();
      expect(Tok::RParen, "')'");
      return e;
    }
    fail("expected an arithmetic expression");
  }

  // bexp := bor; bor := band ('||' band)*; band := bnot ('&&' bnot)*
  BoolExprPtr parse_bor() {
    BoolExprPtr b = parse_band();
    while (accept(Tok::OrOr)) b = make_or(std::move(b), parse_band());
    return b;
  }

  BoolExprPtr parse_band() {
    BoolExprPtr b = parse_bnot();
    while (accept(Tok::AndAnd)) b = make_and(std::move(b), parse_bnot());
    return b;
  }

  BoolExprPtr parse_bnot() {
    if (accept(Tok::Bang)) return make_not(parse_bnot());
    return parse_batom();
  }

  BoolExprPtr parse_batom() {
    if (accept(Tok::KwTrue)) return make_bool_lit(true);
    if (accept(Tok::KwFalse)) return make_bool_lit(false);
    // Either a comparison or a parenthesized boolean; '(' is ambiguous, so
    // try the comparison and backtrack.
    std::size_t save = pos_;
    try {
      ExprPtr lhs = parse_expr();
      CmpOp op = parse_cmpop();
      return make_cmp(op, std::move(lhs), parse_expr());
    } catch (const ParseError&) {
      pos_ = save;
    }
    expect(Tok::LParen, "a comparison, 'true', 'false', '!' or '('");
    BoolExprPtr b = parse_bor();
    expect(Tok::RParen, "')'");
    return b;
  }

  CmpOp parse_cmpop() {
    switch (cur().kind) {
      case Tok::Lt: advance(); return CmpOp::Lt;
      case Tok::Le: advance(); return CmpOp::Le;
      case Tok::Gt: advance(); return CmpOp::Gt;
      case Tok::Ge: advance(); return CmpOp::Ge;
      case Tok::Eq: advance(); return CmpOp::Eq;
      case Tok::Ne: advance(); return CmpOp::Ne;
      default: fail("expected a comparison operator");
    }
  }
};

}  // namespace

Program parse_program(const std::string& text) { return Parser::program(text); }

ExprPtr parse_expr_text(const std::string& text, const UniversePtr& u) {
  Parser p(lex(text), u);
  return p.expr_all();
}

BoolExprPtr parse_bool_text(const std::string& text, const UniversePtr& u) {
  Parser p(lex(text), u);
  return p.bool_all();
}

DistSpecPtr parse_distspec_text(const std::string& text) {
  Parser p(lex(text), nullptr);
  return p.distspec_all();
}

// ---------------------------------------------------------------------------
// Lint
// ---------------------------------------------------------------------------

namespace {

void lint_check(const std::vector<bool>& used, const std::vector<bool>& assigned,
                const UniversePtr& u, std::vector<bool>& reported,
                std::vector<std::string>& out) {
  for (std::size_t i = 0; i < used.size(); ++i) {
    if (used[i] && !assigned[i] && !reported[i]) {
      reported[i] = true;
      out.push_back("variable '" + u->name(i) +
                    "' may be read before it is assigned (it starts at 0)");
    }
  }
}

void lint_reads(const Expr& e, const std::vector<bool>& assigned, const UniversePtr& u,
                std::vector<bool>& reported, std::vector<std::string>& out) {
  std::vector<bool> used(u->size(), false);
  collect_vars(e, used);
  lint_check(used, assigned, u, reported, out);
}

void lint_reads(const BoolExpr& b, const std::vector<bool>& assigned, const UniversePtr& u,
                std::vector<bool>& reported, std::vector<std::string>& out) {
  std::vector<bool> used(u->size(), false);
  collect_vars(b, used);
  lint_check(used, assigned, u, reported, out);
}

// Returns the set of variables definitely assigned after s.
std::vector<bool> lint_stmt(const Stmt& s, std::vector<bool> assigned, const UniversePtr& u,
                            std::vector<bool>& reported, std::vector<std::string>& out) {
  if (std::holds_alternative<Stmt::Skip>(s.node)) return assigned;
  if (const auto* a = std::get_if<Stmt::Assign>(&s.node)) {
    lint_reads(*a->expr, assigned, u, reported, out);
    assigned[a->var] = true;
    return assigned;
  }
  if (const auto* r = std::get_if<Stmt::RAssign>(&s.node)) {
    assigned[r->var] = true;
    return assigned;
  }
  if (const auto* o = std::get_if<Stmt::Observe>(&s.node)) {
    lint_reads(*o->cond, assigned, u, reported, out);
    return assigned;
  }
  if (const auto* q = std::get_if<Stmt::Seq>(&s.node)) {
    auto mid = lint_stmt(*q->first, std::move(assigned), u, reported, out);
    return lint_stmt(*q->second, std::move(mid), u, reported, out);
  }
  if (const auto* i = std::get_if<Stmt::If>(&s.node)) {
    lint_reads(*i->cond, assigned, u, reported, out);
    auto t = lint_stmt(*i->then_branch, assigned, u, reported, out);
    auto e = lint_stmt(*i->else_branch, assigned, u, reported, out);
    for (std::size_t k = 0; k < t.size(); ++k) t[k] = t[k] && e[k];
    return t;
  }
  const auto& w = std::get<Stmt::While>(s.node);
  lint_reads(*w.cond, assigned, u, reported, out);
  lint_stmt(*w.body, assigned, u, reported, out);
  return assigned;  // the body may run zero times
}

}  // namespace

std::vector<std::string> lint_read_before_write(const Program& p) {
  std::vector<std::string> out;
  std::vector<bool> reported(p.universe->size(), false);
  auto assigned = lint_stmt(*p.body, std::vector<bool>(p.universe->size(), false), p.universe,
                            reported, out);
  std::vector<bool> used(p.universe->size(), false);
  collect_vars(*p.return_expr, used);
  lint_check(used, assigned, p.universe, reported, out);
  return out;
}

}  // namespace probsem
