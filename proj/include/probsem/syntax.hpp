#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "probsem/rational.hpp"
#include "probsem/store.hpp"

namespace probsem {

struct ParseError : std::runtime_error {
  ParseError(int line, int col, const std::string& what)
      : std::runtime_error("parse error at " + std::to_string(line) + ":" + std::to_string(col) +
                           ": " + what),
        line(line),
        col(col) {}
  int line;
  int col;
};

// Runtime evaluation failure (division by zero and friends).
struct EvalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Arithmetic expressions
// ---------------------------------------------------------------------------

enum class ArithOp { Add, Sub, Mul, Div };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  struct Const {
    Int value;
  };
  struct Var {
    std::size_t index;
    std::string name;
  };
  struct Bin {
    ArithOp op;
    ExprPtr lhs;
    ExprPtr rhs;
  };
  std::variant<Const, Var, Bin> node;
};

ExprPtr make_const(Int v);
ExprPtr make_var(const UniversePtr& u, const std::string& name);  // throws on unknown name
ExprPtr make_bin(ArithOp op, ExprPtr lhs, ExprPtr rhs);

// Integer evaluation; division truncates toward zero, division by zero throws
// EvalError.
Int eval_expr(const Expr& e, const Store& s);

bool expr_equal(const Expr& a, const Expr& b);
std::string expr_to_string(const Expr& e);
void collect_vars(const Expr& e, std::vector<bool>& used);

// ---------------------------------------------------------------------------
// Boolean expressions
// ---------------------------------------------------------------------------

enum class CmpOp { Lt, Le, Eq, Ne, Ge, Gt };

struct BoolExpr;
using BoolExprPtr = std::shared_ptr<const BoolExpr>;

struct BoolExpr {
  struct Lit {
    bool value;
  };
  struct Cmp {
    CmpOp op;
    ExprPtr lhs;
    ExprPtr rhs;
  };
  struct And {
    BoolExprPtr lhs;
    BoolExprPtr rhs;
  };
  struct Or {
    BoolExprPtr lhs;
    BoolExprPtr rhs;
  };
  struct Not {
    BoolExprPtr arg;
  };
  std::variant<Lit, Cmp, And, Or, Not> node;
};

BoolExprPtr make_bool_lit(bool v);
BoolExprPtr make_cmp(CmpOp op, ExprPtr lhs, ExprPtr rhs);
BoolExprPtr make_and(BoolExprPtr a, BoolExprPtr b);
BoolExprPtr make_or(BoolExprPtr a, BoolExprPtr b);
BoolExprPtr make_not(BoolExprPtr a);

bool eval_bool(const BoolExpr& b, const Store& s);
bool bool_equal(const BoolExpr& a, const BoolExpr& b);
std::string bool_to_string(const BoolExpr& b);
void collect_vars(const BoolExpr& b, std::vector<bool>& used);

// ---------------------------------------------------------------------------
// Distribution literals
// ---------------------------------------------------------------------------

// Finite distribution over integer values. Support values are distinct and
// sorted, weights are strictly positive and sum to exactly one.
class DistSpec {
public:
  explicit DistSpec(std::vector<std::pair<Int, Weight>> entries);

  const std::vector<std::pair<Int, Weight>>& entries() const { return entries_; }
  // Weight of a value; zero when outside the support.
  Weight weight_of(const Int& v) const;

  friend bool operator==(const DistSpec& a, const DistSpec& b) {
    return a.entries_ == b.entries_;
  }

private:
  std::vector<std::pair<Int, Weight>> entries_;
};

using DistSpecPtr = std::shared_ptr<const DistSpec>;

std::string distspec_to_string(const DistSpec& d);  // "{0:1/4, 1:3/4}"

// ---------------------------------------------------------------------------
// Statements and programs
// ---------------------------------------------------------------------------

struct Stmt;
using StmtPtr = std::shared_ptr<const Stmt>;

struct Stmt {
  struct Skip {};
  struct Assign {
    std::size_t var;
    std::string var_name;
    ExprPtr expr;
  };
  struct RAssign {
    std::size_t var;
    std::string var_name;
    DistSpecPtr dist;
  };
  struct Observe {
    BoolExprPtr cond;
  };
  struct Seq {
    StmtPtr first;
    StmtPtr second;
  };
  struct If {
    BoolExprPtr cond;
    StmtPtr then_branch;
    StmtPtr else_branch;
  };
  struct While {
    BoolExprPtr cond;
    StmtPtr body;
  };
  std::variant<Skip, Assign, RAssign, Observe, Seq, If, While> node;
};

StmtPtr make_skip();
StmtPtr make_assign(const UniversePtr& u, const std::string& var, ExprPtr e);
StmtPtr make_rassign(const UniversePtr& u, const std::string& var, DistSpecPtr d);
StmtPtr make_observe(BoolExprPtr b);
StmtPtr make_seq(StmtPtr a, StmtPtr b);
StmtPtr make_if(BoolExprPtr b, StmtPtr then_branch, StmtPtr else_branch);
StmtPtr make_while(BoolExprPtr b, StmtPtr body);

// Structural equality, except that sequencing is compared as a flattened
// chain: a;(b;c) equals (a;b);c. Concrete syntax cannot express the
// association of a statement list, so round-trips through source text are
// only stable modulo it.
bool stmt_equal(const Stmt& a, const Stmt& b);

struct Program {
  UniversePtr universe;
  StmtPtr body;
  ExprPtr return_expr;
};

bool program_equal(const Program& a, const Program& b);

// ---------------------------------------------------------------------------
// Concrete syntax
// ---------------------------------------------------------------------------
//
//   program := "var" ident+ ";" stmt ";" "return" expr
//   stmt    := "skip" | x ":=" expr | x "~" "{" int ":" rat ("," int ":" rat)* "}"
//            | "observe" "(" bexp ")" | stmt ";" stmt
//            | "if" bexp "{" stmt "}" "else" "{" stmt "}"
//            | "while" bexp "{" stmt "}"
//
// Sequencing is right-associative; "#" starts a line comment.

Program parse_program(const std::string& text);

// Standalone fragment parsers over a fixed universe (used by the graph
// serialization format and by tests).
ExprPtr parse_expr_text(const std::string& text, const UniversePtr& u);
BoolExprPtr parse_bool_text(const std::string& text, const UniversePtr& u);
DistSpecPtr parse_distspec_text(const std::string& text);

// Canonical source form; parse_program(pretty_print(p)) reproduces p.
std::string pretty_print(const Program& p);
std::string stmt_to_string(const Stmt& s, int indent = 0);

// Static lint: variables read before any assignment on some path. The initial
// store assigns zero to everything, so this is a warning rather than an error.
std::vector<std::string> lint_read_before_write(const Program& p);

}  // namespace probsem
