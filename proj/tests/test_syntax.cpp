#include <doctest.h>

#include <memory>
#include <string>

#include "probsem/syntax.hpp"
#include "testutil.hpp"

using namespace probsem;

namespace {

Program p1_ast() {
  auto u = Universe::of({"x", "y"});
  auto quarter = parse_distspec_text("{0:1/4, 1:1/4, 2:1/4, 3:1/4}");
  StmtPtr body = make_seq(
      make_rassign(u, "x", quarter),
      make_seq(make_rassign(u, "y", quarter),
               make_observe(make_cmp(CmpOp::Ge,
                                     make_bin(ArithOp::Add, make_var(u, "x"), make_var(u, "y")),
                                     make_const(5)))));
  return Program{u, body, make_var(u, "x")};
}

}  // namespace

TEST_CASE("the conditioned-sum program parses to the expected tree") {
  Program p = parse_program(
      "var x y; x ~ {0:1/4,1:1/4,2:1/4,3:1/4}; y ~ {0:1/4,1:1/4,2:1/4,3:1/4}; "
      "observe(x+y>=5); return x");
  CHECK(program_equal(p, p1_ast()));
}

TEST_CASE("smallest program") {
  Program p = parse_program("var x; skip; return x");
  CHECK(p.universe->names() == std::vector<std::string>{"x"});
  CHECK(stmt_equal(*p.body, *make_skip()));
  CHECK(expr_equal(*p.return_expr, *make_var(p.universe, "x")));
}

TEST_CASE("distribution weights must sum to one") {
  CHECK_THROWS_AS(parse_program("var x; x ~ {0:1/2,1:1/3}; return x"), ParseError);
  CHECK_THROWS_AS(parse_program("var x; x ~ {0:1/2,0:1/2}; return x"), ParseError);
  CHECK_THROWS_AS(parse_program("var x; x ~ {0:0,1:1}; return x"), ParseError);
}

TEST_CASE("operator precedence and associativity") {
  auto u = Universe::of({"x", "y", "z"});
  ExprPtr e = parse_expr_text("x + y * z", u);
  CHECK(expr_equal(*e, *make_bin(ArithOp::Add, make_var(u, "x"),
                                 make_bin(ArithOp::Mul, make_var(u, "y"), make_var(u, "z")))));
  CHECK(expr_to_string(*parse_expr_text("(x + y) * z", u)) == "(x + y) * z");
  CHECK(expr_to_string(*parse_expr_text("x - y - z", u)) == "x - y - z");  // left assoc
  ExprPtr sub = parse_expr_text("x - y - z", u);
  CHECK(expr_equal(*sub, *make_bin(ArithOp::Sub,
                                   make_bin(ArithOp::Sub, make_var(u, "x"), make_var(u, "y")),
                                   make_var(u, "z"))));
  BoolExprPtr b = parse_bool_text("not x >= 1 or y < 2 and z == 0", u);
  BoolExprPtr expect = make_or(
      make_not(make_cmp(CmpOp::Ge, make_var(u, "x"), make_const(1))),
      make_and(make_cmp(CmpOp::Lt, make_var(u, "y"), make_const(2)),
               make_cmp(CmpOp::Eq, make_var(u, "z"), make_const(0))));
  CHECK(bool_equal(*b, *expect));
}

TEST_CASE("operator spellings: = aliases ==, keywords alias && || !") {
  auto u = Universe::of({"x", "y"});
  CHECK(bool_equal(*parse_bool_text("x = 1", u), *parse_bool_text("x == 1", u)));
  CHECK(bool_equal(*parse_bool_text("x = 1 && !(y = 2) || false", u),
                   *parse_bool_text("x == 1 and not (y == 2) or false", u)));
}

TEST_CASE("comments and whitespace are ignored") {
  Program p = parse_program("var x; # declare\n  x := 2; # set\n return x # done");
  CHECK(expr_equal(*p.return_expr, *make_var(p.universe, "x")));
  const auto* a = std::get_if<Stmt::Assign>(&p.body->node);
  REQUIRE(a != nullptr);
  CHECK(eval_expr(*a->expr, Store(p.universe)) == Int(2));
}

TEST_CASE("parse errors carry line and column") {
  try {
    parse_program("var x;\nx := ;\nreturn x");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line == 2);
    CHECK(e.col == 6);
  }
  CHECK_THROWS_AS(parse_program("var x; if x > 0 { skip; } else { skip }; return x"), ParseError);
  CHECK_THROWS_AS(parse_program("var x; skip"), ParseError);            // missing return
  CHECK_THROWS_AS(parse_program("var; skip; return 0"), ParseError);    // no variables
  CHECK_THROWS_AS(parse_program("var x; y := 1; return x"), ParseError);  // unknown name
  CHECK_THROWS_AS(parse_program("var x x; skip; return x"), ParseError);  // duplicate
}

TEST_CASE("expression evaluation truncates division toward zero") {
  auto u = Universe::of({"x"});
  Store s(u, {Int(-7)});
  CHECK(eval_expr(*parse_expr_text("x / 2", u), s) == Int(-3));
  CHECK(eval_expr(*parse_expr_text("7 / 2", u), s) == Int(3));
  CHECK(eval_expr(*parse_expr_text("0 - 7 / 2", u), s) == Int(-3));
  CHECK_THROWS_AS(eval_expr(*parse_expr_text("1 / (x + 7)", u), s), EvalError);
}

TEST_CASE("pretty print round-trips the corpus idioms") {
  const char* sources[] = {
      "var x y; x ~ {0:1/4,1:1/4,2:1/4,3:1/4}; y ~ {0:1/4,1:1/4,2:1/4,3:1/4}; "
      "observe(x+y>=5); return x",
      "var x y; x ~ {0:1/4,1:1/4,2:1/4,3:1/4}; y := 0; "
      "if x >= 2 { while y < 3 { y := y + 1 } } else { skip }; return x",
      "var a b; if a = 0 and b = 0 { a := 1 } else { b := b * 2 }; return a + b",
      "var x; while x < 5 { x := x + 2 }; return x * x",
  };
  for (const char* src : sources) {
    Program p = parse_program(src);
    CHECK(program_equal(p, parse_program(pretty_print(p))));
  }
}

TEST_CASE("pretty print round-trips random programs") {
  testutil::Rng rng(0xa11ce);
  for (int i = 0; i < 200; ++i) {
    auto u = testutil::random_universe(rng);
    StmtPtr body = i % 3 == 0 ? testutil::random_counter_loop(rng, u)
                              : testutil::random_stmt_loopfree(rng, u, 3);
    Program p{u, body, testutil::random_expr(rng, u, 2, true)};
    Program q = parse_program(pretty_print(p));
    CHECK(program_equal(p, q));
  }
}

TEST_CASE("read-before-write lint") {
  auto warns = lint_read_before_write(parse_program("var x y; x := y + 1; return x"));
  REQUIRE(warns.size() == 1);
  CHECK(warns[0].find("'y'") != std::string::npos);

  CHECK(lint_read_before_write(parse_program("var x; x := 1; return x")).empty());
  // Assignment on only one branch does not count as definite.
  CHECK(lint_read_before_write(
            parse_program("var x y; if y = 0 { x := 1 } else { skip }; return x"))
            .size() == 2);  // y in the guard, x after the if
  // A loop body may run zero times.
  CHECK(!lint_read_before_write(parse_program("var x; while x < 1 { x := 1 }; return x")).empty());
  // Sequential definite assignment silences the warning.
  CHECK(lint_read_before_write(parse_program("var x y; y := 3; x := y; return x")).empty());
}

TEST_CASE("distspec accessors") {
  DistSpecPtr d = parse_distspec_text("{2:1/2, 0:1/4, 3:1/4}");
  REQUIRE(d->entries().size() == 3);
  CHECK(d->entries()[0].first == Int(0));  // sorted by value
  CHECK(d->weight_of(Int(2)) == Weight(Int(1), Int(2)));
  CHECK(d->weight_of(Int(1)).is_zero());
  CHECK(distspec_to_string(*d) == "{0:1/4, 2:1/2, 3:1/4}");
}
