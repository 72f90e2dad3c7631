#include <doctest.h>

#include <functional>

#include "probsem/pcfg.hpp"
#include "probsem/syntax.hpp"
#include "probsem/translate.hpp"
#include "testutil.hpp"

using namespace probsem;

namespace {

// Node-count law of the translation: 2 for atoms, sum for sequencing,
// sum + 2 for the structured constructs.
std::size_t expected_nodes(const Stmt& s) {
  if (const auto* q = std::get_if<Stmt::Seq>(&s.node))
    return expected_nodes(*q->first) + expected_nodes(*q->second);
  if (const auto* i = std::get_if<Stmt::If>(&s.node))
    return expected_nodes(*i->then_branch) + expected_nodes(*i->else_branch) + 2;
  if (const auto* w = std::get_if<Stmt::While>(&s.node)) return expected_nodes(*w->body) + 2;
  return 2;
}

}  // namespace

TEST_CASE("translation is valid and obeys the node-count law") {
  testutil::Rng rng(0x7a5);
  for (int iter = 0; iter < 150; ++iter) {
    auto u = testutil::random_universe(rng);
    StmtPtr body = iter % 3 == 0 ? testutil::random_counter_loop(rng, u)
                                 : testutil::random_stmt_loopfree(rng, u, 3);
    Pcfg g = translate_stmt(body, u);  // throws if ill-formed
    CHECK(g.node_count() == expected_nodes(*body));
    CHECK(g.label(g.end()).kind == LabelKind::Unlabeled);
  }
}

TEST_CASE("program translation labels the end with the return expression") {
  Program p = parse_program("var x; x := 3; return x * x");
  Pcfg g = translate_program(p);
  CHECK(g.node_count() == 2);
  CHECK(label_to_string(g.label(g.end())) == "return x * x");
  CHECK(label_to_string(g.label(g.start())) == "x := 3");
}

TEST_CASE("the conditioned-sum program translates to the straight-line graph") {
  Program p1 = parse_program(
      "var x y; x ~ {0:1/4,1:1/4,2:1/4,3:1/4}; y ~ {0:1/4,1:1/4,2:1/4,3:1/4}; "
      "observe(x+y>=5); return x");
  Pcfg raw = translate_program(p1);
  CHECK(raw.node_count() == 6);  // three atoms plus the end, glued by two skips

  Pcfg g = compress_skips(raw);
  CHECK(g.node_count() == 4);
  NodeId v = g.start();
  CHECK(g.label(v).kind == LabelKind::RAssign);
  v = g.successors(v)[0];
  CHECK(g.label(v).kind == LabelKind::RAssign);
  v = g.successors(v)[0];
  CHECK(label_to_string(g.label(v)) == "observe(x + y >= 5)");
  v = g.successors(v)[0];
  CHECK(v == g.end());
  CHECK(label_to_string(g.label(v)) == "return x");
}

TEST_CASE("the loop program simplifies to the hand-built graph") {
  Program p2 = parse_program(
      "var x y; x ~ {0:1/4,1:1/4,2:1/4,3:1/4}; y := 0; "
      "if x >= 2 { while y < 3 { y := y + 1 } } else { skip }; return x");
  Pcfg simplified = compress_skips(translate_program(p2));
  Pcfg expected = testutil::build_g2(testutil::G2Body::Increment);
  CHECK(same_shape(canonical_form(simplified), canonical_form(expected)));
}

TEST_CASE("while translation wires the back edge through a skip") {
  auto u = Universe::of({"x"});
  StmtPtr loop = make_while(parse_bool_text("x < 2", u),
                            make_assign(u, "x", parse_expr_text("x + 1", u)));
  Pcfg g = translate_stmt(loop, u);
  CHECK(g.node_count() == 4);
  // start is the branch; true goes to the body, false to the end.
  CHECK(g.label(g.start()).kind == LabelKind::Branch);
  NodeId body = g.successors(g.start())[0];
  CHECK(g.label(body).kind == LabelKind::Assign);
  CHECK(g.successors(g.start())[1] == g.end());
  NodeId back = g.successors(body)[0];
  CHECK(g.label(back).kind == LabelKind::Skip);
  CHECK(g.successors(back)[0] == g.start());
}

TEST_CASE("skip compression preserves forward behavior") {
  testutil::Rng rng(0xbead);
  for (int iter = 0; iter < 60; ++iter) {
    auto u = testutil::random_universe(rng);
    StmtPtr body = testutil::random_stmt_loopfree(rng, u, 3);
    Pcfg raw = translate_stmt(body, u);
    Pcfg small = compress_skips(raw);
    CHECK(validate(small).empty());
    CHECK(small.node_count() <= raw.node_count());
    // No interior skip survives unless it is the start node.
    for (NodeId v = 0; v < static_cast<NodeId>(small.node_count()); ++v) {
      if (v == small.start() || v == small.end()) continue;
      CHECK(small.label(v).kind != LabelKind::Skip);
    }
  }
}
