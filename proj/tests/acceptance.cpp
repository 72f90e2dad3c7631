// End-to-end acceptance checks. Each criterion prints exactly one
// [PASS]/[FAIL] line and carries a wall-clock budget; the binary exits
// nonzero if any criterion fails. Run from the repository root, or pass the
// corpus directory as argv[1].

#include <chrono>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "probsem/adequacy.hpp"
#include "probsem/denotational.hpp"
#include "probsem/fixpoint.hpp"
#include "probsem/graph_analysis.hpp"
#include "probsem/pcfg.hpp"
#include "probsem/rational.hpp"
#include "probsem/store.hpp"
#include "probsem/store_dist.hpp"
#include "probsem/syntax.hpp"
#include "probsem/translate.hpp"

#include "testutil.hpp"

namespace {

using namespace probsem;
using testutil::G2Body;

struct Failure {
  std::string where;
  std::string what;
};

#define REQUIRE(cond, msg)                                                       \
  do {                                                                           \
    if (!(cond)) {                                                               \
      std::ostringstream os_;                                                    \
      os_ << msg;                                                                \
      throw Failure{std::string(__FILE__) + ":" + std::to_string(__LINE__),      \
                    os_.str()};                                                  \
    }                                                                            \
  } while (0)

std::string g_corpus = "corpus";

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good(), "cannot open " << path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Program load_program(const std::string& name) {
  return parse_program(read_file(g_corpus + "/" + name));
}

Weight w(long n, long d = 1) { return Weight(Int(n), Int(d)); }

const Weight& tol9() {
  static const Weight t = w(1, 1000000000);
  return t;
}

// The straight-line conditioning graph: two uniform draws, an observe, a
// return. Used as the expected shape for the p1 translation.
Pcfg build_g1() {
  auto u = Universe::of({"x", "y"});
  auto quarter = std::make_shared<DistSpec>(
      DistSpec({{Int(0), w(1, 4)}, {Int(1), w(1, 4)}, {Int(2), w(1, 4)}, {Int(3), w(1, 4)}}));
  Pcfg g(u);
  NodeId n0 = g.add_node(NodeLabel::rassign(u, "x", quarter));
  NodeId n1 = g.add_node(NodeLabel::rassign(u, "y", quarter));
  NodeId n2 = g.add_node(NodeLabel::observe(make_cmp(
      CmpOp::Ge, make_bin(ArithOp::Add, make_var(u, "x"), make_var(u, "y")), make_const(5))));
  NodeId n3 = g.add_node(NodeLabel::ret(make_var(u, "x")));
  g.set_succ(n0, n1);
  g.set_succ(n1, n2);
  g.set_succ(n2, n3);
  g.set_start(n0);
  g.set_end(n3);
  require_valid(g);
  return g;
}

// ------------------------------------------------------------- criterion 1

void c1_exact_end_distribution() {
  Pcfg g = compress_skips(translate_program(load_program("p1.prob")));
  SemanticsEngine eng(g);
  Dist expected(g.universe());
  expected.add_mass({Int(2), Int(3)}, w(1, 16));
  expected.add_mass({Int(3), Int(2)}, w(1, 16));
  expected.add_mass({Int(3), Int(3)}, w(1, 16));
  const std::pair<int, int> starts[] = {{0, 0}, {1, 2}, {3, 3}, {2, 0}};
  for (auto [i, j] : starts) {
    auto [out, rep] = eng.run(Dist::point(Store(g.universe(), {Int(i), Int(j)})), tol9(), 100);
    REQUIRE(out == expected, "start (" << i << "," << j << "): got " << out.str());
    REQUIRE(rep.exact && rep.converged,
            "run from (" << i << "," << j << ") was not certified exact");
    REQUIRE(mass(out) == w(3, 16), "end mass " << mass(out).str() << ", want 3/16");
  }
}

// ------------------------------------------------------------- criterion 2

void c2_normalized_value() {
  auto r = normalized_semantics(load_program("p1.prob"), tol9(), 10000);
  REQUIRE(r.value == w(8, 3), "value " << r.value.str() << ", want 8/3");
  REQUIRE(r.numerator == w(1, 2), "numerator " << r.numerator.str() << ", want 1/2");
  REQUIRE(r.denominator == w(3, 16), "denominator " << r.denominator.str() << ", want 3/16");
  REQUIRE(r.numerator_report.exact && r.denominator_report.exact,
          "loop-free program must be certified exact");
}

// ------------------------------------------------------------- criterion 3

void c3_stuck_loop_starves() {
  SemanticsEngine eng(testutil::build_g2(G2Body::ConstOne));
  const auto& u = eng.graph().universe();
  Weight r = w(1, 3);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 3; ++j) {
      Dist d = testutil::point_r(u, r, Int(i), Int(j));
      for (unsigned long k = 0; k <= 100; ++k)
        REQUIRE(eng.omega_k(k, 3, 5, d).is_zero(),
                "mass escaped the stuck loop: start (" << i << "," << j << "), level " << k);
    }
  auto [out, rep] = eng.run(Dist::point(Store(u, {Int(0), Int(0)})), tol9(), 1000);
  REQUIRE(rep.converged, "full run did not converge");
  REQUIRE(mass(out) == w(1, 2), "end mass " << mass(out).str() << ", want exactly 1/2");
}

// ------------------------------------------------------------- criterion 4

void c4_counting_loop_drains() {
  SemanticsEngine eng(testutil::build_g2(G2Body::Increment));
  const auto& u = eng.graph().universe();
  for (const Weight& r : {w(2, 7), Weight::one()})
    for (int i = 0; i < 4; ++i) {
      Dist d = testutil::point_r(u, r, Int(i), Int(0));
      Dist want = testutil::point_r(u, r, Int(i), Int(3));
      REQUIRE(eng.omega_k(5, 3, 5, d) == want,
              "level-5 image wrong for x=" << i << ", weight " << r.str());
    }
}

// ------------------------------------------------------------- criterion 5

void c5_resampling_recurrence() {
  SemanticsEngine eng(testutil::build_g2(G2Body::Uniform));
  const auto& u = eng.graph().universe();
  for (const Weight& r : {w(1, 2), Weight::one()})
    for (int i : {0, 2})
      for (int j : {0, 2}) {
        Dist d = testutil::point_r(u, r, Int(i), Int(j));
        std::vector<Int> target = {Int(i), Int(3)};
        REQUIRE(eng.omega_k(0, 3, 5, d).is_zero(), "level 0 must be the zero transformer");
        Weight prev = eng.omega_k(1, 3, 5, d).at(target);
        REQUIRE(prev == Weight(),
                "level 1 mass at {x=" << i << ", y=3} must still be zero, got " << prev.str());
        for (unsigned long k = 2; k <= 30; ++k) {
          Weight cur = eng.omega_k(k, 3, 5, d).at(target);
          REQUIRE(cur == w(3, 4) * prev + w(1, 4) * r,
                  "recurrence broken at level " << k << " (x=" << i << ", y=" << j << ")");
          prev = cur;
        }
      }
  // Tail: the level-k mass is r*(1 - (3/4)^(k-1)), which first enters the
  // 1e-6 band around its limit at k = 50 when r = 1 (the worst case).
  Dist d1 = testutil::point_r(u, Weight::one(), Int(0), Int(0));
  std::vector<Int> target = {Int(0), Int(3)};
  Weight eps = w(1, 1000000);
  Weight m49 = eng.omega_k(49, 3, 5, d1).at(target);
  Weight m50 = eng.omega_k(50, 3, 5, d1).at(target);
  REQUIRE(Weight::abs_diff(m49, Weight::one()) > eps,
          "level 49 is already inside the band; the derived level count is stale");
  REQUIRE(Weight::abs_diff(m50, Weight::one()) <= eps,
          "level 50 is not within 1e-6 of the limit");
}

// ------------------------------------------------------------- criterion 6

void c6_analysis_goldens() {
  Pcfg g = testutil::build_g2(G2Body::Increment);
  auto an = GraphAnalysis::analyze(g);
  REQUIRE(an.first_pd.at(0) && *an.first_pd.at(0) == 1, "join point after the entry draw");
  REQUIRE(an.first_pd.at(2) && *an.first_pd.at(2) == 5, "join point of the outer branch");
  REQUIRE(an.lap_of(4, 5) == 2, "longest acyclic path, loop body to exit");
  REQUIRE(an.lap_of(3, 5) == 1, "longest acyclic path, loop head to exit");
  REQUIRE(an.lap_of(2, 5) == 2, "longest acyclic path, outer branch to exit");
  for (NodeId v = 0; v < 6; ++v)
    REQUIRE(an.cycle_inducing_set.at(static_cast<std::size_t>(v)) == (v == 3),
            "cycle-inducing set must be exactly the loop head; node " << v << " disagrees");
}

// ------------------------------------------------------------- criterion 7

void c7_translation_goldens() {
  Pcfg t1 = canonical_form(compress_skips(translate_program(load_program("p1.prob"))));
  REQUIRE(same_shape(t1, canonical_form(build_g1())),
          "translated p1.prob differs from the hand-built chain");
  Pcfg t2 = canonical_form(compress_skips(translate_program(load_program("p2.prob"))));
  REQUIRE(same_shape(t2, canonical_form(testutil::build_g2(G2Body::Increment))),
          "translated p2.prob differs from the hand-built loop graph");
}

// ------------------------------------------------------------- criterion 8

// A small graph from a random statement; occasionally one with a loop.
Pcfg random_graph(testutil::Rng& rng, const UniversePtr& u, bool allow_loop) {
  StmtPtr s = allow_loop ? testutil::random_counter_loop(rng, u)
                         : testutil::random_stmt_loopfree(rng, u, 2);
  return compress_skips(translate_stmt(s, u));
}

void suite_select_partition() {
  testutil::Rng rng(0xA11CE5);
  for (int n = 0; n < 220; ++n) {
    auto u = testutil::random_universe(rng);
    Dist d = testutil::random_dist(rng, u);
    BoolExprPtr b = testutil::random_bexp(rng, u, 2);
    Dist chosen = select(*b, d);
    Dist rest = select(*make_not(b), d);
    REQUIRE(add(chosen, rest) == d, "case " << n << ": partition lost or duplicated mass");
    REQUIRE(mass(chosen) <= mass(d), "case " << n << ": selection increased mass");
  }
}

void suite_update_mass() {
  testutil::Rng rng(0xB0B5);
  for (int n = 0; n < 220; ++n) {
    auto u = testutil::random_universe(rng);
    Dist d = testutil::random_dist(rng, u);
    std::size_t var = rng.below(static_cast<unsigned>(u->size()));
    ExprPtr e = testutil::random_expr(rng, u, 2, true);
    REQUIRE(mass(apply_assign(var, *e, d)) == mass(d),
            "case " << n << ": assignment changed the total mass");
    DistSpec ds = testutil::random_distspec(rng);
    REQUIRE(mass(apply_rassign(var, ds, d)) == mass(d),
            "case " << n << ": random assignment changed the total mass");
  }
}

void suite_level_linearity() {
  testutil::Rng rng(0xC0FFEE);
  for (int n = 0; n < 200; ++n) {
    auto u = testutil::random_universe(rng);
    SemanticsEngine eng(random_graph(rng, u, n % 3 == 0));
    Dist d = testutil::random_dist(rng, u);
    Dist d1(u);
    Dist d2(u);
    for (const auto& [vals, wt] : d.entries()) {
      Weight part = wt * w(rng.below(17), 16);
      d1.add_mass(vals, part);
      d2.add_mass(vals, wt - part);
    }
    Weight c = w(1 + rng.below(16), 16);
    std::vector<std::pair<NodeId, NodeId>> pairs = {{eng.graph().start(), eng.graph().end()}};
    const auto& pd = eng.analysis().pd;
    for (int t = 0; t < 8 && pairs.size() < 3; ++t) {
      NodeId v = static_cast<NodeId>(rng.below(static_cast<unsigned>(eng.graph().node_count())));
      auto props = pd.proper_of(v);
      if (!props.empty())
        pairs.emplace_back(v, props[rng.below(static_cast<unsigned>(props.size()))]);
    }
    for (auto [v, v2] : pairs)
      for (unsigned long k = 1; k <= 3; ++k) {
        Dist whole = eng.omega_k(k, v, v2, d);
        REQUIRE(whole == add(eng.omega_k(k, v, v2, d1), eng.omega_k(k, v, v2, d2)),
                "case " << n << ": level-" << k << " transformer is not additive");
        REQUIRE(eng.omega_k(k, v, v2, scale(c, d)) == scale(c, whole),
                "case " << n << ": level-" << k << " transformer is not homogeneous");
        REQUIRE(mass(whole) <= mass(d),
                "case " << n << ": level-" << k << " transformer increased mass");
      }
  }
}

void suite_level_composition() {
  testutil::Rng rng(0xD00D);
  for (int n = 0; n < 200; ++n) {
    auto u = testutil::random_universe(rng);
    SemanticsEngine eng(random_graph(rng, u, n % 5 == 0));
    const auto& pd = eng.analysis().pd;
    Dist d = testutil::random_dist(rng, u);
    auto count = static_cast<NodeId>(eng.graph().node_count());
    for (NodeId v = 0; v < count; ++v)
      for (NodeId v1 : pd.proper_of(v))
        for (NodeId v2 : pd.proper_of(v1))
          for (unsigned long k = 1; k <= 3; ++k)
            REQUIRE(eng.omega_k(k, v, v2, d) ==
                        eng.omega_k(k, v1, v2, eng.omega_k(k, v, v1, d)),
                    "case " << n << ": composition through node " << v1 << " at level " << k
                            << " disagrees");
  }
}

void suite_lap_and_cycles() {
  testutil::Rng rng(0xE4E4);
  int cycles_seen = 0;
  for (int n = 0; n < 200; ++n) {
    auto u = testutil::random_universe(rng);
    Pcfg g = random_graph(rng, u, n % 2 == 0);
    auto an = GraphAnalysis::analyze(g);
    auto count = static_cast<NodeId>(g.node_count());
    for (NodeId v = 0; v < count; ++v)
      for (NodeId v1 : an.pd.proper_of(v))
        for (NodeId v2 : an.pd.proper_of(v1))
          REQUIRE(an.lap_of(v, v2) == an.lap_of(v, v1) + an.lap_of(v1, v2),
                  "case " << n << ": path lengths fail to add through node " << v1);
    for (const auto& cyc : simple_cycles(g)) {
      ++cycles_seen;
      bool has_inducing = false;
      for (NodeId v : cyc)
        has_inducing = has_inducing || an.cycle_inducing_set.at(static_cast<std::size_t>(v));
      REQUIRE(has_inducing, "case " << n << ": a cycle with no cycle-inducing node");
    }
  }
  REQUIRE(cycles_seen >= 50, "generator produced too few cycles (" << cycles_seen << ")");
}

void suite_adequacy() {
  testutil::Rng rng(0xF00D);
  for (int n = 0; n < 200; ++n) {
    auto u = testutil::random_universe(rng);
    StmtPtr s = testutil::random_stmt_loopfree(rng, u, 2);
    Dist d = testutil::random_dist(rng, u);
    ExpectationPtr f =
        rng.chance(1, 2)
            ? guard_expectation(testutil::random_bexp(rng, u, 1),
                                constant_expectation(Weight::one()),
                                constant_expectation(Weight()))
            : expr_expectation(testutil::random_expr(rng, u, 2, false));
    auto res = check_adequacy(s, f, d, tol9(), 500);
    REQUIRE(res.exact, "loop-free case " << n << " was not certified exact");
    REQUIRE(res.lhs == res.rhs, "loop-free case " << n << ": pairing mismatch, lhs "
                                                  << res.lhs.str() << " vs rhs " << res.rhs.str());
    REQUIRE(res.abs_diff == Weight(), "loop-free case " << n << ": nonzero gap reported");
  }
  for (int n = 0; n < 200; ++n) {
    auto u = testutil::random_universe(rng);
    StmtPtr s = testutil::random_counter_loop(rng, u);
    Dist d = testutil::random_dist(rng, u);
    ExpectationPtr f = guard_expectation(testutil::random_bexp(rng, u, 1),
                                         constant_expectation(Weight::one()),
                                         constant_expectation(Weight()));
    auto res = check_adequacy(s, f, d, tol9(), 500);
    REQUIRE(res.both_converged, "loop case " << n << " did not converge on both sides");
    REQUIRE(res.lhs == res.rhs, "loop case " << n << ": pairing mismatch after convergence, lhs "
                                             << res.lhs.str() << " vs rhs " << res.rhs.str());
  }
}

void suite_deterministic_concentration() {
  testutil::Rng rng(0x6E6E);
  testutil::StmtOpts det{.allow_rassign = false, .allow_observe = false};
  for (int n = 0; n < 200; ++n) {
    auto u = testutil::random_universe(rng);
    StmtPtr s = n % 3 == 0 ? testutil::random_counter_loop(rng, u, det)
                           : testutil::random_stmt_loopfree(rng, u, 2, {}, det);
    Pcfg g = compress_skips(translate_stmt(s, u));
    REQUIRE(is_deterministic(g), "case " << n << ": generator leaked a probabilistic node");
    SemanticsEngine eng(std::move(g));
    std::vector<Int> vals;
    for (std::size_t i = 0; i < u->size(); ++i) vals.emplace_back(rng.below(4));
    Dist d = Dist::point(Store(u, vals));
    NodeId start = eng.graph().start();
    NodeId end = eng.graph().end();
    for (unsigned long k = 1; k <= 3; ++k)
      REQUIRE(is_concentrated(eng.omega_k(k, start, end, d)).concentrated,
              "case " << n << ": level-" << k << " image spread over several stores");
    auto [out, rep] = eng.omega(start, end, d, tol9(), 200);
    REQUIRE(rep.converged, "case " << n << ": deterministic run did not converge");
    REQUIRE(is_concentrated(out).concentrated,
            "case " << n << ": limit image spread over several stores");
    REQUIRE(mass(out) == Weight::one(),
            "case " << n << ": terminating deterministic run lost mass");
  }
}

void c8_property_suites() {
  suite_select_partition();
  suite_update_mass();
  suite_level_linearity();
  suite_level_composition();
  suite_lap_and_cycles();
  suite_adequacy();
  suite_deterministic_concentration();
}

// ------------------------------------------------------------- criterion 9

void c9_monte_carlo() {
  SampleReport rep = sample_program(load_program("p1.prob"), 100000, 42);
  Weight rate = rep.acceptance_rate();
  REQUIRE(Weight::abs_diff(rate, w(3, 16)) < w(1, 100),
          "acceptance rate " << rate.str() << " is not within 1/100 of 3/16");
  REQUIRE(rep.empirical_normalized_expectation.has_value(), "no run was accepted");
  mpq_class mean = *rep.empirical_normalized_expectation;
  mpq_class dev = mean - mpq_class(8, 3);
  if (dev < 0) dev = -dev;
  REQUIRE(dev < mpq_class(1, 20),
          "empirical mean " << mean.get_str() << " is not within 1/20 of 8/3");
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) g_corpus = argv[1];

  struct Criterion {
    const char* name;
    double budget_s;
    void (*fn)();
  };
  const Criterion criteria[] = {
      {"1. conditioned uniform pair: exact end distribution in one pass", 1.0,
       c1_exact_end_distribution},
      {"2. normalized expected return of the conditioned pair is exactly 8/3", 1.0,
       c2_normalized_value},
      {"3. stuck loop keeps trapped mass at zero through level 100; exit mass 1/2", 5.0,
       c3_stuck_loop_starves},
      {"4. counting loop drains point masses to y=3 exactly by level 5", 1.0,
       c4_counting_loop_drains},
      {"5. resampling loop obeys the 3/4 recurrence and meets its 1e-6 tail at level 50", 10.0,
       c5_resampling_recurrence},
      {"6. loop-graph analysis goldens: join points, path lengths, cycle set", 1.0,
       c6_analysis_goldens},
      {"7. translation reproduces the hand-built graphs up to renumbering", 1.0,
       c7_translation_goldens},
      {"8. algebraic property suites (seven suites, 200+ random cases each)", 60.0,
       c8_property_suites},
      {"9. Monte-Carlo cross-check of acceptance rate and normalized mean", 30.0, c9_monte_carlo},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    auto t0 = std::chrono::steady_clock::now();
    std::string problem;
    try {
      c.fn();
    } catch (const Failure& f) {
      problem = f.where + ": " + f.what;
    } catch (const std::exception& e) {
      problem = std::string("unexpected exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (problem.empty() && secs > c.budget_s) {
      std::ostringstream os;
      os << "completed but took " << secs << " s against a budget of " << c.budget_s << " s";
      problem = os.str();
    }
    char timing[32];
    std::snprintf(timing, sizeof timing, "%.2fs", secs);
    if (problem.empty()) {
      std::cout << "[PASS] " << c.name << " (" << timing << ")\n";
    } else {
      std::cout << "[FAIL] " << c.name << " -- " << problem << "\n";
      ++failures;
    }
  }
  if (failures) std::cout << failures << " criterion(s) failed\n";
  return failures ? 1 : 0;
}
