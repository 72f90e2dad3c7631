// probsem: command-line front end for the exact semantics workbench.
//
// Subcommands:
//   check      parse a program, echo its canonical form, run lints
//   translate  program -> control-flow graph (DOT or JSON)
//   analyze    postdominators, first proper postdominators, LAP, cycles
//   run        push a distribution through a graph to the fixpoint
//   expect     normalized expected return value of a program
//   adequacy   compare the structured and graph semantics on one program
//   sample     forward simulation with rejection
//
// Exit codes: 0 success; 1 bad usage or unparseable/invalid input;
// 2 semantic failure (undefined normalization, evaluation error, or
// --strict with an exhausted iteration budget).

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "probsem/adequacy.hpp"
#include "probsem/denotational.hpp"
#include "probsem/fixpoint.hpp"
#include "probsem/graph_analysis.hpp"
#include "probsem/pcfg.hpp"
#include "probsem/rational.hpp"
#include "probsem/store_dist.hpp"
#include "probsem/syntax.hpp"
#include "probsem/translate.hpp"

namespace {

using namespace probsem;
using nlohmann::ordered_json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw UsageError("cannot read '" + path + "'");
  return ss.str();
}

nlohmann::json read_json_file(const std::string& path) {
  try {
    return nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(path + ": " + e.what());
  }
}

Weight parse_tol(const std::string& text) {
  Weight w;
  try {
    w = Weight::parse(text);
  } catch (const std::exception& e) {
    throw UsageError("bad --tol '" + text + "': " + e.what());
  }
  if (w.is_zero()) throw UsageError("--tol must be positive");
  return w;
}

Program load_program(const std::string& path) { return parse_program(read_file(path)); }

Pcfg load_graph(const std::string& path) {
  Pcfg g = pcfg_from_json(read_json_file(path));
  auto violations = validate(g);
  if (!violations.empty()) {
    std::string msg = path + ": invalid graph";
    for (const auto& v : violations) msg += "\n  [" + v.code + "] " + v.message;
    throw UsageError(msg);
  }
  return g;
}

void emit(const ordered_json& j) { std::cout << j.dump(2) << "\n"; }

// ---------------------------------------------------------------- check

int cmd_check(const std::string& path, bool as_json) {
  Program p = load_program(path);
  std::string pretty = pretty_print(p);
  std::vector<std::string> warnings = lint_read_before_write(p);
  if (as_json) {
    ordered_json j;
    j["ok"] = true;
    j["variables"] = p.universe->names();
    j["pretty"] = pretty;
    j["warnings"] = warnings;
    emit(j);
  } else {
    std::cout << pretty;
    if (pretty.empty() || pretty.back() != '\n') std::cout << "\n";
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
  }
  return 0;
}

// ------------------------------------------------------------- translate

int cmd_translate(const std::string& path, bool simplify, bool as_json) {
  Program p = load_program(path);
  Pcfg g = translate_program(p);
  if (simplify) g = compress_skips(g);
  if (as_json)
    emit(pcfg_to_json(g));
  else
    std::cout << to_dot(g);
  return 0;
}

// --------------------------------------------------------------- analyze

int cmd_analyze(const std::string& path, bool as_json) {
  Pcfg g = load_graph(path);
  GraphAnalysis a = GraphAnalysis::analyze(g);
  const auto n = static_cast<NodeId>(g.node_count());
  if (as_json) {
    ordered_json j;
    j["start"] = g.start();
    j["end"] = g.end();
    ordered_json nodes = ordered_json::array();
    for (NodeId v = 0; v < n; ++v) {
      ordered_json nj;
      nj["id"] = v;
      nj["label"] = label_to_string(g.label(v));
      if (a.first_pd.at(static_cast<std::size_t>(v)))
        nj["fppd"] = *a.first_pd.at(static_cast<std::size_t>(v));
      else
        nj["fppd"] = nullptr;
      nj["cycle_inducing"] = static_cast<bool>(a.cycle_inducing_set.at(static_cast<std::size_t>(v)));
      nodes.push_back(std::move(nj));
    }
    j["nodes"] = std::move(nodes);
    ordered_json lap = ordered_json::array();
    for (const auto& [pair, len] : a.lap_table) {
      ordered_json e;
      e["from"] = pair.first;
      e["to"] = pair.second;
      e["lap"] = len;
      lap.push_back(std::move(e));
    }
    j["lap"] = std::move(lap);
    emit(j);
    return 0;
  }
  std::cout << "start: " << g.start() << "  end: " << g.end() << "\n\n";
  std::cout << "node  fppd  cycle  label\n";
  for (NodeId v = 0; v < n; ++v) {
    std::string fppd = "-";
    if (a.first_pd.at(static_cast<std::size_t>(v)))
      fppd = std::to_string(*a.first_pd.at(static_cast<std::size_t>(v)));
    std::printf("%-5d %-5s %-6s %s\n", v, fppd.c_str(),
                a.cycle_inducing_set.at(static_cast<std::size_t>(v)) ? "yes" : "no",
                label_to_string(g.label(v)).c_str());
  }
  std::cout << "\nlap(v, w) over postdomination pairs:\n";
  for (const auto& [pair, len] : a.lap_table)
    std::cout << "  " << pair.first << " -> " << pair.second << ": " << len << "\n";
  return 0;
}

// ------------------------------------------------------------------- run

struct AtPair {
  bool set = false;
  NodeId v = 0;
  NodeId w = 0;
};

AtPair parse_at(const std::string& text) {
  AtPair at;
  if (text.empty()) return at;
  auto comma = text.find(',');
  if (comma == std::string::npos) throw UsageError("--at expects 'v,w'");
  try {
    at.v = std::stoi(text.substr(0, comma));
    at.w = std::stoi(text.substr(comma + 1));
  } catch (const std::exception&) {
    throw UsageError("--at expects two node ids, got '" + text + "'");
  }
  at.set = true;
  return at;
}

int cmd_run(const std::string& graph_path, const std::string& input_path, const std::string& tol_s,
            unsigned long max_k, const std::string& at_s, bool trace, bool strict) {
  Pcfg g = load_graph(graph_path);
  Dist d0 = dist_from_json(read_json_file(input_path));
  if (!same_universe(g.universe(), d0.universe()))
    throw UsageError("graph and input distribution use different variables");
  Weight tol = parse_tol(tol_s);
  AtPair at = parse_at(at_s);

  SemanticsEngine engine(std::move(g));
  std::function<void(unsigned long, const Weight&)> on_iterate;
  if (trace) {
    std::cerr << "k,mass\n";
    on_iterate = [](unsigned long k, const Weight& mass) {
      std::cerr << k << "," << mass.str() << "\n";
    };
  }
  std::pair<Dist, ConvergenceReport> out =
      at.set ? engine.omega(at.v, at.w, d0, tol, max_k, on_iterate)
             : engine.run(d0, tol, max_k, on_iterate);

  ordered_json j;
  j["result"] = dist_to_json(out.first);
  j["report"] = report_to_json(out.second);
  emit(j);
  if (strict && out.second.budget_exhausted) {
    std::cerr << "error: iteration budget exhausted before convergence\n";
    return 2;
  }
  return 0;
}

// ---------------------------------------------------------------- expect

int cmd_expect(const std::string& path, const std::string& tol_s, unsigned long max_k, bool raw,
               bool strict) {
  Program p = load_program(path);
  Weight tol = parse_tol(tol_s);

  Weight value, num, den;
  ConvergenceReport num_report, den_report;
  if (raw) {
    Store bottom(p.universe);
    ExpectResult nr = expect(p.body, expr_expectation(p.return_expr), bottom, tol, max_k);
    ExpectResult dr = expect(p.body, constant_expectation(Weight::one()), bottom, tol, max_k);
    num = nr.value;
    den = dr.value;
    value = num;
    num_report = nr.report;
    den_report = dr.report;
  } else {
    NormalizedResult r = normalized_semantics(p, tol, max_k);
    value = r.value;
    num = r.numerator;
    den = r.denominator;
    num_report = r.numerator_report;
    den_report = r.denominator_report;
  }

  ordered_json j;
  j["value"] = value.str();
  j["numerator"] = num.str();
  j["denominator"] = den.str();
  j["converged"] = num_report.converged && den_report.converged;
  j["iterations"] = std::max(num_report.iterations_used, den_report.iterations_used);
  j["exact"] = num_report.exact && den_report.exact;
  j["numerator_report"] = report_to_json(num_report);
  j["denominator_report"] = report_to_json(den_report);
  emit(j);
  if (strict && (num_report.budget_exhausted || den_report.budget_exhausted)) {
    std::cerr << "error: iteration budget exhausted before convergence\n";
    return 2;
  }
  return 0;
}

// -------------------------------------------------------------- adequacy

int cmd_adequacy(const std::string& path, const std::string& dist_path, const std::string& tol_s,
                 unsigned long max_k, bool strict) {
  Program p = load_program(path);
  Weight tol = parse_tol(tol_s);
  Dist d = dist_path.empty() ? Dist::point(Store(p.universe))
                             : dist_from_json(read_json_file(dist_path));
  if (!same_universe(p.universe, d.universe()))
    throw UsageError("program and distribution use different variables");

  AdequacyResult r = check_adequacy(p.body, expr_expectation(p.return_expr), d, tol, max_k);

  // Pass judgement: with exactness certificates on both sides the two values
  // must agree on the nose. Otherwise both sides are under-approximations of
  // their limits, and all we can honestly ask is agreement up to the residual
  // step sizes (heuristic slack, not a proof). With an exhausted budget we
  // decline to judge.
  ordered_json pass;
  if (r.exact) {
    pass = (r.abs_diff.is_zero());
  } else if (r.both_converged) {
    Weight slack = r.expect_report.sup_delta;
    slack += r.dist_report.sup_delta;
    slack += tol;
    pass = (r.abs_diff <= slack * Weight(16ul));
  } else {
    pass = nullptr;
  }

  ordered_json j;
  j["lhs"] = r.lhs.str();
  j["rhs"] = r.rhs.str();
  j["abs_diff"] = r.abs_diff.str();
  j["both_converged"] = r.both_converged;
  j["exact"] = r.exact;
  j["pass"] = pass;
  j["expect_report"] = report_to_json(r.expect_report);
  j["dist_report"] = report_to_json(r.dist_report);
  emit(j);

  if (pass.is_boolean() && !pass.get<bool>()) {
    std::cerr << "error: structured and graph semantics disagree\n";
    return 2;
  }
  if (strict && !r.both_converged) {
    std::cerr << "error: iteration budget exhausted before convergence\n";
    return 2;
  }
  return 0;
}

// ---------------------------------------------------------------- sample

int cmd_sample(const std::string& path, unsigned long n, std::uint64_t seed,
               unsigned long step_bound) {
  Program p = load_program(path);
  SampleReport r = sample_program(p, n, seed, step_bound);
  emit(sample_report_to_json(r));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact semantics workbench for probabilistic imperative programs"};
  app.set_version_flag("--version", "probsem 0.1.0");
  app.require_subcommand(1);

  std::string program_path, graph_path, input_path, dist_path, tol_s = "1e-9", at_s;
  unsigned long max_k = 10000, n_samples = 10000, step_bound = 100000;
  std::uint64_t seed = 0;
  bool as_json = false, simplify = false, dot = false, trace = false, strict = false;
  bool raw = false, normalized = false;

  CLI::App* check = app.add_subcommand("check", "parse a program and run lints");
  check->add_option("--program", program_path, "program file (.prob)")->required();
  check->add_flag("--json", as_json, "machine-readable output");

  CLI::App* translate = app.add_subcommand("translate", "program -> control-flow graph");
  translate->add_option("--program", program_path, "program file (.prob)")->required();
  translate->add_flag("--simplify", simplify, "contract interior skip nodes");
  auto* dot_flag = translate->add_flag("--dot", dot, "DOT output (default)");
  translate->add_flag("--json", as_json, "JSON output")->excludes(dot_flag);

  CLI::App* analyze = app.add_subcommand("analyze", "postdominator / loop structure report");
  analyze->add_option("--graph", graph_path, "graph file (.pcfg.json)")->required();
  analyze->add_flag("--json", as_json, "machine-readable output");

  CLI::App* run = app.add_subcommand("run", "fixpoint of a graph on an input distribution");
  run->add_option("--graph", graph_path, "graph file (.pcfg.json)")->required();
  run->add_option("--input", input_path, "input distribution (.dist.json)")->required();
  run->add_option("--tol", tol_s, "stopping tolerance (rational or decimal)")->capture_default_str();
  run->add_option("--max-k", max_k, "iteration budget")->capture_default_str();
  run->add_option("--at", at_s, "postdomination pair 'v,w' instead of start,end");
  run->add_flag("--trace-k", trace, "stream k,mass CSV to stderr");
  run->add_flag("--strict", strict, "exit 2 if the budget is exhausted");

  CLI::App* expect = app.add_subcommand("expect", "expected return value of a program");
  expect->add_option("--program", program_path, "program file (.prob)")->required();
  expect->add_option("--tol", tol_s, "stopping tolerance (rational or decimal)")->capture_default_str();
  expect->add_option("--max-k", max_k, "iteration budget")->capture_default_str();
  auto* raw_flag = expect->add_flag("--raw", raw, "unnormalized numerator as the value");
  expect->add_flag("--normalized", normalized, "normalized value (default)")->excludes(raw_flag);
  expect->add_flag("--strict", strict, "exit 2 if the budget is exhausted");

  CLI::App* adequacy = app.add_subcommand("adequacy", "compare structured vs graph semantics");
  adequacy->add_option("--program", program_path, "program file (.prob)")->required();
  adequacy->add_option("--dist", dist_path, "input distribution (default: point mass at zeros)");
  adequacy->add_option("--tol", tol_s, "stopping tolerance (rational or decimal)")->capture_default_str();
  adequacy->add_option("--max-k", max_k, "iteration budget")->capture_default_str();
  adequacy->add_flag("--strict", strict, "exit 2 if the budget is exhausted");

  CLI::App* sample = app.add_subcommand("sample", "forward simulation with rejection");
  sample->add_option("--program", program_path, "program file (.prob)")->required();
  sample->add_option("-n,--runs", n_samples, "number of simulated runs")->capture_default_str();
  sample->add_option("--seed", seed, "RNG seed")->capture_default_str();
  sample->add_option("--step-bound", step_bound, "per-run statement budget")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (app.got_subcommand(check)) return cmd_check(program_path, as_json);
    if (app.got_subcommand(translate)) return cmd_translate(program_path, simplify, as_json);
    if (app.got_subcommand(analyze)) return cmd_analyze(graph_path, as_json);
    if (app.got_subcommand(run))
      return cmd_run(graph_path, input_path, tol_s, max_k, at_s, trace, strict);
    if (app.got_subcommand(expect)) return cmd_expect(program_path, tol_s, max_k, raw, strict);
    if (app.got_subcommand(adequacy))
      return cmd_adequacy(program_path, dist_path, tol_s, max_k, strict);
    if (app.got_subcommand(sample)) return cmd_sample(program_path, n_samples, seed, step_bound);
  } catch (const NormalizationUndefined& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const EvalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const GraphError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
