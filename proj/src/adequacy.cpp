#include "probsem/adequacy.hpp"

#include "probsem/translate.hpp"

namespace probsem {

AdequacyResult check_adequacy(const StmtPtr& stmt, const ExpectationPtr& f_after, const Dist& d,
                              const Weight& tol, unsigned long max_k) {
  AdequacyResult out;

  // Structured side: pair the pre-expectation with the input distribution.
  {
    auto ctx = std::make_shared<EvalContext>();
    ctx->tol = tol;
    ctx->max_k = max_k;
    ExpectationPtr pre = transform(stmt, f_after, ctx);
    for (const auto& [values, w] : d.entries())
      out.lhs += w * pre->eval(Store(d.universe(), values));
    out.expect_report.iterations_used = ctx->stats.max_iterations;
    out.expect_report.sup_delta = ctx->stats.last_delta;
    out.expect_report.mass_delta = ctx->stats.last_delta;
    out.expect_report.budget_exhausted = ctx->stats.budget_exhausted;
    out.expect_report.converged = !ctx->stats.budget_exhausted;
    out.expect_report.exact = !ctx->stats.any_loop;
  }

  // Graph side: pair the post-expectation with the output distribution.
  {
    SemanticsEngine engine(translate_stmt(stmt, d.universe()));
    auto [dist, report] = engine.run(d, tol, max_k);
    out.dist_report = report;
    for (const auto& [values, w] : dist.entries())
      out.rhs += w * f_after->eval(Store(d.universe(), values));
  }

  out.abs_diff = Weight::abs_diff(out.lhs, out.rhs);
  out.both_converged = out.expect_report.converged && out.dist_report.converged;
  out.exact = out.expect_report.exact && out.dist_report.exact;
  return out;
}

Weight retrieve_expectation(const StmtPtr& stmt, const ExpectationPtr& f_after, const Store& s0,
                            const Weight& tol, unsigned long max_k) {
  SemanticsEngine engine(translate_stmt(stmt, s0.universe()));
  auto [dist, report] = engine.run(Dist::point(s0), tol, max_k);
  Weight out;
  for (const auto& [values, w] : dist.entries())
    out += w * f_after->eval(Store(s0.universe(), values));
  return out;
}

// ---------------------------------------------------------------------------
// Sampler
// ---------------------------------------------------------------------------

namespace {

// Uniform integer in [0, bound) by rejection on fixed-width draws.
Int uniform_below(SplitMix64& rng, const Int& bound) {
  const std::size_t bits = mpz_sizeinbase(bound.get_mpz_t(), 2);
  const std::size_t words = (bits + 63) / 64;
  while (true) {
    Int r = 0;
    for (std::size_t i = 0; i < words; ++i) {
      Int word(static_cast<unsigned long>(rng.next() >> 32));
      word <<= 32;
      word |= static_cast<unsigned long>(rng.next() & 0xFFFFFFFFull);
      r <<= 64;
      r |= word;
    }
    // Trim to exactly `bits` bits.
    Int mask = 1;
    mask <<= bits;
    mask -= 1;
    r &= mask;
    if (r < bound) return r;
  }
}

Int draw(SplitMix64& rng, const DistSpec& ds) {
  // Common denominator, then one uniform draw against cumulative numerators.
  Int common = 1;
  for (const auto& [value, w] : ds.entries()) {
    Int den = w.denominator();
    mpz_lcm(common.get_mpz_t(), common.get_mpz_t(), den.get_mpz_t());
  }
  Int u = uniform_below(rng, common);
  Int cum = 0;
  for (const auto& [value, w] : ds.entries()) {
    cum += w.numerator() * (common / w.denominator());
    if (u < cum) return value;
  }
  return ds.entries().back().first;  // unreachable: weights sum to 1
}

enum class RunOutcome { Accepted, RejectedObserve, StepBoundHit };

struct Runner {
  SplitMix64& rng;
  unsigned long steps_left;

  RunOutcome exec(const Stmt& s, Store& store) {
    if (steps_left == 0) return RunOutcome::StepBoundHit;
    if (std::holds_alternative<Stmt::Skip>(s.node)) {
      --steps_left;
      return RunOutcome::Accepted;
    }
    if (const auto* a = std::get_if<Stmt::Assign>(&s.node)) {
      --steps_left;
      store = store.with(a->var, eval_expr(*a->expr, store));
      return RunOutcome::Accepted;
    }
    if (const auto* r = std::get_if<Stmt::RAssign>(&s.node)) {
      --steps_left;
      store = store.with(r->var, draw(rng, *r->dist));
      return RunOutcome::Accepted;
    }
    if (const auto* o = std::get_if<Stmt::Observe>(&s.node)) {
      --steps_left;
      return eval_bool(*o->cond, store) ? RunOutcome::Accepted : RunOutcome::RejectedObserve;
    }
    if (const auto* q = std::get_if<Stmt::Seq>(&s.node)) {
      RunOutcome r = exec(*q->first, store);
      return r == RunOutcome::Accepted ? exec(*q->second, store) : r;
    }
    if (const auto* i = std::get_if<Stmt::If>(&s.node)) {
      --steps_left;
      return eval_bool(*i->cond, store) ? exec(*i->then_branch, store)
                                        : exec(*i->else_branch, store);
    }
    const auto& w = std::get<Stmt::While>(s.node);
    while (true) {
      if (steps_left == 0) return RunOutcome::StepBoundHit;
      --steps_left;  // guard evaluation
      if (!eval_bool(*w.cond, store)) return RunOutcome::Accepted;
      RunOutcome r = exec(*w.body, store);
      if (r != RunOutcome::Accepted) return r;
    }
  }
};

}  // namespace

SampleReport sample_program(const Program& p, unsigned long n, std::uint64_t seed,
                            unsigned long step_bound) {
  if (n == 0) throw std::invalid_argument("sample count must be positive");
  if (step_bound == 0) throw std::invalid_argument("step bound must be positive");

  SampleReport report{0, 0, 0, 0, Dist(p.universe), std::nullopt, seed, step_bound};
  mpq_class return_sum(0);
  const Weight per_run(Int(1), Int(n));

  for (unsigned long i = 0; i < n; ++i) {
    SplitMix64 derive(seed ^ (0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(i + 1)));
    SplitMix64 rng(derive.next());
    Store store(p.universe);
    Runner runner{rng, step_bound};
    RunOutcome outcome = runner.exec(*p.body, store);
    ++report.n_total;
    switch (outcome) {
      case RunOutcome::Accepted: {
        ++report.n_accepted;
        report.empirical_end_dist.add_mass(store, per_run);
        return_sum += mpq_class(eval_expr(*p.return_expr, store));
        break;
      }
      case RunOutcome::RejectedObserve:
        ++report.n_rejected_observe;
        break;
      case RunOutcome::StepBoundHit:
        ++report.n_step_bound_hit;
        break;
    }
  }

  if (report.n_accepted > 0) {
    mpq_class mean = return_sum / mpq_class(static_cast<unsigned long>(report.n_accepted));
    mean.canonicalize();
    report.empirical_normalized_expectation = mean;
  }
  return report;
}

nlohmann::ordered_json sample_report_to_json(const SampleReport& r) {
  nlohmann::ordered_json j;
  j["n_total"] = r.n_total;
  j["n_accepted"] = r.n_accepted;
  j["n_rejected_observe"] = r.n_rejected_observe;
  j["n_step_bound_hit"] = r.n_step_bound_hit;
  j["acceptance_rate"] = r.acceptance_rate().str();
  if (r.empirical_normalized_expectation) {
    j["empirical_normalized_expectation"] =
        rational_to_string(*r.empirical_normalized_expectation);
  } else {
    j["empirical_normalized_expectation"] = nullptr;
  }
  j["empirical_end_dist"] = dist_to_json(r.empirical_end_dist);
  j["seed"] = r.seed;
  j["step_bound"] = r.step_bound;
  return j;
}

}  // namespace probsem
