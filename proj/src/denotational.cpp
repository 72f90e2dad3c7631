#include "probsem/denotational.hpp"

#include <algorithm>

namespace probsem {

namespace {

class ConstExpectation final : public Expectation {
public:
  explicit ConstExpectation(Weight w) : w_(std::move(w)) {}

protected:
  Weight compute(const Store&) override { return w_; }

private:
  Weight w_;
};

class ExprExpectation final : public Expectation {
public:
  explicit ExprExpectation(ExprPtr e) : e_(std::move(e)) {}

protected:
  Weight compute(const Store& s) override {
    Int v = eval_expr(*e_, s);
    if (v < 0)
      throw EvalError("expectation of '" + expr_to_string(*e_) + "' is negative (" + v.get_str() +
                      ") at store " + s.str());
    return Weight(v, Int(1));
  }

private:
  ExprPtr e_;
};

class GuardExpectation final : public Expectation {
public:
  GuardExpectation(BoolExprPtr b, ExpectationPtr on_true, ExpectationPtr on_false)
      : b_(std::move(b)), t_(std::move(on_true)), f_(std::move(on_false)) {}

protected:
  Weight compute(const Store& s) override {
    return eval_bool(*b_, s) ? t_->eval(s) : f_->eval(s);
  }

private:
  BoolExprPtr b_;
  ExpectationPtr t_;
  ExpectationPtr f_;
};

class AssignExpectation final : public Expectation {
public:
  AssignExpectation(std::size_t var, ExprPtr e, ExpectationPtr after)
      : var_(var), e_(std::move(e)), after_(std::move(after)) {}

protected:
  Weight compute(const Store& s) override {
    return after_->eval(s.with(var_, eval_expr(*e_, s)));
  }

private:
  std::size_t var_;
  ExprPtr e_;
  ExpectationPtr after_;
};

class RAssignExpectation final : public Expectation {
public:
  RAssignExpectation(std::size_t var, DistSpecPtr d, ExpectationPtr after)
      : var_(var), d_(std::move(d)), after_(std::move(after)) {}

protected:
  Weight compute(const Store& s) override {
    Weight out;
    for (const auto& [value, p] : d_->entries()) out += p * after_->eval(s.with(var_, value));
    return out;
  }

private:
  std::size_t var_;
  DistSpecPtr d_;
  ExpectationPtr after_;
};

class WhileExpectation final : public Expectation {
public:
  WhileExpectation(BoolExprPtr b, StmtPtr body, ExpectationPtr after, EvalContextPtr ctx)
      : b_(std::move(b)), body_(std::move(body)), after_(std::move(after)), ctx_(std::move(ctx)) {
    chain_.push_back(constant_expectation(Weight()));  // F_0 = 0
  }

protected:
  Weight compute(const Store& s) override {
    // A false guard short-circuits every chain element past F_0, so the limit
    // is available exactly.
    if (!eval_bool(*b_, s)) return after_->eval(s);

    auto& stats = ctx_->stats;
    stats.any_loop = true;
    Weight prev;  // F_0(s) = 0
    Weight cur;
    Weight delta;
    unsigned long stable = 0;
    unsigned long used = 0;
    for (unsigned long k = 1; k <= ctx_->max_k; ++k) {
      cur = level(k)->eval(s);
      delta = Weight::abs_diff(cur, prev);
      used = k;
      stable = delta <= ctx_->tol ? stable + 1 : 0;
      if (stable >= ctx_->stable_window) break;
      prev = cur;
    }
    if (stable < ctx_->stable_window) stats.budget_exhausted = true;
    stats.max_iterations = std::max(stats.max_iterations, used);
    stats.last_delta = std::max(stats.last_delta, delta);
    return cur;
  }

private:
  // F_k = if b { [body](F_{k-1}) } else { after }, built lazily.
  ExpectationPtr level(unsigned long k) {
    while (chain_.size() <= k)
      chain_.push_back(
          guard_expectation(b_, transform(body_, chain_.back(), ctx_), after_));
    return chain_[k];
  }

  BoolExprPtr b_;
  StmtPtr body_;
  ExpectationPtr after_;
  EvalContextPtr ctx_;
  std::vector<ExpectationPtr> chain_;
};

}  // namespace

ExpectationPtr constant_expectation(Weight w) {
  return std::make_shared<ConstExpectation>(std::move(w));
}

ExpectationPtr expr_expectation(ExprPtr e) { return std::make_shared<ExprExpectation>(std::move(e)); }

ExpectationPtr guard_expectation(BoolExprPtr b, ExpectationPtr on_true, ExpectationPtr on_false) {
  return std::make_shared<GuardExpectation>(std::move(b), std::move(on_true), std::move(on_false));
}

ExpectationPtr transform(const StmtPtr& s, ExpectationPtr after, const EvalContextPtr& ctx) {
  if (std::holds_alternative<Stmt::Skip>(s->node)) return after;
  if (const auto* a = std::get_if<Stmt::Assign>(&s->node))
    return std::make_shared<AssignExpectation>(a->var, a->expr, std::move(after));
  if (const auto* r = std::get_if<Stmt::RAssign>(&s->node))
    return std::make_shared<RAssignExpectation>(r->var, r->dist, std::move(after));
  if (const auto* o = std::get_if<Stmt::Observe>(&s->node))
    return guard_expectation(o->cond, std::move(after), constant_expectation(Weight()));
  if (const auto* q = std::get_if<Stmt::Seq>(&s->node))
    return transform(q->first, transform(q->second, std::move(after), ctx), ctx);
  if (const auto* i = std::get_if<Stmt::If>(&s->node))
    return guard_expectation(i->cond, transform(i->then_branch, after, ctx),
                             transform(i->else_branch, after, ctx));
  const auto& w = std::get<Stmt::While>(s->node);
  return std::make_shared<WhileExpectation>(w.cond, w.body, std::move(after), ctx);
}

ExpectResult expect(const StmtPtr& s, ExpectationPtr after, const Store& s0, const Weight& tol,
                    unsigned long max_k, unsigned long stable_window) {
  if (tol.is_zero()) throw std::invalid_argument("tolerance must be positive");
  auto ctx = std::make_shared<EvalContext>();
  ctx->tol = tol;
  ctx->max_k = max_k;
  ctx->stable_window = std::max<unsigned long>(1, stable_window);

  ExpectationPtr tree = transform(s, std::move(after), ctx);
  ExpectResult r;
  r.value = tree->eval(s0);

  const auto& stats = ctx->stats;
  r.report.iterations_used = stats.max_iterations;
  r.report.sup_delta = stats.last_delta;
  r.report.mass_delta = stats.last_delta;
  r.report.budget_exhausted = stats.budget_exhausted;
  r.report.converged = !stats.budget_exhausted;
  r.report.exact = !stats.any_loop;
  return r;
}

NormalizedResult normalized_semantics(const Program& p, const Weight& tol, unsigned long max_k,
                                      unsigned long stable_window) {
  Store bottom(p.universe);  // all variables zero
  ExpectResult num =
      expect(p.body, expr_expectation(p.return_expr), bottom, tol, max_k, stable_window);
  ExpectResult den =
      expect(p.body, constant_expectation(Weight::one()), bottom, tol, max_k, stable_window);
  if (den.value.is_zero()) throw NormalizationUndefined(num.value, den.value);

  NormalizedResult out;
  out.value = num.value / den.value;
  out.numerator = num.value;
  out.denominator = den.value;
  out.numerator_report = num.report;
  out.denominator_report = den.report;
  return out;
}

StmtPtr unrolled_while(const BoolExprPtr& b, const StmtPtr& body, unsigned long k) {
  StmtPtr acc = make_observe(make_bool_lit(false));
  for (unsigned long i = 0; i < k; ++i)
    acc = make_if(b, make_seq(body, std::move(acc)), make_skip());
  return acc;
}

StmtPtr unroll_all_whiles(const StmtPtr& s, unsigned long k) {
  if (const auto* q = std::get_if<Stmt::Seq>(&s->node))
    return make_seq(unroll_all_whiles(q->first, k), unroll_all_whiles(q->second, k));
  if (const auto* i = std::get_if<Stmt::If>(&s->node))
    return make_if(i->cond, unroll_all_whiles(i->then_branch, k),
                   unroll_all_whiles(i->else_branch, k));
  if (const auto* w = std::get_if<Stmt::While>(&s->node))
    return unrolled_while(w->cond, unroll_all_whiles(w->body, k), k);
  return s;
}

}  // namespace probsem
