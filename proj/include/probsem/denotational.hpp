#pragma once

#include <map>
#include <memory>
#include <vector>

#include "probsem/report.hpp"
#include "probsem/store.hpp"
#include "probsem/syntax.hpp"

namespace probsem {

// Raised when the conditioned mass is zero, so the normalized value does not
// exist.
struct NormalizationUndefined : std::runtime_error {
  NormalizationUndefined(Weight num, Weight den)
      : std::runtime_error("normalization undefined: numerator " + num.str() +
                           ", denominator " + den.str()),
        numerator(std::move(num)),
        denominator(std::move(den)) {}
  Weight numerator;
  Weight denominator;
};

// Iteration budget for while loops plus the statistics the loops write back.
// One context is shared by a whole transformer tree.
struct EvalContext {
  Weight tol;
  unsigned long max_k = 10000;
  unsigned long stable_window = 8;

  struct {
    bool any_loop = false;
    unsigned long max_iterations = 0;
    Weight last_delta;
    bool budget_exhausted = false;
  } stats;
};

using EvalContextPtr = std::shared_ptr<EvalContext>;

// A map from stores to non-negative values, evaluated lazily and memoized per
// store. Subclasses define compute().
class Expectation {
public:
  virtual ~Expectation() = default;

  Weight eval(const Store& s) {
    auto it = memo_.find(s.values());
    if (it != memo_.end()) return it->second;
    Weight v = compute(s);
    memo_.emplace(s.values(), v);
    return v;
  }

protected:
  virtual Weight compute(const Store& s) = 0;

private:
  std::map<std::vector<Int>, Weight> memo_;
};

using ExpectationPtr = std::shared_ptr<Expectation>;

ExpectationPtr constant_expectation(Weight w);

// The value of e as an expectation; evaluating at a store where e is negative
// throws EvalError (values live in the non-negative reals).
ExpectationPtr expr_expectation(ExprPtr e);

// if [[b]]s then on_true(s) else on_false(s).
ExpectationPtr guard_expectation(BoolExprPtr b, ExpectationPtr on_true, ExpectationPtr on_false);

// The backward expectation transformer of s applied to `after`:
//   skip        -> after
//   x := E      -> after(s[x -> E(s)])
//   x ~ psi     -> sum_z psi(z) * after(s[x -> z])
//   observe(B)  -> B ? after : 0
//   S1; S2      -> [S1]([S2](after))
//   if/while    -> guard / limit of the loop chain F_0 = 0,
//                  F_{k+1} = B ? [body](F_k) : after
// While nodes iterate their chain per queried store under ctx's budget,
// stopping when the value change stays within tol for stable_window
// consecutive levels and recording what they did in ctx->stats.
ExpectationPtr transform(const StmtPtr& s, ExpectationPtr after, const EvalContextPtr& ctx);

struct ExpectResult {
  Weight value;
  ConvergenceReport report;
};

// [[s]](after) evaluated at s0 under the given loop budget. The report is
// exact for evaluations that never had to iterate a loop.
ExpectResult expect(const StmtPtr& s, ExpectationPtr after, const Store& s0, const Weight& tol,
                    unsigned long max_k, unsigned long stable_window = 8);

struct NormalizedResult {
  Weight value;
  Weight numerator;    // [[body]](return expression) at the all-zero store
  Weight denominator;  // [[body]](1) at the all-zero store
  ConvergenceReport numerator_report;
  ConvergenceReport denominator_report;
};

// Normalized program semantics: numerator / denominator as above. Throws
// NormalizationUndefined when the denominator is zero.
NormalizedResult normalized_semantics(const Program& p, const Weight& tol, unsigned long max_k,
                                      unsigned long stable_window = 8);

// Syntactic loop unrolling: 0 levels is observe(false); k+1 levels is
// if b { body; <k levels> } else { skip }. Its transformer equals the k-th
// element of the while chain.
StmtPtr unrolled_while(const BoolExprPtr& b, const StmtPtr& body, unsigned long k);

// Replaces every while in s by its k-level unrolling (innermost included).
StmtPtr unroll_all_whiles(const StmtPtr& s, unsigned long k);

}  // namespace probsem
