#pragma once

#include <cstdint>
#include <optional>

#include <json.hpp>

#include "probsem/denotational.hpp"
#include "probsem/fixpoint.hpp"
#include "probsem/store_dist.hpp"

namespace probsem {

// Both sides of the pairing identity
//   sum_s [[S]](F)(s) * D(s)  =  sum_s' F(s') * D'(s'),
// with F the post-expectation and D' the graph transformer applied to D.
struct AdequacyResult {
  Weight lhs;
  Weight rhs;
  Weight abs_diff;
  bool both_converged = false;
  bool exact = false;  // both sides certified exact, so lhs must equal rhs
  ConvergenceReport expect_report;  // structured side
  ConvergenceReport dist_report;    // graph side
};

AdequacyResult check_adequacy(const StmtPtr& stmt, const ExpectationPtr& f_after, const Dist& d,
                              const Weight& tol, unsigned long max_k);

// The pre-expectation value at s0 recovered purely from the graph side:
// translate, push the point mass at s0 through the transformer limit, pair
// with f_after. Agrees with expect(stmt, f_after, s0).
Weight retrieve_expectation(const StmtPtr& stmt, const ExpectationPtr& f_after, const Store& s0,
                            const Weight& tol, unsigned long max_k);

// ---------------------------------------------------------------------------
// Monte-Carlo forward sampler
// ---------------------------------------------------------------------------

// splitmix64: the run i generator is seeded with
// mix(seed XOR golden*(i+1)), so each run has its own reproducible stream.
class SplitMix64 {
public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

private:
  std::uint64_t state_;
};

struct SampleReport {
  unsigned long n_total = 0;
  unsigned long n_accepted = 0;
  unsigned long n_rejected_observe = 0;
  unsigned long n_step_bound_hit = 0;
  // End-store frequencies over accepted runs, weighted by 1/n_total, so the
  // mass equals n_accepted/n_total.
  Dist empirical_end_dist;
  // Mean return value over accepted runs; return values may be negative, so
  // this is a signed rational. Empty when no run was accepted.
  std::optional<mpq_class> empirical_normalized_expectation;
  std::uint64_t seed = 0;
  unsigned long step_bound = 0;

  Weight acceptance_rate() const {
    return n_total ? Weight(Int(n_accepted), Int(n_total)) : Weight();
  }
};

nlohmann::ordered_json sample_report_to_json(const SampleReport& r);

// n forward simulations from the all-zero store. Assignments execute, random
// assignments draw from their literal distribution, a failed observe rejects
// the run, and runs exceeding step_bound statement executions count as
// nonterminating. Deterministic for a fixed seed.
SampleReport sample_program(const Program& p, unsigned long n, std::uint64_t seed,
                            unsigned long step_bound = 100000);

}  // namespace probsem
