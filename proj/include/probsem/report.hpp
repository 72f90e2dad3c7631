#pragma once

#include <json.hpp>

#include "probsem/rational.hpp"

namespace probsem {

// How an iterative (Kleene) evaluation ended. iterations_used is the index k
// of the returned iterate; sup_delta and mass_delta compare it against the
// k-1 iterate. Produced by both the graph engine and the structured
// expectation evaluator (the latter iterates scalars, so both deltas coincide
// there).
struct ConvergenceReport {
  unsigned long iterations_used = 0;
  Weight sup_delta;
  Weight mass_delta;
  bool converged = false;
  bool budget_exhausted = false;
  // The returned value is provably the limit, not an approximation.
  bool exact = false;
};

nlohmann::ordered_json report_to_json(const ConvergenceReport& r);

}  // namespace probsem
