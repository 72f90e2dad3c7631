#pragma once

#include "probsem/pcfg.hpp"
#include "probsem/syntax.hpp"

namespace probsem {

// Structured-to-graph translation.
//
//   atomic S          two fresh nodes: start labeled S, end unlabeled
//   S1 ; S2           disjoint union; end(S1) becomes a Skip wired to start(S2)
//   if B {S1}else{S2} fresh Branch (true -> start(S1), false -> start(S2)) and
//                     fresh end; both sub-ends become Skips wired to the end
//   while B {S}       fresh end and fresh Branch (true -> start(S),
//                     false -> end); end(S) becomes a Skip wired back to the
//                     Branch
//
// Sub-translations keep disjoint node sets, so the node count obeys
//   count(atomic) = 2,  count(seq) = sum,  count(if/while) = sum + 2.
Pcfg translate_stmt(const StmtPtr& s, const UniversePtr& u);

// translate_stmt on the body, with the end node labeled Return(return_expr).
Pcfg translate_program(const Program& p);

}  // namespace probsem
