#pragma once

#include <cstdint>
#include <ostream>

namespace specflow {

enum class SelfcheckBudget { kSmall, kFull };

/// Runs every property suite deterministically from the seed and streams one
/// line per invariant: name, worst observed deviation, bound, PASS/FAIL.
/// Returns the number of violated invariants. The report body depends only on
/// the seed and budget.
int run_selfcheck(std::uint64_t seed, SelfcheckBudget budget, std::ostream& out);

}  // namespace specflow
