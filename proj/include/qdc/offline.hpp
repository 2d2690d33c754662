#pragma once

#include <vector>

#include "qdc/relation.hpp"
#include "qdc/rules.hpp"
#include "qdc/store.hpp"

namespace qdc {

// Full-cleaning reference: per FD a single whole-relation group-by feeding
// the per-error candidate computation (which deliberately re-traverses the
// dataset per violation group), per DC an upper-diagonal sweep. Fixes are
// merged across rules; every tuple/region ends up checked. Already-checked
// tuples and regions are skipped, so running over a partially cleaned
// relation completes the remaining dirty part.
std::vector<ChangeLogEntry> offline_clean(Relation* rel,
                                          const std::vector<Rule>& rules,
                                          int partitions = 64);

}  // namespace qdc
