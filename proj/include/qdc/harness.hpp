#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>

#include "qdc/relation.hpp"
#include "qdc/rules.hpp"

namespace qdc {

// (tid, attr) -> value before the injected edit.
using GroundTruth = std::map<std::pair<TupleId, std::string>, Value>;

// Injects rhs errors for an FD rule: per lhs group, ceil(rate * group size)
// tuples get their rhs value replaced by another value drawn uniformly from
// the relation's rhs domain. Deterministic for a fixed seed. Editing an
// already-edited cell keeps the original value in the ground truth.
GroundTruth gen_errors(Relation* rel, const Rule& fd, double rate,
                       uint64_t seed);

struct Score {
  double precision = 0.0;  // correct updates / total updates
  double recall = 0.0;     // correct updates / total errors
  double f1 = 0.0;
  uint64_t updates = 0;
  uint64_t correct = 0;
  uint64_t errors = 0;
};

// An updated cell counts correct when its most probable candidate equals
// the ground-truth value (the pre-edit original for undamaged cells). No
// updates at all reports precision 0.
Score score(const Relation& cleaned, const GroundTruth& truth);

}  // namespace qdc
