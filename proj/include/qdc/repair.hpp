#pragma once

#include <map>
#include <string>
#include <vector>

#include "qdc/relax.hpp"
#include "qdc/relation.hpp"
#include "qdc/rules.hpp"

namespace qdc {

// Replacement candidates for one (tuple, attribute) cell. A fix may carry
// several pair groups; candidates are tagged with their group's pair_id.
struct CellFix {
  TupleId tid = 0;
  std::string attr;
  std::vector<Candidate> candidates;
};

struct FixSet {
  std::vector<CellFix> fixes;

  bool empty() const { return fixes.empty(); }
  void add(CellFix f);  // merges into an existing entry for the same cell
};

// Correlated tuples backing the frequency counts of one FD violation group:
// every tuple sharing the group's lhs value, and for each distinct member
// rhs value every tuple sharing it. Frequencies use pre-repair values.
struct FdCorrelated {
  std::vector<TupleId> lhs_sharers;
  std::map<Value, std::vector<TupleId>> rhs_sharers;
};

FdCorrelated gather_fd_correlated(const Relation& rel,
                                  const FdViolationGroup& group,
                                  const Rule& fd);

// Same contract for many groups with a single pass over the relation,
// indexing lhs keys and rhs values once instead of re-scanning per group.
std::vector<FdCorrelated> gather_fd_correlated_batch(
    const Relation& rel, const std::vector<FdViolationGroup>& groups,
    const Rule& fd);

// Frequency-based candidate fixes for an FD violation group: each member
// gets an rhs pair group (candidates = rhs values sharing its lhs, votes
// counted per tuple) and, when its rhs co-occurs with other lhs values, an
// lhs pair group. Cells whose sole candidate equals the current value stay
// certain.
FixSet fd_fixes(const Relation& rel, const FdViolationGroup& group,
                const FdCorrelated& correlated, const Rule& fd);

// Range fixes for a violating pair: each tuple's participating attribute
// gets a pair group {original value, half-open range inverting its atom},
// uniform over the alternatives.
FixSet dc_fixes(const Relation& rel, const DcViolation& vio, const Rule& dc);

// Every non-empty subset of the violated atoms, each mapped to the FixSet
// inverting exactly those atoms. Emitted for a downstream solver; no solver
// is invoked here.
std::vector<FixSet> multi_atom_combinations(const Relation& rel,
                                            const DcViolation& vio,
                                            const Rule& dc,
                                            const std::vector<int>& atoms);

// Merges an incoming fix into a cell: pair groups of the same side sharing
// a candidate value coalesce (witness sets unioned, probabilities
// recomputed over the union), others are kept as distinct groups. The
// result is order-independent.
Cell merge_fixes(const Cell& existing, const CellFix& incoming);

}  // namespace qdc
