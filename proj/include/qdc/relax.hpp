#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "qdc/relation.hpp"
#include "qdc/rules.hpp"

namespace qdc {

struct RelaxationResult {
  std::set<TupleId> extra;  // correlated tuples outside the original answer
  int iterations = 1;
  // (lhs-step, rhs-step) addition counts per iteration.
  std::vector<std::pair<size_t, size_t>> added;

  size_t rhs_step_total() const {
    size_t s = 0;
    for (const auto& [l, r] : added) s += r;
    return s;
  }
};

struct FdViolationGroup {
  std::vector<Value> lhs_key;
  // rhs value -> tuples carrying it (>= 2 distinct rhs values).
  std::map<Value, std::set<TupleId>> rhs_groups;

  std::set<TupleId> members() const {
    std::set<TupleId> out;
    for (const auto& [v, tids] : rhs_groups) out.insert(tids.begin(), tids.end());
    return out;
  }
};

// A violating pair under a DC: assigning `first` to t1 and `second` to t2
// satisfies every atom of the (negated) conjunction.
struct DcViolation {
  TupleId first = 0;
  TupleId second = 0;
  std::vector<int> atoms;  // indices of the satisfied atoms (all of them)

  bool operator<(const DcViolation& o) const {
    if (first != o.first) return first < o.first;
    return second < o.second;
  }
  bool operator==(const DcViolation& o) const {
    return first == o.first && second == o.second;
  }
};

struct ViolationSet {
  std::string rule_id;
  std::vector<FdViolationGroup> fd_groups;
  std::vector<DcViolation> dc_pairs;

  bool empty() const { return fd_groups.empty() && dc_pairs.empty(); }
};

// Query-result relaxation for FDs: iteratively augments the answer with
// unvisited tuples sharing a lhs value with it, then with those sharing a
// rhs value, until the rhs step adds nothing. Uncertain cells match on any
// concrete candidate.
RelaxationResult relax_fd(const Relation& rel, const std::set<TupleId>& answer,
                          const Rule& fd);

// Probability that a maximal relaxed answer of size `ar` drawn from `n`
// tuples containing `num_vio` violations holds at least one violation
// (hypergeometric): 1 - C(n-num_vio, ar) / C(n, ar).
double extra_iteration_probability(uint64_t n, uint64_t num_vio, uint64_t ar);

// Worst-case relaxed result size: sum over rule attributes of
// (dataset frequency - result frequency), over values present in the result.
uint64_t relaxed_size_upper_bound(
    const std::vector<std::string>& fd_attrs,
    const std::map<std::string, std::map<Value, uint64_t>>& dataset_freq,
    const std::map<std::string, std::map<Value, uint64_t>>& result_freq);

// Hash-groups the scope by the FD's lhs; groups with >= 2 distinct rhs
// values are violations. Tuples already checked for this rule are skipped.
ViolationSet detect_fd_violations(const Relation& rel,
                                  const std::set<TupleId>& scope,
                                  const Rule& fd);

}  // namespace qdc
