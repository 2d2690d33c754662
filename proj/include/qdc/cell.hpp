#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "qdc/value.hpp"

namespace qdc {

using TupleId = uint64_t;

enum class RangeOp { Lt, Le, Gt, Ge };

const char* range_op_name(RangeOp op);
RangeOp range_op_from_name(const std::string& s);

// A candidate value: either a concrete value or a half-open numeric range
// such as (<2000), produced by inverting a denial-constraint atom.
struct CandidateValue {
  bool is_range = false;
  Value value;   // concrete value, or range bound
  RangeOp op = RangeOp::Lt;

  static CandidateValue concrete(Value v) {
    CandidateValue c;
    c.value = std::move(v);
    return c;
  }
  static CandidateValue range(RangeOp op, Value bound);

  bool operator<(const CandidateValue& o) const;
  bool operator==(const CandidateValue& o) const {
    return !(*this < o) && !(o < *this);
  }
  std::string to_string() const;
};

struct Candidate {
  CandidateValue value;
  double prob = 1.0;           // in (0,1]
  std::string pair_id;         // world-group identifier "{tid}:{rule}:{side}"
  std::set<TupleId> provenance;  // conflicting tuples that induced this fix
};

// A cell is either a certain scalar or a set of probabilistic candidates.
// Candidates are grouped by pair_id; within each group the probabilities
// sum to 1. Repaired cells keep their pre-repair value for frequency
// counting and provenance.
class Cell {
 public:
  Cell() = default;
  explicit Cell(Value v) : certain_(std::move(v)) {}

  bool is_certain() const { return cands_.empty(); }
  const Value& value() const { return certain_; }
  const std::vector<Candidate>& candidates() const { return cands_; }
  const std::optional<Value>& original() const { return original_; }

  // Value used for grouping and frequency counts: the pre-repair original
  // when present, the certain value otherwise, else the most probable
  // concrete candidate.
  Value counting_value() const;

  void set_uncertain(std::vector<Candidate> cands, std::optional<Value> orig);

  // Sorted list of distinct pair_ids.
  std::vector<std::string> pair_ids() const;

  // Checks prob sums per pair group and candidate well-formedness;
  // throws std::runtime_error on violation.
  void validate() const;

  bool operator==(const Cell& o) const;

 private:
  Value certain_;
  std::optional<Value> original_;
  std::vector<Candidate> cands_;  // sorted by (pair_id, value)
};

// "Output a tuple iff at least one candidate value qualifies": a certain
// cell qualifies iff (v op literal); an uncertain cell qualifies iff any
// concrete candidate satisfies the predicate or any range candidate's
// value set intersects the set satisfying (x op literal).
bool cell_qualifies(const Cell& cell, CmpOp op, const Value& literal);

// Join-key overlap: true iff the candidate value sets of the two cells
// intersect (certain cells are singletons, ranges are intervals).
bool keys_overlap(const Cell& a, const Cell& b);

// The concrete candidate with maximum probability within the
// lexicographically smallest pair group (ties broken by value order).
Value most_probable(const Cell& cell);

}  // namespace qdc
