#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "qdc/relation.hpp"
#include "qdc/relax.hpp"
#include "qdc/rules.hpp"

namespace qdc {

// One axis interval of the partitioned cartesian-product matrix, with the
// observed value ranges of every numeric attribute the DC touches.
struct PartitionBucket {
  double axis_lo = 0.0;
  double axis_hi = 0.0;
  std::vector<TupleId> tids;
  // attr -> (min, max) over the bucket's tuples.
  std::map<std::string, std::pair<double, double>> ranges;
};

// Partitioned cartesian-product matrix for a DC. Only upper-diagonal
// coordinates (row <= col) are ever stored or checked.
struct ThetaMatrix {
  std::string rule_id;
  int k = 1;  // sqrt(p): axis intervals per dimension
  std::string axis_attr;
  double axis_min = 0.0;
  double axis_max = 0.0;
  std::vector<PartitionBucket> buckets;
  std::set<std::pair<int, int>> checked;
  // Estimated violation counts per non-diagonal upper partition pair.
  std::map<std::pair<int, int>, uint64_t> range_vio;

  int partitions() const { return k * k; }
  size_t upper_diagonal_count() const {
    return static_cast<size_t>(k) * (k + 1) / 2;
  }
  // Axis bucket index for a value (clamped to [0, k)).
  int bucket_of(double v) const;
};

// Value range over the matrix ordering attribute.
struct Region {
  double lo;
  double hi;
};

// Sorts tuples by the DC's first inequality attribute and splits the value
// range into sqrt(p) uniform (equal-width) intervals per axis.
ThetaMatrix build_theta_matrix(const Relation& rel, const Rule& dc, int p);

// Incremental theta-join: examines only unchecked upper-diagonal partitions
// intersecting the query region, prunes partitions whose boundary ranges
// cannot satisfy the DC atoms and intra-partition tuples outside the
// qualifying sub-range, marks examined coordinates checked, and returns the
// violating pairs. Re-running on the same region returns nothing.
ViolationSet partial_theta_join(ThetaMatrix& matrix, const Relation& rel,
                                Region region, const Rule& dc);

// Boundary-overlap violation estimates for every non-diagonal upper pair of
// partition ranges (diagonal partitions have equivalent ranges and are
// excluded). Fills matrix.range_vio.
void estimate_errors(ThetaMatrix& matrix, const Relation& rel, const Rule& dc);

struct AccuracyEstimate {
  double accuracy = 0.0;  // errors / (result_size + errors), literal
  double support = 0.0;   // checked fraction of upper-diagonal partitions
  uint64_t errors = 0;
};

// Estimated result accuracy: errors come from partitions whose row and
// column are both strictly smaller or both strictly larger than the result
// range; support is the checked fraction of the upper-diagonal partitions.
AccuracyEstimate estimate_accuracy(const ThetaMatrix& matrix,
                                   uint64_t result_size, int result_range);

}  // namespace qdc
