#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "qdc/relation.hpp"
#include "qdc/rules.hpp"

namespace qdc {

enum class Strategy { Incremental, FullRemaining };

const char* strategy_name(Strategy s);

// Per relation+rule statistics backing the cleaning cost model. The
// histograms and the error/candidate estimates come from a one-off group-by
// precomputation; the cumulative sums accrue per executed query.
struct CostStats {
  uint64_t n = 0;
  std::map<Value, uint64_t> lhs_hist;  // lhs value -> group size
  std::map<Value, uint64_t> rhs_hist;  // rhs value -> group size
  double eps = 0.0;   // estimated violating tuples in the relation
  double p = 0.0;     // mean candidate-set size over dirty groups
  uint64_t queries = 0;
  uint64_t sum_q = 0;        // result sizes seen so far
  double sum_eps = 0.0;      // detected errors so far
  double cum_incremental = 0.0;
};

// Builds the histograms and the (eps, p) estimates for an FD rule with a
// single group-by pass over the relation.
CostStats precompute_stats(const Relation& rel, const Rule& fd);

// Cost of cleaning query i incrementally: relaxation over the unseen part,
// detection d_i, repair over the relaxed result, and the in-place update.
// q_i is the result size, e_i the relaxation extra, eps_i the detected
// errors, d_i the detection term (q_i + e_i for FDs, examined matrix cells
// for DCs).
double cost_incremental(const CostStats& stats, uint64_t q_i, uint64_t e_i,
                        double eps_i, double d_i);

// Cost of the offline alternative after `queries` executed queries: the
// queries run over the raw data plus one full cleaning pass.
double cost_offline(const CostStats& stats, uint64_t queries);

// Cumulative comparison: the incremental side is cum_incremental plus the
// candidate cost of the current query, the offline side assumes `queries`
// total queries. Ties favor Incremental.
Strategy cost_compare(const CostStats& stats, double candidate_incremental,
                      uint64_t queries);

// Accrues one executed query into the cumulative sums.
void update_stats(CostStats* stats, uint64_t q_i, double eps_i,
                  double cost_i);

}  // namespace qdc
