#include "qdc/cost.hpp"

#include <set>

namespace qdc {

const char* strategy_name(Strategy s) {
  return s == Strategy::Incremental ? "incremental" : "full-remaining";
}

CostStats precompute_stats(const Relation& rel, const Rule& fd) {
  CostStats stats;
  stats.n = rel.tuples().size();
  const FdBody& body = fd.fd();
  std::vector<size_t> lhs_cols;
  for (const auto& a : body.lhs) lhs_cols.push_back(rel.col_index(a));
  size_t rhs_col = rel.col_index(body.rhs);

  // lhs key (single-attribute histogram uses the value itself; composite
  // keys collapse to the first attribute for histogram purposes, while the
  // dirtiness scan uses the full key).
  std::map<std::vector<Value>, std::map<Value, uint64_t>> groups;
  for (const auto& t : rel.tuples()) {
    std::vector<Value> key;
    bool null_key = false;
    for (size_t c : lhs_cols) {
      Value v = t.cells[c].counting_value();
      if (v.is_null()) null_key = true;
      key.push_back(std::move(v));
    }
    if (null_key) continue;
    Value rhs = t.cells[rhs_col].counting_value();
    groups[key][rhs]++;
    stats.lhs_hist[key.front()]++;
    if (!rhs.is_null()) stats.rhs_hist[rhs]++;
  }

  uint64_t dirty_groups = 0;
  uint64_t cand_total = 0;
  for (const auto& [key, rhs_counts] : groups) {
    uint64_t size = 0;
    for (const auto& [v, c] : rhs_counts) size += c;
    if (rhs_counts.size() >= 2) {
      stats.eps += static_cast<double>(size);
      ++dirty_groups;
      cand_total += rhs_counts.size();
    }
  }
  if (dirty_groups > 0)
    stats.p = static_cast<double>(cand_total) / static_cast<double>(dirty_groups);
  return stats;
}

double cost_incremental(const CostStats& stats, uint64_t q_i, uint64_t e_i,
                        double eps_i, double d_i) {
  double n = static_cast<double>(stats.n);
  double seen = static_cast<double>(stats.sum_q);
  double relax = n - seen;
  if (relax < 0) relax = 0;
  double repair = eps_i * static_cast<double>(q_i + e_i);
  double update = 0.0;
  if (eps_i > 0) {
    double scan = n - stats.sum_eps;
    if (scan < 0) scan = 0;
    update = scan + stats.sum_eps * stats.p + eps_i * stats.p;
  }
  return relax + d_i + repair + update;
}

double cost_offline(const CostStats& stats, uint64_t queries) {
  double n = static_cast<double>(stats.n);
  return static_cast<double>(queries) * n + n + stats.eps * n + n +
         stats.eps * stats.p;
}

Strategy cost_compare(const CostStats& stats, double candidate_incremental,
                      uint64_t queries) {
  double incremental = stats.cum_incremental + candidate_incremental;
  double offline = cost_offline(stats, queries);
  return incremental <= offline ? Strategy::Incremental
                                : Strategy::FullRemaining;
}

void update_stats(CostStats* stats, uint64_t q_i, double eps_i, double cost_i) {
  stats->queries += 1;
  stats->sum_q += q_i;
  stats->sum_eps += eps_i;
  stats->cum_incremental += cost_i;
}

}  // namespace qdc
