#include "qdc/harness.hpp"

#include <set>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

namespace qdc {

GroundTruth gen_errors(Relation* rel, const Rule& fd, double rate,
                       uint64_t seed) {
  if (!fd.is_fd()) throw std::invalid_argument("gen_errors requires an FD");
  if (!(rate > 0.0 && rate <= 1.0))
    throw std::invalid_argument("rate must be in (0,1]");
  const FdBody& body = fd.fd();
  std::vector<size_t> lhs_cols;
  for (const auto& a : body.lhs) lhs_cols.push_back(rel->col_index(a));
  size_t rhs_col = rel->col_index(body.rhs);

  std::map<std::vector<Value>, std::vector<TupleId>> groups;
  std::vector<Value> domain;
  for (const auto& t : rel->tuples()) {
    std::vector<Value> key;
    for (size_t c : lhs_cols) key.push_back(t.cells[c].counting_value());
    groups[key].push_back(t.tid);
    Value rhs = t.cells[rhs_col].counting_value();
    if (!rhs.is_null()) domain.push_back(rhs);
  }
  std::sort(domain.begin(), domain.end());
  domain.erase(std::unique(domain.begin(), domain.end()), domain.end());
  if (domain.size() < 2)
    throw std::invalid_argument("rhs domain too small to inject errors");

  std::mt19937_64 rng(seed);
  GroundTruth truth;
  for (auto& [key, tids] : groups) {
    uint64_t edits = static_cast<uint64_t>(
        std::ceil(rate * static_cast<double>(tids.size())));
    std::vector<TupleId> pool = tids;
    for (uint64_t e = 0; e < edits && !pool.empty(); ++e) {
      std::uniform_int_distribution<size_t> pick(0, pool.size() - 1);
      size_t idx = pick(rng);
      TupleId tid = pool[idx];
      pool.erase(pool.begin() + idx);
      Tuple* t = rel->find(tid);
      Value current = t->cells[rhs_col].counting_value();
      Value replacement = current;
      std::uniform_int_distribution<size_t> dpick(0, domain.size() - 1);
      while (replacement.equals(current)) replacement = domain[dpick(rng)];
      auto key2 = std::make_pair(tid, body.rhs);
      if (!truth.count(key2)) truth[key2] = current;
      t->cells[rhs_col] = Cell(replacement);
    }
  }
  return truth;
}

Score score(const Relation& cleaned, const GroundTruth& truth) {
  Score s;
  s.errors = truth.size();
  // Updates are scored on the attributes errors were planted in; repairs
  // that spill onto other attributes have no ground truth to judge them by.
  std::set<std::string> scored_attrs;
  for (const auto& [key, val] : truth) scored_attrs.insert(key.second);
  uint64_t correct_total = 0;   // all correct updates (precision)
  uint64_t correct_errors = 0;  // correct updates on injected errors (recall)
  for (const auto& t : cleaned.tuples()) {
    for (size_t c = 0; c < t.cells.size(); ++c) {
      const Cell& cell = t.cells[c];
      if (cell.is_certain()) continue;
      const std::string& attr = cleaned.schema()[c].name;
      if (!scored_attrs.count(attr)) continue;
      ++s.updates;
      auto it = truth.find({t.tid, attr});
      Value want;
      if (it != truth.end())
        want = it->second;
      else if (cell.original())
        want = *cell.original();
      else
        continue;
      Value got = most_probable(cell);
      if (got.equals(want)) {
        ++correct_total;
        if (it != truth.end()) ++correct_errors;
      }
    }
  }
  s.correct = correct_total;
  if (s.updates > 0)
    s.precision =
        static_cast<double>(correct_total) / static_cast<double>(s.updates);
  if (s.errors > 0)
    s.recall =
        static_cast<double>(correct_errors) / static_cast<double>(s.errors);
  if (s.precision + s.recall > 0)
    s.f1 = 2 * s.precision * s.recall / (s.precision + s.recall);
  return s;
}

}  // namespace qdc
