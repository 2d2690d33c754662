#include "qdc/relax.hpp"

#include <algorithm>
#include <stdexcept>

namespace qdc {

namespace {

constexpr size_t kMaxKeyVariants = 64;

void check_fd(const Relation& rel, const Rule& fd) {
  if (!fd.is_fd()) throw std::runtime_error("rule " + fd.id + " is not an FD");
  if (fd.relation != rel.name())
    throw std::runtime_error("rule " + fd.id + " is not bound to relation '" +
                             rel.name() + "'");
  for (const auto& a : fd.attributes()) rel.col_index(a);
}

// Concrete values a cell can contribute to a match set: the counting value
// plus, for uncertain cells, every concrete candidate.
std::vector<Value> cell_values(const Cell& c) {
  std::vector<Value> out;
  if (c.is_certain()) {
    if (!c.value().is_null()) out.push_back(c.value());
    return out;
  }
  if (c.original() && !c.original()->is_null()) out.push_back(*c.original());
  for (const auto& cand : c.candidates())
    if (!cand.value.is_range && !cand.value.value.is_null())
      out.push_back(cand.value.value);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Cartesian expansion of per-attribute values into composite keys, capped.
std::vector<std::vector<Value>> key_variants(const Tuple& t,
                                             const std::vector<size_t>& cols) {
  std::vector<std::vector<Value>> keys{{}};
  for (size_t c : cols) {
    std::vector<Value> vals = cell_values(t.cells[c]);
    if (vals.empty()) return {};  // null never participates
    std::vector<std::vector<Value>> next;
    for (const auto& k : keys) {
      for (const auto& v : vals) {
        std::vector<Value> nk = k;
        nk.push_back(v);
        next.push_back(std::move(nk));
        if (next.size() >= kMaxKeyVariants) break;
      }
      if (next.size() >= kMaxKeyVariants) break;
    }
    keys = std::move(next);
  }
  return keys;
}

}  // namespace

RelaxationResult relax_fd(const Relation& rel, const std::set<TupleId>& answer,
                          const Rule& fd) {
  check_fd(rel, fd);
  std::vector<size_t> lhs_cols;
  for (const auto& a : fd.fd().lhs) lhs_cols.push_back(rel.col_index(a));
  std::vector<size_t> rhs_cols{rel.col_index(fd.fd().rhs)};

  RelaxationResult res;
  std::set<TupleId> in_answer = answer;
  std::vector<const Tuple*> unvisited;
  for (const auto& t : rel.tuples())
    if (!in_answer.count(t.tid)) unvisited.push_back(&t);

  if (unvisited.empty()) {
    res.added.push_back({0, 0});
    return res;
  }

  auto collect_keys = [&](const std::vector<size_t>& cols) {
    std::set<std::vector<Value>> keys;
    for (const auto& t : rel.tuples())
      if (in_answer.count(t.tid))
        for (auto& k : key_variants(t, cols)) keys.insert(std::move(k));
    return keys;
  };
  auto matches = [&](const Tuple& t, const std::vector<size_t>& cols,
                     const std::set<std::vector<Value>>& keys) {
    for (const auto& k : key_variants(t, cols))
      if (keys.count(k)) return true;
    return false;
  };

  res.iterations = 0;
  while (true) {
    ++res.iterations;
    // Snapshot of the growing answer's value sets for this iteration.
    std::set<std::vector<Value>> a_lhs = collect_keys(lhs_cols);
    std::set<std::vector<Value>> a_rhs = collect_keys(rhs_cols);

    size_t lhs_added = 0, rhs_added = 0;
    std::vector<const Tuple*> rest;
    for (const Tuple* t : unvisited) {
      if (matches(*t, lhs_cols, a_lhs)) {
        in_answer.insert(t->tid);
        res.extra.insert(t->tid);
        ++lhs_added;
      } else {
        rest.push_back(t);
      }
    }
    unvisited = std::move(rest);
    rest.clear();
    for (const Tuple* t : unvisited) {
      if (matches(*t, rhs_cols, a_rhs)) {
        in_answer.insert(t->tid);
        res.extra.insert(t->tid);
        ++rhs_added;
      } else {
        rest.push_back(t);
      }
    }
    unvisited = std::move(rest);
    res.added.push_back({lhs_added, rhs_added});
    // The loop continues only while the rhs step keeps feeding the answer;
    // a dry rhs step means the correlated cluster is complete.
    if (rhs_added == 0 || unvisited.empty()) break;
  }
  return res;
}

double extra_iteration_probability(uint64_t n, uint64_t num_vio, uint64_t ar) {
  if (ar > n) throw std::invalid_argument("relaxed answer larger than dataset");
  if (num_vio > n) throw std::invalid_argument("violations exceed dataset size");
  if (num_vio == 0) return 0.0;
  if (ar + num_vio > n) return 1.0;  // C(n-num_vio, ar) = 0
  double ratio = 1.0;
  for (uint64_t i = 0; i < ar; ++i)
    ratio *= static_cast<double>(n - num_vio - i) / static_cast<double>(n - i);
  return 1.0 - ratio;
}

uint64_t relaxed_size_upper_bound(
    const std::vector<std::string>& fd_attrs,
    const std::map<std::string, std::map<Value, uint64_t>>& dataset_freq,
    const std::map<std::string, std::map<Value, uint64_t>>& result_freq) {
  uint64_t bound = 0;
  for (const auto& attr : fd_attrs) {
    auto rq = result_freq.find(attr);
    if (rq == result_freq.end()) continue;
    auto d = dataset_freq.find(attr);
    for (const auto& [v, cq] : rq->second) {
      if (d == dataset_freq.end() || !d->second.count(v) ||
          d->second.at(v) < cq)
        throw std::runtime_error(
            "inconsistent statistics: result value missing from dataset "
            "frequencies for attribute '" +
            attr + "'");
      bound += d->second.at(v) - cq;
    }
  }
  return bound;
}

ViolationSet detect_fd_violations(const Relation& rel,
                                  const std::set<TupleId>& scope,
                                  const Rule& fd) {
  check_fd(rel, fd);
  ViolationSet vs;
  vs.rule_id = fd.id;
  std::vector<size_t> lhs_cols;
  for (const auto& a : fd.fd().lhs) lhs_cols.push_back(rel.col_index(a));
  size_t rhs_col = rel.col_index(fd.fd().rhs);

  const std::set<TupleId>* checked = nullptr;
  auto it = rel.checked().fd_checked.find(fd.id);
  if (it != rel.checked().fd_checked.end()) checked = &it->second;

  std::map<std::vector<Value>, std::map<Value, std::set<TupleId>>> groups;
  for (TupleId tid : scope) {
    if (checked && checked->count(tid)) continue;
    const Tuple* t = rel.find(tid);
    if (t == nullptr)
      throw std::runtime_error("scope tuple " + std::to_string(tid) +
                               " not in relation");
    Value rhs = t->cells[rhs_col].counting_value();
    if (rhs.is_null()) continue;
    std::vector<Value> key;
    bool null_key = false;
    for (size_t c : lhs_cols) {
      Value v = t->cells[c].counting_value();
      if (v.is_null()) null_key = true;
      key.push_back(std::move(v));
    }
    if (null_key) continue;
    groups[key][rhs].insert(tid);
  }
  for (auto& [key, rhs_groups] : groups) {
    if (rhs_groups.size() < 2) continue;
    FdViolationGroup g;
    g.lhs_key = key;
    g.rhs_groups = rhs_groups;
    vs.fd_groups.push_back(std::move(g));
  }
  return vs;
}

}  // namespace qdc
