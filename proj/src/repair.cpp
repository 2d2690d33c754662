#include "qdc/repair.hpp"

#include <algorithm>
#include <stdexcept>

namespace qdc {

namespace {

std::string pair_id_for(TupleId tid, const std::string& rule_id,
                        const std::string& side) {
  return std::to_string(tid) + ":" + rule_id + ":" + side;
}

std::string side_of(const std::string& pair_id) {
  auto pos = pair_id.rfind(':');
  return pos == std::string::npos ? pair_id : pair_id.substr(pos + 1);
}

Value counting(const Relation& rel, TupleId tid, size_t col) {
  const Tuple* t = rel.find(tid);
  if (t == nullptr)
    throw std::runtime_error("unknown tuple " + std::to_string(tid));
  const Cell& c = t->cells[col];
  if (c.is_certain() && c.value().is_null()) return Value();
  return c.counting_value();
}

RangeOp invert_strict(CmpOp t1_cond) {
  // A violating value satisfies `v cond other`; the candidate fix takes the
  // strict opposite side of the bound.
  switch (t1_cond) {
    case CmpOp::Lt:
    case CmpOp::Le:
      return RangeOp::Gt;
    case CmpOp::Gt:
    case CmpOp::Ge:
      return RangeOp::Lt;
    default:
      throw std::runtime_error("equality atoms have no range inversion");
  }
}

CmpOp mirror_op(CmpOp op) {
  switch (op) {
    case CmpOp::Lt:
      return CmpOp::Gt;
    case CmpOp::Le:
      return CmpOp::Ge;
    case CmpOp::Gt:
      return CmpOp::Lt;
    case CmpOp::Ge:
      return CmpOp::Le;
    default:
      return op;
  }
}

bool dc_atom_holds(const Relation& rel, const Predicate& p, const Tuple& a,
                   const Tuple& b) {
  const Tuple& l = p.left.tuple_index == 1 ? a : b;
  Value lv = counting(rel, l.tid, rel.col_index(p.left.attr));
  if (lv.is_null()) return false;
  Value rv;
  if (p.rhs_is_col) {
    const Tuple& r = p.right_col.tuple_index == 1 ? a : b;
    rv = counting(rel, r.tid, rel.col_index(p.right_col.attr));
    if (rv.is_null()) return false;
  } else {
    rv = p.literal;
  }
  return compare(lv, p.op, rv);
}

// Inversion groups for one atom of a violating pair (both tuples for
// cross-tuple atoms, the referenced tuple only for literal atoms).
void add_atom_inversion(const Relation& rel, const DcViolation& vio,
                        const Rule& dc, int atom_idx, FixSet* out) {
  const Predicate& p = dc.dc().atoms[static_cast<size_t>(atom_idx)];
  if (p.op == CmpOp::Eq || p.op == CmpOp::Ne) return;  // not range-fixable
  std::string side = "atom-" + std::to_string(atom_idx + 1);
  std::set<TupleId> prov{vio.first, vio.second};

  auto add_group = [&](TupleId tid, const std::string& attr, CmpOp cond,
                       const Value& bound) {
    Value own = counting(rel, tid, rel.col_index(attr));
    CellFix fix;
    fix.tid = tid;
    fix.attr = attr;
    std::string pid = pair_id_for(tid, dc.id, side);
    fix.candidates.push_back({CandidateValue::concrete(own), 0.5, pid, prov});
    fix.candidates.push_back(
        {CandidateValue::range(invert_strict(cond), bound), 0.5, pid, prov});
    out->add(std::move(fix));
  };

  if (p.rhs_is_col) {
    TupleId t1 = p.left.tuple_index == 1 ? vio.first : vio.second;
    TupleId t2 = p.left.tuple_index == 1 ? vio.second : vio.first;
    const std::string& a1 = p.left.attr;
    const std::string& a2 = p.right_col.attr;
    CmpOp c1 = p.left.tuple_index == 1 ? p.op : mirror_op(p.op);
    add_group(t1, a1, c1, counting(rel, t2, rel.col_index(a2)));
    add_group(t2, a2, mirror_op(c1), counting(rel, t1, rel.col_index(a1)));
  } else {
    TupleId t = p.left.tuple_index == 1 ? vio.first : vio.second;
    add_group(t, p.left.attr, p.op, p.literal);
  }
}

}  // namespace

void FixSet::add(CellFix f) {
  for (auto& existing : fixes) {
    if (existing.tid == f.tid && existing.attr == f.attr) {
      existing.candidates.insert(existing.candidates.end(),
                                 f.candidates.begin(), f.candidates.end());
      return;
    }
  }
  fixes.push_back(std::move(f));
}

FdCorrelated gather_fd_correlated(const Relation& rel,
                                  const FdViolationGroup& group,
                                  const Rule& fd) {
  FdCorrelated out;
  std::vector<size_t> lhs_cols;
  for (const auto& a : fd.fd().lhs) lhs_cols.push_back(rel.col_index(a));
  size_t rhs_col = rel.col_index(fd.fd().rhs);

  std::set<Value> member_rhs;
  for (const auto& [v, tids] : group.rhs_groups) member_rhs.insert(v);

  for (const auto& t : rel.tuples()) {
    bool lhs_match = true;
    for (size_t i = 0; i < lhs_cols.size() && lhs_match; ++i) {
      Value v = t.cells[lhs_cols[i]].counting_value();
      lhs_match = !v.is_null() && v == group.lhs_key[i];
    }
    if (lhs_match) out.lhs_sharers.push_back(t.tid);
    Value rv = t.cells[rhs_col].counting_value();
    if (!rv.is_null() && member_rhs.count(rv))
      out.rhs_sharers[rv].push_back(t.tid);
  }
  return out;
}

std::vector<FdCorrelated> gather_fd_correlated_batch(
    const Relation& rel, const std::vector<FdViolationGroup>& groups,
    const Rule& fd) {
  std::vector<FdCorrelated> out(groups.size());
  if (groups.empty()) return out;
  std::vector<size_t> lhs_cols;
  for (const auto& a : fd.fd().lhs) lhs_cols.push_back(rel.col_index(a));
  size_t rhs_col = rel.col_index(fd.fd().rhs);

  std::map<std::vector<Value>, size_t> by_key;
  std::map<Value, std::vector<size_t>> by_rhs;  // rhs value -> group indices
  for (size_t g = 0; g < groups.size(); ++g) {
    by_key[groups[g].lhs_key] = g;
    for (const auto& [v, tids] : groups[g].rhs_groups) by_rhs[v].push_back(g);
  }

  for (const auto& t : rel.tuples()) {
    std::vector<Value> key;
    bool null_key = false;
    for (size_t c : lhs_cols) {
      Value v = t.cells[c].counting_value();
      if (v.is_null()) null_key = true;
      key.push_back(std::move(v));
    }
    if (!null_key) {
      auto it = by_key.find(key);
      if (it != by_key.end()) out[it->second].lhs_sharers.push_back(t.tid);
    }
    Value rv = t.cells[rhs_col].counting_value();
    if (!rv.is_null()) {
      auto it = by_rhs.find(rv);
      if (it != by_rhs.end())
        for (size_t g : it->second) out[g].rhs_sharers[rv].push_back(t.tid);
    }
  }
  return out;
}

FixSet fd_fixes(const Relation& rel, const FdViolationGroup& group,
                const FdCorrelated& correlated, const Rule& fd) {
  if (correlated.lhs_sharers.empty())
    throw std::runtime_error(
        "empty correlated set: relaxation contract broken for rule " + fd.id);
  FixSet out;
  size_t rhs_col = rel.col_index(fd.fd().rhs);
  std::vector<size_t> lhs_cols;
  for (const auto& a : fd.fd().lhs) lhs_cols.push_back(rel.col_index(a));

  // rhs side: one vote per tuple sharing the group's lhs value.
  std::map<Value, std::set<TupleId>> rhs_votes;
  for (TupleId tid : correlated.lhs_sharers) {
    Value v = counting(rel, tid, rhs_col);
    if (!v.is_null()) rhs_votes[v].insert(tid);
  }
  size_t rhs_total = 0;
  for (const auto& [v, tids] : rhs_votes) rhs_total += tids.size();

  for (TupleId tid : group.members()) {
    if (rhs_votes.size() >= 2) {
      CellFix fix;
      fix.tid = tid;
      fix.attr = fd.fd().rhs;
      std::string pid = pair_id_for(tid, fd.id, "rhs");
      for (const auto& [v, tids] : rhs_votes)
        fix.candidates.push_back(
            {CandidateValue::concrete(v),
             static_cast<double>(tids.size()) / static_cast<double>(rhs_total),
             pid, tids});
      out.add(std::move(fix));
    }

    // lhs side: candidates from tuples sharing this member's rhs value.
    Value rv = counting(rel, tid, rhs_col);
    if (rv.is_null()) continue;
    auto sharers = correlated.rhs_sharers.find(rv);
    if (sharers == correlated.rhs_sharers.end() || sharers->second.empty())
      throw std::runtime_error(
          "empty correlated set: relaxation contract broken for rule " +
          fd.id);
    for (size_t i = 0; i < lhs_cols.size(); ++i) {
      std::map<Value, std::set<TupleId>> lhs_votes;
      for (TupleId s : sharers->second) {
        Value v = counting(rel, s, lhs_cols[i]);
        if (!v.is_null()) lhs_votes[v].insert(s);
      }
      if (lhs_votes.size() < 2) continue;  // sole candidate: stays certain
      size_t total = 0;
      for (const auto& [v, tids] : lhs_votes) total += tids.size();
      CellFix fix;
      fix.tid = tid;
      fix.attr = fd.fd().lhs[i];
      std::string pid = pair_id_for(tid, fd.id, "lhs");
      for (const auto& [v, tids] : lhs_votes)
        fix.candidates.push_back(
            {CandidateValue::concrete(v),
             static_cast<double>(tids.size()) / static_cast<double>(total),
             pid, tids});
      out.add(std::move(fix));
    }
  }
  return out;
}

FixSet dc_fixes(const Relation& rel, const DcViolation& vio, const Rule& dc) {
  const Tuple* a = rel.find(vio.first);
  const Tuple* b = rel.find(vio.second);
  if (a == nullptr || b == nullptr)
    throw std::runtime_error("violating pair references unknown tuples");
  for (const auto& p : dc.dc().atoms)
    if (!dc_atom_holds(rel, p, *a, *b))
      throw std::runtime_error("pair (" + std::to_string(vio.first) + "," +
                               std::to_string(vio.second) +
                               ") does not violate rule " + dc.id);
  FixSet out;
  for (size_t i = 0; i < dc.dc().atoms.size(); ++i)
    add_atom_inversion(rel, vio, dc, static_cast<int>(i), &out);
  return out;
}

std::vector<FixSet> multi_atom_combinations(const Relation& rel,
                                            const DcViolation& vio,
                                            const Rule& dc,
                                            const std::vector<int>& atoms) {
  if (atoms.empty())
    throw std::runtime_error("multi_atom_combinations requires >= 1 atom");
  std::vector<FixSet> out;
  size_t m = atoms.size();
  for (size_t mask = 1; mask < (size_t{1} << m); ++mask) {
    FixSet fs;
    for (size_t i = 0; i < m; ++i)
      if (mask & (size_t{1} << i))
        add_atom_inversion(rel, vio, dc, atoms[i], &fs);
    out.push_back(std::move(fs));
  }
  return out;
}

namespace {

struct PairGroup {
  std::string pair_id;
  std::string side;
  std::map<CandidateValue, std::set<TupleId>> witnesses;
  bool has_range = false;

  bool shares_value(const PairGroup& o) const {
    for (const auto& [v, w] : witnesses)
      if (o.witnesses.count(v)) return true;
    return false;
  }
  void absorb(const PairGroup& o) {
    pair_id = std::min(pair_id, o.pair_id);
    has_range = has_range || o.has_range;
    for (const auto& [v, w] : o.witnesses)
      witnesses[v].insert(w.begin(), w.end());
  }
};

void ingest(std::vector<PairGroup>* groups, const std::vector<Candidate>& cands) {
  for (const auto& c : cands) {
    PairGroup* g = nullptr;
    for (auto& existing : *groups)
      if (existing.pair_id == c.pair_id) g = &existing;
    if (g == nullptr) {
      groups->push_back({c.pair_id, side_of(c.pair_id), {}, false});
      g = &groups->back();
    }
    g->has_range = g->has_range || c.value.is_range;
    g->witnesses[c.value].insert(c.provenance.begin(), c.provenance.end());
  }
}

}  // namespace

Cell merge_fixes(const Cell& existing, const CellFix& incoming) {
  if (incoming.candidates.empty()) return existing;
  std::vector<PairGroup> groups;
  if (!existing.is_certain()) ingest(&groups, existing.candidates());
  ingest(&groups, incoming.candidates);

  // Coalesce same-side groups that share a candidate value, to a fixpoint;
  // the result is the connected-component closure, so it is independent of
  // the order the rules were applied in.
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t i = 0; i < groups.size() && !changed; ++i) {
      for (size_t j = i + 1; j < groups.size() && !changed; ++j) {
        if (groups[i].side == groups[j].side &&
            groups[i].shares_value(groups[j])) {
          groups[i].absorb(groups[j]);
          groups.erase(groups.begin() + static_cast<long>(j));
          changed = true;
        }
      }
    }
  }

  std::vector<Candidate> cands;
  for (const auto& g : groups) {
    if (g.has_range) {
      // Range alternatives carry uniform weight.
      double prob = 1.0 / static_cast<double>(g.witnesses.size());
      for (const auto& [v, w] : g.witnesses)
        cands.push_back({v, prob, g.pair_id, w});
    } else {
      size_t total = 0;
      for (const auto& [v, w] : g.witnesses) total += w.size();
      for (const auto& [v, w] : g.witnesses)
        cands.push_back({v,
                         static_cast<double>(w.size()) /
                             static_cast<double>(total),
                         g.pair_id, w});
    }
  }

  std::optional<Value> orig = existing.original();
  if (!orig && existing.is_certain() && !existing.value().is_null())
    orig = existing.value();
  Cell out;
  out.set_uncertain(std::move(cands), std::move(orig));
  return out;
}

}  // namespace qdc
