#include "qdc/theta.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qdc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_dc(const Relation& rel, const Rule& dc) {
  if (dc.is_fd()) throw std::runtime_error("rule " + dc.id + " is not a DC");
  if (dc.relation != rel.name())
    throw std::runtime_error("rule " + dc.id + " is not bound to relation '" +
                             rel.name() + "'");
  for (const auto& a : dc.attributes()) rel.col_index(a);
}

// First inequality atom's attribute orders the matrix.
const Predicate* ordering_atom(const Rule& dc) {
  for (const auto& p : dc.dc().atoms)
    if (p.op != CmpOp::Eq && p.op != CmpOp::Ne && p.rhs_is_col) return &p;
  return nullptr;
}

bool numeric_counting(const Cell& c, double* out) {
  Value v = c.is_certain() && c.value().is_null() ? Value() : c.counting_value();
  if (!v.is_numeric()) return false;
  *out = v.numeric();
  return true;
}

// Comparator as seen from t1's side of the atom.
CmpOp t1_side_op(const Predicate& p) {
  if (p.left.tuple_index == 1) return p.op;
  switch (p.op) {  // mirror: t2.a op t1.a  ==  t1.a mirrored-op t2.a
    case CmpOp::Lt:
      return CmpOp::Gt;
    case CmpOp::Le:
      return CmpOp::Ge;
    case CmpOp::Gt:
      return CmpOp::Lt;
    case CmpOp::Ge:
      return CmpOp::Le;
    default:
      return p.op;
  }
}

// Whether atom `p` holds with `a` as t1 and `b` as t2 (counting values).
bool atom_holds(const Relation& rel, const Predicate& p, const Tuple& a,
                const Tuple& b) {
  const Tuple& l = p.left.tuple_index == 1 ? a : b;
  const Cell& lc = l.cells[rel.col_index(p.left.attr)];
  if (lc.is_certain() && lc.value().is_null()) return false;
  Value lv = lc.counting_value();
  Value rv;
  if (p.rhs_is_col) {
    const Tuple& r = p.right_col.tuple_index == 1 ? a : b;
    const Cell& rc = r.cells[rel.col_index(p.right_col.attr)];
    if (rc.is_certain() && rc.value().is_null()) return false;
    rv = rc.counting_value();
  } else {
    rv = p.literal;
  }
  return compare(lv, p.op, rv);
}

bool pair_violates(const Relation& rel, const Rule& dc, const Tuple& a,
                   const Tuple& b, std::vector<int>* atoms) {
  atoms->clear();
  for (size_t i = 0; i < dc.dc().atoms.size(); ++i) {
    if (!atom_holds(rel, dc.dc().atoms[i], a, b)) return false;
    atoms->push_back(static_cast<int>(i));
  }
  return true;
}

// Can any pair (x in bi as t1, y in bj as t2) satisfy every atom, judging
// by the buckets' boundary ranges alone?
bool feasible(const Rule& dc, const PartitionBucket& bi,
              const PartitionBucket& bj) {
  if (bi.tids.empty() || bj.tids.empty()) return false;
  for (const auto& p : dc.dc().atoms) {
    if (!p.rhs_is_col) {
      const PartitionBucket& b = p.left.tuple_index == 1 ? bi : bj;
      auto it = b.ranges.find(p.left.attr);
      if (it == b.ranges.end() || !p.literal.is_numeric()) continue;
      double lit = p.literal.numeric();
      bool ok = true;
      switch (p.op) {
        case CmpOp::Lt:
          ok = it->second.first < lit;
          break;
        case CmpOp::Le:
          ok = it->second.first <= lit;
          break;
        case CmpOp::Gt:
          ok = it->second.second > lit;
          break;
        case CmpOp::Ge:
          ok = it->second.second >= lit;
          break;
        case CmpOp::Eq:
          ok = it->second.first <= lit && lit <= it->second.second;
          break;
        default:
          break;
      }
      if (!ok) return false;
      continue;
    }
    const PartitionBucket& l = p.left.tuple_index == 1 ? bi : bj;
    const PartitionBucket& r = p.left.tuple_index == 1 ? bj : bi;
    auto li = l.ranges.find(p.left.attr);
    auto ri = r.ranges.find(p.right_col.attr);
    if (li == l.ranges.end() || ri == r.ranges.end()) continue;  // non-numeric
    bool ok = true;
    switch (p.op) {
      case CmpOp::Lt:
        ok = li->second.first < ri->second.second;
        break;
      case CmpOp::Le:
        ok = li->second.first <= ri->second.second;
        break;
      case CmpOp::Gt:
        ok = li->second.second > ri->second.first;
        break;
      case CmpOp::Ge:
        ok = li->second.second >= ri->second.first;
        break;
      case CmpOp::Eq:
        ok = li->second.first <= ri->second.second &&
             ri->second.first <= li->second.second;
        break;
      default:
        break;
    }
    if (!ok) return false;
  }
  return true;
}

// Per-tuple pre-filter: x (as t1, against bucket bj as t2) can participate
// in a violation only if each atom is satisfiable against bj's ranges.
bool tuple_feasible(const Relation& rel, const Rule& dc, const Tuple& x,
                    const PartitionBucket& bj) {
  for (const auto& p : dc.dc().atoms) {
    if (!p.rhs_is_col) continue;
    CmpOp op = t1_side_op(p);
    const std::string& attr =
        p.left.tuple_index == 1 ? p.left.attr : p.right_col.attr;
    const std::string& other_attr =
        p.left.tuple_index == 1 ? p.right_col.attr : p.left.attr;
    double v;
    if (!numeric_counting(x.cells[rel.col_index(attr)], &v)) return false;
    auto it = bj.ranges.find(other_attr);
    if (it == bj.ranges.end()) continue;
    bool ok = true;
    switch (op) {
      case CmpOp::Lt:
        ok = v < it->second.second;
        break;
      case CmpOp::Le:
        ok = v <= it->second.second;
        break;
      case CmpOp::Gt:
        ok = v > it->second.first;
        break;
      case CmpOp::Ge:
        ok = v >= it->second.first;
        break;
      default:
        break;
    }
    if (!ok) return false;
  }
  return true;
}

}  // namespace

int ThetaMatrix::bucket_of(double v) const {
  if (k <= 1 || axis_max <= axis_min) return 0;
  double w = (axis_max - axis_min) / k;
  int i = static_cast<int>((v - axis_min) / w);
  return std::clamp(i, 0, k - 1);
}

ThetaMatrix build_theta_matrix(const Relation& rel, const Rule& dc, int p) {
  check_dc(rel, dc);
  int k = static_cast<int>(std::lround(std::sqrt(static_cast<double>(p))));
  if (p < 1 || k * k != p)
    throw std::invalid_argument("partition count must be a perfect square");
  const Predicate* ord = ordering_atom(dc);
  if (ord == nullptr)
    throw std::runtime_error("DC " + dc.id + " has no inequality atom");
  const std::string& axis = ord->left.attr;
  size_t axis_col = rel.col_index(axis);
  Kind axis_kind = rel.schema()[axis_col].kind;
  if (axis_kind != Kind::Int && axis_kind != Kind::Float)
    throw std::runtime_error("ordering attribute '" + axis +
                             "' is not numeric");

  ThetaMatrix m;
  m.rule_id = dc.id;
  m.k = k;
  m.axis_attr = axis;
  m.buckets.resize(k);

  std::vector<std::pair<double, TupleId>> ordered;
  for (const auto& t : rel.tuples()) {
    double v;
    if (numeric_counting(t.cells[axis_col], &v)) ordered.push_back({v, t.tid});
  }
  std::sort(ordered.begin(), ordered.end());
  if (!ordered.empty()) {
    m.axis_min = ordered.front().first;
    m.axis_max = ordered.back().first;
  }
  double width = k > 0 ? (m.axis_max - m.axis_min) / k : 0.0;
  for (int i = 0; i < k; ++i) {
    m.buckets[i].axis_lo = m.axis_min + width * i;
    m.buckets[i].axis_hi = i + 1 == k ? m.axis_max : m.axis_min + width * (i + 1);
  }

  std::set<std::string> dc_attrs = dc.attributes();
  for (const auto& [v, tid] : ordered) {
    PartitionBucket& b = m.buckets[m.bucket_of(v)];
    b.tids.push_back(tid);
    const Tuple* t = rel.find(tid);
    for (const auto& a : dc_attrs) {
      double av;
      if (!numeric_counting(t->cells[rel.col_index(a)], &av)) continue;
      auto it = b.ranges.find(a);
      if (it == b.ranges.end())
        b.ranges[a] = {av, av};
      else {
        it->second.first = std::min(it->second.first, av);
        it->second.second = std::max(it->second.second, av);
      }
    }
  }
  return m;
}

ViolationSet partial_theta_join(ThetaMatrix& matrix, const Relation& rel,
                                Region region, const Rule& dc) {
  check_dc(rel, dc);
  ViolationSet vs;
  vs.rule_id = dc.id;
  std::set<DcViolation> found;
  std::vector<int> atoms;

  for (int i = 0; i < matrix.k; ++i) {
    for (int j = i; j < matrix.k; ++j) {
      if (matrix.checked.count({i, j})) continue;
      const PartitionBucket& bi = matrix.buckets[i];
      const PartitionBucket& bj = matrix.buckets[j];
      bool touches = (bi.axis_lo <= region.hi && bi.axis_hi >= region.lo) ||
                     (bj.axis_lo <= region.hi && bj.axis_hi >= region.lo);
      if (!touches) continue;

      matrix.checked.insert({i, j});
      // Boundary pruning: skip partitions that cannot hold a violation in
      // either orientation.
      bool fwd = feasible(dc, bi, bj);
      bool rev = i != j && feasible(dc, bj, bi);
      if (i == j) rev = fwd;
      if (!fwd && !rev) continue;

      for (size_t xi = 0; xi < bi.tids.size(); ++xi) {
        const Tuple* x = rel.find(bi.tids[xi]);
        bool x_fwd = fwd && tuple_feasible(rel, dc, *x, bj);
        bool x_rev = rev;
        if (!x_fwd && !x_rev) continue;
        size_t start = i == j ? xi + 1 : 0;
        for (size_t yj = start; yj < bj.tids.size(); ++yj) {
          const Tuple* y = rel.find(bj.tids[yj]);
          if (x_fwd && pair_violates(rel, dc, *x, *y, &atoms))
            found.insert({x->tid, y->tid, atoms});
          else if (x_rev && pair_violates(rel, dc, *y, *x, &atoms))
            found.insert({y->tid, x->tid, atoms});
        }
      }
    }
  }
  vs.dc_pairs.assign(found.begin(), found.end());
  return vs;
}

void estimate_errors(ThetaMatrix& matrix, const Relation& rel, const Rule& dc) {
  check_dc(rel, dc);
  matrix.range_vio.clear();
  const Predicate* ord = ordering_atom(dc);
  // The estimate needs a second inequality attribute; single-attribute DCs
  // keep an empty map (everything then rides on the support figure).
  const Predicate* other = nullptr;
  for (const auto& p : dc.dc().atoms)
    if (&p != ord && p.rhs_is_col && p.op != CmpOp::Eq && p.op != CmpOp::Ne) {
      other = &p;
      break;
    }
  if (ord == nullptr || other == nullptr) return;

  const std::string& ot = other->left.attr;
  CmpOp axis_t1 = t1_side_op(*ord);
  CmpOp other_t1 = t1_side_op(*other);
  size_t ot_col = rel.col_index(ot);

  auto count_in = [&](const PartitionBucket& b, double lo, double hi) {
    uint64_t c = 0;
    for (TupleId tid : b.tids) {
      double v;
      if (numeric_counting(rel.find(tid)->cells[ot_col], &v) && v >= lo &&
          v <= hi)
        ++c;
    }
    return c;
  };

  for (int i = 0; i < matrix.k; ++i) {
    for (int j = i + 1; j < matrix.k; ++j) {
      const PartitionBucket& lower = matrix.buckets[i];
      const PartitionBucket& upper = matrix.buckets[j];
      if (lower.tids.empty() || upper.tids.empty()) continue;
      auto li = lower.ranges.find(ot);
      auto ui = upper.ranges.find(ot);
      if (li == lower.ranges.end() || ui == upper.ranges.end()) continue;
      // Orient the pair so x sits on the lower axis bucket; when t1 is the
      // higher-axis side of the ordering atom, mirror the condition.
      CmpOp cond = other_t1;
      if (axis_t1 == CmpOp::Gt || axis_t1 == CmpOp::Ge) {
        Predicate mirrored;
        mirrored.left = {2, ot};
        mirrored.op = other_t1;
        cond = t1_side_op(mirrored);
      }
      double lo, hi;
      if (cond == CmpOp::Gt || cond == CmpOp::Ge) {
        // Lower-bucket tuples must exceed the upper bucket's minimum; the
        // violations lie in the overlap of the two boundary ranges.
        lo = ui->second.first;
        hi = li->second.second;
      } else {
        lo = li->second.first;
        hi = ui->second.second;
      }
      if (lo >= hi) continue;
      uint64_t est = std::min(count_in(lower, lo, hi), count_in(upper, lo, hi));
      if (est > 0) matrix.range_vio[{i, j}] = est;
    }
  }
}

AccuracyEstimate estimate_accuracy(const ThetaMatrix& matrix,
                                   uint64_t result_size, int result_range) {
  AccuracyEstimate est;
  for (const auto& [coord, count] : matrix.range_vio) {
    auto [i, j] = coord;
    bool below = i < result_range && j < result_range;
    bool above = i > result_range && j > result_range;
    if (below || above) est.errors += count;
  }
  double denom = static_cast<double>(result_size + est.errors);
  est.accuracy = denom == 0.0 ? 1.0 : static_cast<double>(est.errors) / denom;
  double total = static_cast<double>(matrix.upper_diagonal_count());
  double unchecked = total - static_cast<double>(matrix.checked.size());
  est.support = total == 0.0 ? 1.0 : (total - unchecked) / total;
  return est;
}

}  // namespace qdc
