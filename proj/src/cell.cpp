#include "qdc/cell.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace qdc {

const char* range_op_name(RangeOp op) {
  switch (op) {
    case RangeOp::Lt:
      return "<";
    case RangeOp::Le:
      return "<=";
    case RangeOp::Gt:
      return ">";
    default:
      return ">=";
  }
}

RangeOp range_op_from_name(const std::string& s) {
  if (s == "<") return RangeOp::Lt;
  if (s == "<=") return RangeOp::Le;
  if (s == ">") return RangeOp::Gt;
  if (s == ">=") return RangeOp::Ge;
  throw std::runtime_error("unknown range op: " + s);
}

CandidateValue CandidateValue::range(RangeOp op, Value bound) {
  if (!bound.is_numeric())
    throw TypeError("half-open range requires a numeric bound");
  CandidateValue c;
  c.is_range = true;
  c.op = op;
  c.value = std::move(bound);
  return c;
}

bool CandidateValue::operator<(const CandidateValue& o) const {
  if (is_range != o.is_range) return !is_range;  // concretes first
  if (value != o.value) return value < o.value;
  return static_cast<int>(op) < static_cast<int>(o.op) && is_range;
}

std::string CandidateValue::to_string() const {
  if (!is_range) return value.to_string();
  return std::string(range_op_name(op)) + value.to_string();
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Interval {
  double lo = -kInf;
  double hi = kInf;
  bool lo_open = true;
  bool hi_open = true;
};

Interval range_interval(RangeOp op, double bound) {
  Interval iv;
  switch (op) {
    case RangeOp::Lt:
      iv.hi = bound;
      break;
    case RangeOp::Le:
      iv.hi = bound;
      iv.hi_open = false;
      break;
    case RangeOp::Gt:
      iv.lo = bound;
      break;
    default:
      iv.lo = bound;
      iv.lo_open = false;
      break;
  }
  return iv;
}

Interval predicate_interval(CmpOp op, double lit) {
  Interval iv;
  switch (op) {
    case CmpOp::Eq:
      iv.lo = iv.hi = lit;
      iv.lo_open = iv.hi_open = false;
      break;
    case CmpOp::Lt:
      iv.hi = lit;
      break;
    case CmpOp::Le:
      iv.hi = lit;
      iv.hi_open = false;
      break;
    case CmpOp::Gt:
      iv.lo = lit;
      break;
    case CmpOp::Ge:
      iv.lo = lit;
      iv.lo_open = false;
      break;
    default:
      break;  // Ne handled by callers
  }
  return iv;
}

bool intersects(const Interval& a, const Interval& b) {
  double lo = std::max(a.lo, b.lo);
  double hi = std::min(a.hi, b.hi);
  if (lo < hi) return true;
  if (lo > hi) return false;
  bool lo_open = (a.lo == lo && a.lo_open) || (b.lo == lo && b.lo_open);
  bool hi_open = (a.hi == hi && a.hi_open) || (b.hi == hi && b.hi_open);
  return !lo_open && !hi_open;
}

bool contains(const Interval& iv, double x) {
  if (x < iv.lo || x > iv.hi) return false;
  if (x == iv.lo && iv.lo_open) return false;
  if (x == iv.hi && iv.hi_open) return false;
  return true;
}

Kind cell_kind(const Cell& c) {
  if (c.is_certain()) return c.value().kind();
  for (const auto& cand : c.candidates()) return cand.value.value.kind();
  return Kind::Null;
}

}  // namespace

Value Cell::counting_value() const {
  if (original_) return *original_;
  if (is_certain()) return certain_;
  return most_probable(*this);
}

void Cell::set_uncertain(std::vector<Candidate> cands,
                         std::optional<Value> orig) {
  std::sort(cands.begin(), cands.end(),
            [](const Candidate& a, const Candidate& b) {
              if (a.pair_id != b.pair_id) return a.pair_id < b.pair_id;
              return a.value < b.value;
            });
  cands_ = std::move(cands);
  original_ = std::move(orig);
  certain_ = Value();
}

std::vector<std::string> Cell::pair_ids() const {
  std::vector<std::string> ids;
  for (const auto& c : cands_)
    if (ids.empty() || ids.back() != c.pair_id) ids.push_back(c.pair_id);
  return ids;
}

void Cell::validate() const {
  if (is_certain()) return;
  std::map<std::string, double> sums;
  std::map<std::string, size_t> counts;
  bool has_range = false;
  bool has_multi = false;
  for (const auto& c : cands_) {
    if (c.prob <= 0.0 || c.prob > 1.0 + kProbEps)
      throw std::runtime_error("candidate probability out of (0,1]");
    if (c.provenance.empty())
      throw std::runtime_error("candidate with empty provenance");
    sums[c.pair_id] += c.prob;
    counts[c.pair_id]++;
    has_range = has_range || c.value.is_range;
  }
  for (const auto& [id, s] : sums) {
    if (std::fabs(s - 1.0) > 1e-9)
      throw std::runtime_error("pair group " + id + " probs sum to " +
                               std::to_string(s));
    if (counts[id] >= 2) has_multi = true;
  }
  if (!has_multi && !has_range)
    throw std::runtime_error("uncertain cell without alternatives");
}

bool Cell::operator==(const Cell& o) const {
  if (is_certain() != o.is_certain()) return false;
  if (is_certain()) return certain_ == o.certain_;
  if (original_.has_value() != o.original_.has_value()) return false;
  if (original_ && *original_ != *o.original_) return false;
  if (cands_.size() != o.cands_.size()) return false;
  for (size_t i = 0; i < cands_.size(); ++i) {
    const Candidate& a = cands_[i];
    const Candidate& b = o.cands_[i];
    if (!(a.value == b.value) || a.pair_id != b.pair_id ||
        a.provenance != b.provenance ||
        std::fabs(a.prob - b.prob) > kProbEps)
      return false;
  }
  return true;
}

bool cell_qualifies(const Cell& cell, CmpOp op, const Value& literal) {
  Kind ck = cell_kind(cell);
  if (ck == Kind::Null) return false;  // null never qualifies
  if (literal.is_null()) return false;
  if (ck != literal.kind())
    throw TypeError(std::string("predicate literal kind ") +
                    kind_name(literal.kind()) + " does not match cell kind " +
                    kind_name(ck));
  if (cell.is_certain()) return compare(cell.value(), op, literal);
  for (const auto& cand : cell.candidates()) {
    if (!cand.value.is_range) {
      if (cand.value.value.is_null()) continue;
      if (compare(cand.value.value, op, literal)) return true;
      continue;
    }
    // Range candidate: qualifies iff the range intersects the solution set.
    Interval range = range_interval(cand.value.op, cand.value.value.numeric());
    if (op == CmpOp::Ne) return true;  // half-open ranges are infinite
    if (intersects(range, predicate_interval(op, literal.numeric())))
      return true;
  }
  return false;
}

bool keys_overlap(const Cell& a, const Cell& b) {
  Kind ka = cell_kind(a);
  Kind kb = cell_kind(b);
  if (ka == Kind::Null || kb == Kind::Null) return false;
  if (ka != kb)
    throw TypeError(std::string("join-key kinds differ: ") + kind_name(ka) +
                    " vs " + kind_name(kb));

  auto items = [](const Cell& c) {
    std::vector<CandidateValue> out;
    if (c.is_certain())
      out.push_back(CandidateValue::concrete(c.value()));
    else
      for (const auto& cand : c.candidates()) out.push_back(cand.value);
    return out;
  };

  for (const auto& x : items(a)) {
    for (const auto& y : items(b)) {
      if (!x.is_range && !y.is_range) {
        if (x.value.equals(y.value)) return true;
      } else if (x.is_range && y.is_range) {
        if (intersects(range_interval(x.op, x.value.numeric()),
                       range_interval(y.op, y.value.numeric())))
          return true;
      } else {
        const CandidateValue& r = x.is_range ? x : y;
        const CandidateValue& v = x.is_range ? y : x;
        if (contains(range_interval(r.op, r.value.numeric()),
                     v.value.numeric()))
          return true;
      }
    }
  }
  return false;
}

Value most_probable(const Cell& cell) {
  if (cell.is_certain()) {
    if (cell.value().is_null())
      throw std::runtime_error("no concrete candidate");
    return cell.value();
  }
  // Candidates are sorted by (pair_id, value); scan groups in order and pick
  // the first group that holds a concrete candidate.
  const auto& cands = cell.candidates();
  size_t i = 0;
  while (i < cands.size()) {
    size_t j = i;
    const Candidate* best = nullptr;
    while (j < cands.size() && cands[j].pair_id == cands[i].pair_id) {
      if (!cands[j].value.is_range &&
          (best == nullptr || cands[j].prob > best->prob))
        best = &cands[j];
      ++j;
    }
    if (best != nullptr) return best->value.value;
    i = j;
  }
  throw std::runtime_error("no concrete candidate");
}

}  // namespace qdc
