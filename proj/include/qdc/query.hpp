#pragma once

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "qdc/value.hpp"

namespace qdc {

struct QueryParseError : std::runtime_error {
  size_t pos;
  QueryParseError(size_t p, const std::string& msg)
      : std::runtime_error("query error at offset " + std::to_string(p) +
                           ": " + msg),
        pos(p) {}
};

enum class AggFn { None, Count, Sum, Avg, Min, Max };

// Column reference: `rel` is the alias or relation name, empty when the
// query names a single relation and the reference is unqualified.
struct QColRef {
  std::string rel;
  std::string attr;

  bool operator<(const QColRef& o) const {
    return rel != o.rel ? rel < o.rel : attr < o.attr;
  }
};

struct SelectItem {
  AggFn agg = AggFn::None;
  bool star = false;  // SELECT * or COUNT(*)
  QColRef col;
};

struct FromItem {
  std::string name;
  std::string alias;  // defaults to name
};

struct QPred {
  QColRef col;
  CmpOp op = CmpOp::Eq;
  Value literal;
};

// A flat query: WHERE is parsed into disjunctive normal form (AND binds
// tighter than OR); the single equi-join predicate of a two-relation query
// must hold in every disjunct and is pulled out separately.
struct QueryAst {
  std::vector<SelectItem> select;
  std::vector<FromItem> from;  // 1 or 2 entries
  std::vector<std::vector<QPred>> where_dnf;  // empty = no WHERE
  std::optional<std::pair<QColRef, QColRef>> join;
  std::vector<QColRef> group_by;

  // Attributes referenced per relation alias.
  std::set<std::string> attrs_for(const std::string& alias) const;
};

QueryAst parse_query(const std::string& text);

}  // namespace qdc
