#pragma once

#include <set>
#include <string>
#include <variant>
#include <vector>

#include "qdc/value.hpp"

namespace qdc {

struct RuleParseError : std::runtime_error {
  int line;
  int column;
  RuleParseError(int l, int c, const std::string& msg)
      : std::runtime_error("rule parse error at " + std::to_string(l) + ":" +
                           std::to_string(c) + ": " + msg),
        line(l),
        column(c) {}
};

struct ColRef {
  int tuple_index = 1;  // 1 or 2
  std::string attr;
};

// One atom of a denial constraint: condition between two tuple variables
// over the same attribute, or between an attribute and a literal.
struct Predicate {
  ColRef left;
  CmpOp op = CmpOp::Eq;
  bool rhs_is_col = true;
  ColRef right_col;
  Value literal;
};

struct FdBody {
  std::vector<std::string> lhs;  // non-empty, rhs not included
  std::string rhs;               // single attribute
};

struct DcBody {
  std::vector<Predicate> atoms;  // non-empty, tuple indices 1 and 2 only
};

struct Rule {
  std::string id;
  std::string relation;
  std::variant<FdBody, DcBody> body;

  bool is_fd() const { return std::holds_alternative<FdBody>(body); }
  const FdBody& fd() const { return std::get<FdBody>(body); }
  const DcBody& dc() const { return std::get<DcBody>(body); }

  // All attributes the rule touches.
  std::set<std::string> attributes() const;
};

// Line-oriented rule DSL:
//   FD <relation>: a[,b]* -> c[,d]*
//   DC <relation>: !(t1.a < t2.a [& atom]*)
// '#' starts a comment. Multi-attribute FD right sides are split into one
// rule per rhs attribute. Returns rules in file order.
std::vector<Rule> parse_rules(const std::string& text);

// Splits a multi-rhs FD into per-attribute FDs, suffixing ids
// deterministically when the split produces more than one rule.
std::vector<Rule> normalize_fd(const std::string& id,
                               const std::string& relation,
                               const std::vector<std::string>& lhs,
                               const std::vector<std::string>& rhs);

// A rule affects a query iff its attribute set intersects the query's
// projection and where-clause attributes.
bool rule_overlaps_query(const Rule& rule, const std::set<std::string>& proj,
                         const std::set<std::string>& where);

}  // namespace qdc
