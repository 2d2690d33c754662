#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "helpers.hpp"
#include "qdc/cell.hpp"
#include "qdc/value.hpp"

using namespace qdc;
using qdc::test::V;

TEST_CASE("value equality is kind-strict with float epsilon") {
  CHECK(V(int64_t{5}).equals(V(int64_t{5})));
  CHECK_FALSE(V(int64_t{5}).equals(V(5.0)));
  CHECK(V(1.0).equals(V(1.0 + 5e-10)));
  CHECK_FALSE(V(1.0).equals(V(1.0 + 5e-9)));
  CHECK_FALSE(Value().equals(Value()));  // null equals nothing, even null
  CHECK(V("a").equals(V("a")));
}

TEST_CASE("comparison semantics") {
  CHECK(compare(V(int64_t{2}), CmpOp::Lt, V(int64_t{3})));
  CHECK(compare(V(int64_t{2}), CmpOp::Lt, V(2.5)));  // numeric widening
  CHECK_FALSE(compare(Value(), CmpOp::Eq, Value()));  // null never qualifies
  CHECK_FALSE(compare(V(int64_t{1}), CmpOp::Eq, Value()));
  CHECK(compare(V("a"), CmpOp::Ne, V(int64_t{1})));  // cross-kind !=
  CHECK_THROWS_AS(compare(V("a"), CmpOp::Lt, V(int64_t{1})), TypeError);
  CHECK(compare(V("abc"), CmpOp::Lt, V("abd")));
}

TEST_CASE("value strict order ranks by kind then payload") {
  CHECK(Value() < V(int64_t{0}));
  CHECK(V(int64_t{7}) < V(0.0));
  CHECK(V(2.0) < V("a"));
  CHECK(V(int64_t{1}) < V(int64_t{2}));
}

static Cell uncertain_city() {
  Candidate la{CandidateValue::concrete(V("Los Angeles")), 2.0 / 3.0,
               "1:fd1:rhs", {1, 3}};
  Candidate sf{CandidateValue::concrete(V("San Francisco")), 1.0 / 3.0,
               "1:fd1:rhs", {2}};
  Cell c;
  c.set_uncertain({la, sf}, V("Los Angeles"));
  return c;
}

TEST_CASE("cell validation enforces group probability sums") {
  Cell good = uncertain_city();
  CHECK_NOTHROW(good.validate());

  Candidate a{CandidateValue::concrete(V(int64_t{1})), 0.5, "1:fd1:lhs", {2}};
  Candidate b{CandidateValue::concrete(V(int64_t{2})), 0.4, "1:fd1:lhs", {3}};
  Cell bad;
  bad.set_uncertain({a, b}, V(int64_t{1}));
  CHECK_THROWS(bad.validate());
}

TEST_CASE("counting value prefers the pre-repair original") {
  Cell c = uncertain_city();
  CHECK(c.counting_value().equals(V("Los Angeles")));
  CHECK(Cell(V(int64_t{4})).counting_value().equals(V(int64_t{4})));
}

TEST_CASE("most probable candidate with deterministic tie-break") {
  Cell c = uncertain_city();
  CHECK(most_probable(c).equals(V("Los Angeles")));

  // 50/50 tie resolves to the smaller value.
  Candidate x{CandidateValue::concrete(V(int64_t{7})), 0.5, "2:fd1:lhs", {1}};
  Candidate y{CandidateValue::concrete(V(int64_t{3})), 0.5, "2:fd1:lhs", {2}};
  Cell tie;
  tie.set_uncertain({x, y}, V(int64_t{7}));
  CHECK(most_probable(tie).equals(V(int64_t{3})));
}

TEST_CASE("cell qualification: any candidate may satisfy the predicate") {
  Cell c = uncertain_city();
  CHECK(cell_qualifies(c, CmpOp::Eq, V("San Francisco")));
  CHECK(cell_qualifies(c, CmpOp::Eq, V("Los Angeles")));
  CHECK_FALSE(cell_qualifies(c, CmpOp::Eq, V("New York")));
  CHECK_FALSE(cell_qualifies(Cell(Value()), CmpOp::Eq, V("x")));

  Candidate orig{CandidateValue::concrete(V(int64_t{3000})), 0.5, "2:dc1:atom-0",
                 {1, 2}};
  Candidate rng{CandidateValue::range(RangeOp::Lt, V(int64_t{2000})), 0.5,
                "2:dc1:atom-0", {1, 2}};
  Cell salary;
  salary.set_uncertain({orig, rng}, V(int64_t{3000}));
  CHECK(cell_qualifies(salary, CmpOp::Lt, V(int64_t{500})));  // via the range
  CHECK(cell_qualifies(salary, CmpOp::Eq, V(int64_t{3000})));
  CHECK(cell_qualifies(salary, CmpOp::Ge, V(int64_t{2500})));
  CHECK_FALSE(cell_qualifies(salary, CmpOp::Eq, V(int64_t{2500})));
}

TEST_CASE("join key overlap over candidate sets") {
  Cell a(V(int64_t{9001}));
  Candidate c1{CandidateValue::concrete(V(int64_t{9001})), 0.5, "2:fd1:lhs", {2}};
  Candidate c2{CandidateValue::concrete(V(int64_t{10001})), 0.5, "2:fd1:lhs",
               {4}};
  Cell b;
  b.set_uncertain({c1, c2}, V(int64_t{9001}));
  CHECK(keys_overlap(a, b));
  CHECK(keys_overlap(b, a));
  CHECK_FALSE(keys_overlap(Cell(V(int64_t{7})), b));
  CHECK_FALSE(keys_overlap(Cell(Value()), a));

  // Interval-interval overlap.
  Candidate lo{CandidateValue::range(RangeOp::Lt, V(int64_t{10})), 1.0,
               "1:dc1:atom-0", {2}};
  Candidate hi{CandidateValue::range(RangeOp::Gt, V(int64_t{5})), 1.0,
               "2:dc1:atom-0", {1}};
  Cell cl, ch;
  cl.set_uncertain({lo}, V(int64_t{12}));
  ch.set_uncertain({hi}, V(int64_t{3}));
  CHECK(keys_overlap(cl, ch));
  CHECK(keys_overlap(cl, Cell(V(int64_t{9}))));
  CHECK_FALSE(keys_overlap(cl, Cell(V(int64_t{10}))));
}

TEST_CASE("cell equality is exact on structure, tolerant on probs") {
  Cell a = uncertain_city();
  Cell b = uncertain_city();
  CHECK(a == b);
  Candidate la{CandidateValue::concrete(V("Los Angeles")), 2.0 / 3.0 + 5e-10,
               "1:fd1:rhs", {1, 3}};
  Candidate sf{CandidateValue::concrete(V("San Francisco")), 1.0 / 3.0,
               "1:fd1:rhs", {2}};
  Cell c;
  c.set_uncertain({la, sf}, V("Los Angeles"));
  CHECK(a == c);
  sf.provenance = {2, 9};
  Cell d;
  d.set_uncertain({la, sf}, V("Los Angeles"));
  CHECK_FALSE(a == d);
}
