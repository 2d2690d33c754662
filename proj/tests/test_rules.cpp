#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "qdc/rules.hpp"

using namespace qdc;

TEST_CASE("FD parsing") {
  auto rules = parse_rules("FD cities: Zip -> City\n");
  REQUIRE(rules.size() == 1);
  CHECK(rules[0].id == "fd1");
  CHECK(rules[0].relation == "cities");
  REQUIRE(rules[0].is_fd());
  CHECK(rules[0].fd().lhs == std::vector<std::string>{"Zip"});
  CHECK(rules[0].fd().rhs == "City");
}

TEST_CASE("multi-rhs FDs split per attribute with suffixed ids") {
  auto rules = parse_rules("FD r: A, B -> C, D\n");
  REQUIRE(rules.size() == 2);
  CHECK(rules[0].id == "fd1.1");
  CHECK(rules[1].id == "fd1.2");
  CHECK(rules[0].fd().lhs == std::vector<std::string>({"A", "B"}));
  CHECK(rules[0].fd().rhs == "C");
  CHECK(rules[1].fd().rhs == "D");
}

TEST_CASE("DC parsing with comments and blank lines") {
  auto rules = parse_rules(
      "# salary/tax monotonicity\n"
      "\n"
      "DC emp: !(t1.salary < t2.salary & t1.tax > t2.tax)\n");
  REQUIRE(rules.size() == 1);
  CHECK(rules[0].id == "dc1");
  REQUIRE_FALSE(rules[0].is_fd());
  const DcBody& dc = rules[0].dc();
  REQUIRE(dc.atoms.size() == 2);
  CHECK(dc.atoms[0].left.tuple_index == 1);
  CHECK(dc.atoms[0].left.attr == "salary");
  CHECK(dc.atoms[0].op == CmpOp::Lt);
  CHECK(dc.atoms[0].rhs_is_col);
  CHECK(dc.atoms[0].right_col.tuple_index == 2);
  CHECK(dc.atoms[1].op == CmpOp::Gt);
}

TEST_CASE("DC literal atoms") {
  auto rules = parse_rules("DC emp: !(t1.salary > t2.salary & t2.age >= 65)\n");
  REQUIRE(rules.size() == 1);
  const DcBody& dc = rules[0].dc();
  REQUIRE(dc.atoms.size() == 2);
  CHECK_FALSE(dc.atoms[1].rhs_is_col);
  CHECK(dc.atoms[1].literal.equals(Value::integer(65)));
}

TEST_CASE("rule ids follow line order across kinds") {
  auto rules = parse_rules(
      "FD r: A -> B\n"
      "DC r: !(t1.x < t2.x)\n"
      "FD r: C -> D\n");
  REQUIRE(rules.size() == 3);
  CHECK(rules[0].id == "fd1");
  CHECK(rules[1].id == "dc2");
  CHECK(rules[2].id == "fd3");
}

TEST_CASE("parse errors carry positions") {
  CHECK_THROWS_AS(parse_rules("FD r: A -> A\n"), RuleParseError);  // rhs in lhs
  CHECK_THROWS_AS(parse_rules("DC r: !(t1.x < t3.x)\n"), RuleParseError);
  CHECK_THROWS_AS(parse_rules("DC r: !(t1.x < t1.y)\n"), RuleParseError);
  CHECK_THROWS_AS(parse_rules("DC r: !(t1.x < t2.y)\n"), RuleParseError);
  CHECK_THROWS_AS(parse_rules("FD r: -> B\n"), RuleParseError);
  CHECK_THROWS_AS(parse_rules("nonsense\n"), RuleParseError);
  try {
    parse_rules("FD r: A -> B\nDC r: !(t1.x < t3.x)\n");
    FAIL("expected RuleParseError");
  } catch (const RuleParseError& e) {
    CHECK(e.line == 2);
  }
}

TEST_CASE("rule attributes and query overlap") {
  auto rules = parse_rules(
      "FD cities: Zip -> City\n"
      "DC emp: !(t1.salary < t2.salary & t1.tax > t2.tax)\n");
  CHECK(rules[0].attributes() == std::set<std::string>({"Zip", "City"}));
  CHECK(rules[1].attributes() == std::set<std::string>({"salary", "tax"}));
  CHECK(rule_overlaps_query(rules[0], {"Zip"}, {}));
  CHECK(rule_overlaps_query(rules[0], {}, {"City"}));
  CHECK_FALSE(rule_overlaps_query(rules[0], {"Name"}, {"Phone"}));
}
