#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "qdc/relax.hpp"

using namespace qdc;
using namespace qdc::test;

TEST_CASE("rhs filter: one iteration, lhs sharers only") {
  Relation rel = table2a();
  Rule fd = zip_city_fd();
  // City = 'Los Angeles' -> {t1, t3}.
  RelaxationResult rr = relax_fd(rel, {1, 3}, fd);
  CHECK(rr.extra == std::set<TupleId>{2});
  CHECK(rr.iterations == 1);
  CHECK(rr.rhs_step_total() == 0);
}

TEST_CASE("lhs filter: transitive closure needs a second iteration") {
  Relation rel = table2a();
  Rule fd = zip_city_fd();
  // Zip = 9001 -> {t1, t2, t3}.
  RelaxationResult rr = relax_fd(rel, {1, 2, 3}, fd);
  CHECK(rr.extra == std::set<TupleId>({4, 5}));
  CHECK(rr.iterations == 2);
  // t4 joins through its rhs (San Francisco), t5 through t4's lhs (10001).
  REQUIRE(rr.added.size() == 2);
  CHECK(rr.added[0].second == 1);  // rhs step of iteration 1 adds t4
  CHECK(rr.added[1].first == 1);   // lhs step of iteration 2 adds t5
}

TEST_CASE("relaxation over uncertain cells follows any candidate") {
  Relation rel = table2a();
  Rule fd = zip_city_fd();
  Candidate c1{CandidateValue::concrete(V(int64_t{9001})), 0.5, "2:fd1:lhs", {2}};
  Candidate c2{CandidateValue::concrete(V(int64_t{7777})), 0.5, "2:fd1:lhs", {4}};
  Cell zip;
  zip.set_uncertain({c1, c2}, V(int64_t{9001}));
  rel.find(2)->cells[0] = zip;
  Tuple extra;
  extra.tid = 6;
  extra.cells.push_back(Cell(V(int64_t{7777})));
  extra.cells.push_back(Cell(V("Phoenix")));
  rel.add_tuple(std::move(extra));
  RelaxationResult rr = relax_fd(rel, {2}, fd);
  CHECK(rr.extra.count(6) == 1);  // reached via the 7777 candidate
}

TEST_CASE("clean answers stay fixed") {
  Relation rel = cities({{1, "a"}, {2, "b"}, {3, "c"}});
  RelaxationResult rr = relax_fd(rel, {1, 2, 3}, zip_city_fd());
  CHECK(rr.extra.empty());
  CHECK(rr.iterations == 1);
}

static double exact_extra_prob(uint64_t n, uint64_t vio, uint64_t ar) {
  // C(n - vio, ar) / C(n, ar) by direct ratio.
  double p = 1.0;
  for (uint64_t i = 0; i < ar; ++i)
    p *= static_cast<double>(n - vio - i) / static_cast<double>(n - i);
  return 1.0 - p;
}

TEST_CASE("extra iteration probability matches the hypergeometric form") {
  CHECK(extra_iteration_probability(4, 1, 2) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(extra_iteration_probability(10, 0, 5) == doctest::Approx(0.0));
  CHECK(extra_iteration_probability(10, 4, 7) == doctest::Approx(1.0));
  for (uint64_t n = 1; n <= 12; ++n)
    for (uint64_t vio = 0; vio <= n; ++vio)
      for (uint64_t ar = 0; ar <= n; ++ar)
        CHECK(extra_iteration_probability(n, vio, ar) ==
              doctest::Approx(exact_extra_prob(n, vio, ar)).epsilon(1e-12));
  CHECK_THROWS(extra_iteration_probability(5, 6, 1));
  CHECK_THROWS(extra_iteration_probability(5, 1, 6));
}

TEST_CASE("relaxed size upper bound") {
  // Dataset: A has values {1:4, 2:2}; result holds one tuple with value 1.
  std::map<std::string, std::map<Value, uint64_t>> ds{
      {"A", {{V(int64_t{1}), 4}, {V(int64_t{2}), 2}}}};
  std::map<std::string, std::map<Value, uint64_t>> rs{
      {"A", {{V(int64_t{1}), 1}}}};
  CHECK(relaxed_size_upper_bound({"A"}, ds, rs) == 3);
  // Result value missing from the dataset distribution -> inconsistent.
  std::map<std::string, std::map<Value, uint64_t>> bad{
      {"A", {{V(int64_t{9}), 1}}}};
  CHECK_THROWS(relaxed_size_upper_bound({"A"}, ds, bad));
}

TEST_CASE("violation detection groups by lhs and skips checked tuples") {
  Relation rel = table2a();
  Rule fd = zip_city_fd();
  std::set<TupleId> all{1, 2, 3, 4, 5};
  ViolationSet vs = detect_fd_violations(rel, all, fd);
  REQUIRE(vs.fd_groups.size() == 2);
  CHECK(vs.fd_groups[0].lhs_key == std::vector<Value>{V(int64_t{9001})});
  CHECK(vs.fd_groups[0].members() == std::set<TupleId>({1, 2, 3}));
  CHECK(vs.fd_groups[1].members() == std::set<TupleId>({4, 5}));

  rel.checked().fd_checked["fd1"] = {1, 2, 3};
  ViolationSet vs2 = detect_fd_violations(rel, all, fd);
  REQUIRE(vs2.fd_groups.size() == 1);
  CHECK(vs2.fd_groups[0].members() == std::set<TupleId>({4, 5}));
}

TEST_CASE("property: rhs-filter relaxation never adds in the rhs step") {
  std::mt19937_64 rng(1234);
  Rule fd = parse_rules("FD r: A -> B").front();
  for (int i = 0; i < 1000; ++i) {
    Relation rel = random_fd_instance(rng, 5, 6, 8, 0.3);
    if (rel.tuples().empty()) continue;
    // Query selecting one rhs value.
    std::uniform_int_distribution<int> pick(0, 7);
    Value want = V(int64_t{pick(rng)});
    std::set<TupleId> answer;
    for (const auto& t : rel.tuples())
      if (t.cells[1].counting_value().equals(want)) answer.insert(t.tid);
    if (answer.empty()) continue;
    RelaxationResult rr = relax_fd(rel, answer, fd);
    CHECK(rr.rhs_step_total() == 0);
  }
}
