#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "qdc/relax.hpp"
#include "qdc/repair.hpp"
#include "qdc/store.hpp"

using namespace qdc;
using namespace qdc::test;

namespace {

const CellFix* fix_for(const FixSet& fs, TupleId tid, const std::string& attr) {
  for (const auto& f : fs.fixes)
    if (f.tid == tid && f.attr == attr) return &f;
  return nullptr;
}

double group_prob(const CellFix& f, const std::string& pair_id,
                  const Value& v) {
  for (const auto& c : f.candidates)
    if (c.pair_id == pair_id && !c.value.is_range && c.value.value.equals(v))
      return c.prob;
  return -1;
}

}  // namespace

TEST_CASE("fd fixes reproduce the running example frequencies") {
  Relation rel = table2a();
  Rule fd = zip_city_fd();
  ViolationSet vs = detect_fd_violations(rel, {1, 2, 3, 4, 5}, fd);
  REQUIRE(vs.fd_groups.size() == 2);

  // 9001 group: City votes LA x2, SF x1.
  const FdViolationGroup& g1 = vs.fd_groups[0];
  FixSet f1 = fd_fixes(rel, g1, gather_fd_correlated(rel, g1, fd), fd);
  for (TupleId tid : {1, 2, 3}) {
    const CellFix* cf = fix_for(f1, tid, "City");
    REQUIRE(cf != nullptr);
    std::string pid = std::to_string(tid) + ":fd1:rhs";
    CHECK(group_prob(*cf, pid, V("Los Angeles")) ==
          doctest::Approx(2.0 / 3.0).epsilon(1e-9));
    CHECK(group_prob(*cf, pid, V("San Francisco")) ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-9));
  }
  // t2's rhs (San Francisco) also occurs under lhs 10001: lhs pair group.
  const CellFix* zf = fix_for(f1, 2, "Zip");
  REQUIRE(zf != nullptr);
  CHECK(group_prob(*zf, "2:fd1:lhs", V(int64_t{9001})) == doctest::Approx(0.5));
  CHECK(group_prob(*zf, "2:fd1:lhs", V(int64_t{10001})) ==
        doctest::Approx(0.5));
  // t1 and t3 carry Los Angeles, which only occurs under 9001: no lhs fix.
  CHECK(fix_for(f1, 1, "Zip") == nullptr);
  CHECK(fix_for(f1, 3, "Zip") == nullptr);

  // 10001 group: City votes SF x1, NY x1; t4's SF co-occurs with 9001.
  const FdViolationGroup& g2 = vs.fd_groups[1];
  FixSet f2 = fd_fixes(rel, g2, gather_fd_correlated(rel, g2, fd), fd);
  const CellFix* c4 = fix_for(f2, 4, "City");
  REQUIRE(c4 != nullptr);
  CHECK(group_prob(*c4, "4:fd1:rhs", V("San Francisco")) ==
        doctest::Approx(0.5));
  CHECK(group_prob(*c4, "4:fd1:rhs", V("New York")) == doctest::Approx(0.5));
  const CellFix* z4 = fix_for(f2, 4, "Zip");
  REQUIRE(z4 != nullptr);
  CHECK(group_prob(*z4, "4:fd1:lhs", V(int64_t{9001})) == doctest::Approx(0.5));
  CHECK(fix_for(f2, 5, "Zip") == nullptr);  // New York only under 10001
}

TEST_CASE("empty correlated set breaks the relaxation contract") {
  Relation rel = table2a();
  Rule fd = zip_city_fd();
  FdViolationGroup group;
  group.lhs_key = {V(int64_t{42})};
  group.rhs_groups[V("Nowhere")] = {1};
  FdCorrelated empty;
  CHECK_THROWS(fd_fixes(rel, group, empty, fd));
}

TEST_CASE("dc fixes invert atoms into half-open ranges at 50/50") {
  Relation rel("emp", {{"salary", Kind::Int}, {"tax", Kind::Float}});
  auto add = [&](TupleId tid, int64_t sal, double tax) {
    Tuple t;
    t.tid = tid;
    t.cells.push_back(Cell(V(sal)));
    t.cells.push_back(Cell(V(tax)));
    rel.add_tuple(std::move(t));
  };
  add(1, 1000, 0.1);
  add(2, 3000, 0.2);
  add(3, 2000, 0.3);
  Rule dc =
      parse_rules("DC emp: !(t1.salary < t2.salary & t1.tax > t2.tax)").front();
  DcViolation vio;
  vio.first = 3;
  vio.second = 2;
  vio.atoms = {0, 1};
  FixSet fs = dc_fixes(rel, vio, dc);

  // Atom 0 (salary): t3 keeps 2000 or moves above 3000; t2 keeps 3000 or
  // drops below 2000.
  const CellFix* s2 = fix_for(fs, 2, "salary");
  REQUIRE(s2 != nullptr);
  REQUIRE(s2->candidates.size() == 2);
  bool saw_range = false;
  for (const auto& c : s2->candidates) {
    CHECK(c.prob == doctest::Approx(0.5));
    CHECK(c.provenance == std::set<TupleId>({2, 3}));
    if (c.value.is_range) {
      saw_range = true;
      CHECK(c.value.op == RangeOp::Lt);
      CHECK(c.value.value.equals(V(int64_t{2000})));
    } else {
      CHECK(c.value.value.equals(V(int64_t{3000})));
    }
  }
  CHECK(saw_range);
  const CellFix* s3 = fix_for(fs, 3, "salary");
  REQUIRE(s3 != nullptr);
  for (const auto& c : s3->candidates)
    if (c.value.is_range) {
      CHECK(c.value.op == RangeOp::Gt);
      CHECK(c.value.value.equals(V(int64_t{3000})));
    }
  // Atom 1 (tax) inverts > into <.
  const CellFix* t3 = fix_for(fs, 3, "tax");
  REQUIRE(t3 != nullptr);
  for (const auto& c : t3->candidates)
    if (c.value.is_range) CHECK(c.value.op == RangeOp::Lt);

  // A non-violating pair is a contract violation.
  DcViolation not_vio;
  not_vio.first = 1;
  not_vio.second = 2;
  not_vio.atoms = {0, 1};
  CHECK_THROWS(dc_fixes(rel, not_vio, dc));
}

TEST_CASE("multi-atom combinations enumerate all non-empty subsets") {
  Relation rel("emp", {{"salary", Kind::Int},
                       {"age", Kind::Int},
                       {"tax", Kind::Float}});
  auto add = [&](TupleId tid, int64_t sal, int64_t age, double tax) {
    Tuple t;
    t.tid = tid;
    t.cells.push_back(Cell(V(sal)));
    t.cells.push_back(Cell(V(age)));
    t.cells.push_back(Cell(V(tax)));
    rel.add_tuple(std::move(t));
  };
  add(1, 1000, 30, 0.3);
  add(2, 2000, 40, 0.2);
  Rule dc = parse_rules(
                "DC emp: !(t1.salary < t2.salary & t1.age < t2.age & "
                "t1.tax > t2.tax)")
                .front();
  DcViolation vio;
  vio.first = 1;
  vio.second = 2;
  vio.atoms = {0, 1, 2};
  auto combos = multi_atom_combinations(rel, vio, dc, vio.atoms);
  CHECK(combos.size() == 7);  // 2^3 - 1
  for (const auto& fs : combos) CHECK_FALSE(fs.empty());
}

TEST_CASE("merge coalesces same-side groups sharing a candidate value") {
  Relation rel = table2a();
  Rule fd = zip_city_fd();
  // Build t2's rhs fix twice with different witnesses and merge.
  Cell base(V("San Francisco"));
  CellFix first;
  first.tid = 2;
  first.attr = "City";
  first.candidates = {
      {CandidateValue::concrete(V("Los Angeles")), 2.0 / 3.0, "2:fd1:rhs",
       {1, 3}},
      {CandidateValue::concrete(V("San Francisco")), 1.0 / 3.0, "2:fd1:rhs",
       {2}}};
  Cell once = merge_fixes(base, first);
  once.validate();

  CellFix second;
  second.tid = 2;
  second.attr = "City";
  second.candidates = {
      {CandidateValue::concrete(V("San Francisco")), 0.5, "9:fd9:rhs", {9}},
      {CandidateValue::concrete(V("Fresno")), 0.5, "9:fd9:rhs", {8}}};
  Cell merged = merge_fixes(once, second);
  merged.validate();
  // Groups share San Francisco: coalesced under the smaller pair id with
  // witness-frequency probabilities (witnesses 1,3 | 2,9 | 8).
  auto ids = merged.pair_ids();
  REQUIRE(ids.size() == 1);
  CHECK(ids[0] == "2:fd1:rhs");
  double total = 0;
  for (const auto& c : merged.candidates()) {
    total += c.prob;
    if (c.value.value.equals(V("Los Angeles")))
      CHECK(c.prob == doctest::Approx(2.0 / 5.0));
    if (c.value.value.equals(V("San Francisco")))
      CHECK(c.prob == doctest::Approx(2.0 / 5.0));
    if (c.value.value.equals(V("Fresno")))
      CHECK(c.prob == doctest::Approx(1.0 / 5.0));
  }
  CHECK(total == doctest::Approx(1.0));
}

TEST_CASE("merge keeps disjoint groups separate and is order-independent") {
  Cell base(V(int64_t{9001}));
  CellFix a;
  a.tid = 2;
  a.attr = "Zip";
  a.candidates = {
      {CandidateValue::concrete(V(int64_t{9001})), 0.5, "2:fd1:lhs", {2}},
      {CandidateValue::concrete(V(int64_t{10001})), 0.5, "2:fd1:lhs", {4}}};
  CellFix b;
  b.tid = 2;
  b.attr = "Zip";
  b.candidates = {
      {CandidateValue::concrete(V(int64_t{7000})), 0.5, "2:fd2:rhs", {5}},
      {CandidateValue::concrete(V(int64_t{8000})), 0.5, "2:fd2:rhs", {6}}};
  Cell ab = merge_fixes(merge_fixes(base, a), b);
  Cell ba = merge_fixes(merge_fixes(base, b), a);
  CHECK(ab == ba);
  CHECK(ab.pair_ids().size() == 2);
  CHECK(ab.counting_value().equals(V(int64_t{9001})));
}

TEST_CASE("merge with an empty incoming fix is the identity") {
  Cell base(V(int64_t{1}));
  CellFix empty;
  empty.tid = 1;
  empty.attr = "A";
  Cell out = merge_fixes(base, empty);
  CHECK(out == base);
}

TEST_CASE("property: rule application order does not change the result") {
  std::mt19937_64 rng(2024);
  auto rules = parse_rules(
      "FD r: A -> B\n"
      "FD r: B -> A\n");
  for (int iter = 0; iter < 50; ++iter) {
    Relation base = random_fd_instance(rng, 4, 4, 5, 0.4);
    auto clean_with = [&](std::vector<int> order) {
      Relation rel = base;
      for (int idx : order) {
        const Rule& fd = rules[idx];
        std::set<TupleId> all;
        for (const auto& t : rel.tuples()) all.insert(t.tid);
        ViolationSet vs = detect_fd_violations(rel, all, fd);
        FixSet fixes;
        for (const auto& g : vs.fd_groups) {
          FixSet f = fd_fixes(rel, g, gather_fd_correlated(rel, g, fd), fd);
          for (auto& cf : f.fixes) fixes.add(std::move(cf));
        }
        apply_fixes(&rel, fixes, fd.id);
      }
      return rel;
    };
    Relation ab = clean_with({0, 1});
    Relation ba = clean_with({1, 0});
    CHECK(ab.same_contents(ba));
  }
}
