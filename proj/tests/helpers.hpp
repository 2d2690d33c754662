#pragma once

#include <random>
#include <string>
#include <vector>

#include "qdc/engine.hpp"
#include "qdc/relation.hpp"
#include "qdc/rules.hpp"

namespace qdc::test {

inline Value V(int64_t v) { return Value::integer(v); }
inline Value V(double v) { return Value::real(v); }
inline Value V(const char* v) { return Value::text(v); }

// Relation over (Zip int, City text) named `cities`, tids 1..n.
inline Relation cities(std::vector<std::pair<int64_t, std::string>> rows) {
  Relation rel("cities", {{"Zip", Kind::Int}, {"City", Kind::Text}});
  TupleId tid = 0;
  for (auto& [zip, city] : rows) {
    Tuple t;
    t.tid = ++tid;
    t.cells.push_back(Cell(Value::integer(zip)));
    t.cells.push_back(Cell(Value::text(city)));
    rel.add_tuple(std::move(t));
  }
  return rel;
}

// The running example: five city tuples with two Zip groups.
inline Relation table2a() {
  return cities({{9001, "Los Angeles"},
                 {9001, "San Francisco"},
                 {9001, "Los Angeles"},
                 {10001, "San Francisco"},
                 {10001, "New York"}});
}

inline Rule zip_city_fd() {
  return parse_rules("FD cities: Zip -> City").front();
}

// Random relation over (A int, B int) with `groups` lhs groups of size up
// to `max_group`, rhs values drawn from a domain of `domain` values.
inline Relation random_fd_instance(std::mt19937_64& rng, int groups,
                                   int max_group, int domain,
                                   double dirty_rate,
                                   const std::string& name = "r") {
  Relation rel(name, {{"A", Kind::Int}, {"B", Kind::Int}});
  std::uniform_int_distribution<int> gsize(1, max_group);
  std::uniform_int_distribution<int> dval(0, domain - 1);
  std::bernoulli_distribution dirty(dirty_rate);
  TupleId tid = 0;
  for (int g = 0; g < groups; ++g) {
    int size = gsize(rng);
    int64_t base = dval(rng);
    for (int i = 0; i < size; ++i) {
      Tuple t;
      t.tid = ++tid;
      t.cells.push_back(Cell(Value::integer(g)));
      int64_t b = dirty(rng) ? dval(rng) : base;
      t.cells.push_back(Cell(Value::integer(b)));
      rel.add_tuple(std::move(t));
    }
  }
  return rel;
}

}  // namespace qdc::test
