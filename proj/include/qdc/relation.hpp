#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "qdc/cell.hpp"

namespace qdc {

struct Attribute {
  std::string name;
  Kind kind = Kind::Text;
};

struct Tuple {
  TupleId tid = 0;
  std::vector<Cell> cells;  // aligned to schema
};

// Per-rule record of already-examined data: tuple sets for FDs, matrix
// partition coordinates for DCs.
struct DcCheckedRegion {
  int partitions = 0;  // p used when the coordinates were recorded
  std::set<std::pair<int, int>> coords;  // upper-diagonal (row <= col)
};

struct CheckedState {
  std::map<std::string, std::set<TupleId>> fd_checked;
  std::map<std::string, DcCheckedRegion> dc_checked;

  bool operator==(const CheckedState& o) const {
    if (fd_checked != o.fd_checked) return false;
    if (dc_checked.size() != o.dc_checked.size()) return false;
    for (const auto& [id, reg] : dc_checked) {
      auto it = o.dc_checked.find(id);
      if (it == o.dc_checked.end() || it->second.partitions != reg.partitions ||
          it->second.coords != reg.coords)
        return false;
    }
    return true;
  }
};

class Relation {
 public:
  Relation() = default;
  Relation(std::string name, std::vector<Attribute> schema)
      : name_(std::move(name)), schema_(std::move(schema)) {}

  const std::string& name() const { return name_; }
  const std::vector<Attribute>& schema() const { return schema_; }
  std::vector<Tuple>& tuples() { return tuples_; }
  const std::vector<Tuple>& tuples() const { return tuples_; }
  CheckedState& checked() { return checked_; }
  const CheckedState& checked() const { return checked_; }

  size_t col_index(const std::string& attr) const;
  bool has_column(const std::string& attr) const;

  void add_tuple(Tuple t);
  const Tuple* find(TupleId tid) const;
  Tuple* find(TupleId tid);

  const Cell& cell(TupleId tid, const std::string& attr) const;

  bool same_contents(const Relation& o) const;

 private:
  std::string name_;
  std::vector<Attribute> schema_;
  std::vector<Tuple> tuples_;
  std::map<TupleId, size_t> by_tid_;
  CheckedState checked_;
};

}  // namespace qdc
