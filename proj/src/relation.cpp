#include "qdc/relation.hpp"

#include <stdexcept>

namespace qdc {

size_t Relation::col_index(const std::string& attr) const {
  for (size_t i = 0; i < schema_.size(); ++i)
    if (schema_[i].name == attr) return i;
  throw std::runtime_error("unknown attribute '" + attr + "' in relation '" +
                           name_ + "'");
}

bool Relation::has_column(const std::string& attr) const {
  for (const auto& a : schema_)
    if (a.name == attr) return true;
  return false;
}

void Relation::add_tuple(Tuple t) {
  if (t.cells.size() != schema_.size())
    throw std::runtime_error("tuple arity mismatch in relation '" + name_ +
                             "'");
  if (by_tid_.count(t.tid))
    throw std::runtime_error("duplicate tuple id " + std::to_string(t.tid));
  by_tid_[t.tid] = tuples_.size();
  tuples_.push_back(std::move(t));
}

const Tuple* Relation::find(TupleId tid) const {
  auto it = by_tid_.find(tid);
  return it == by_tid_.end() ? nullptr : &tuples_[it->second];
}

Tuple* Relation::find(TupleId tid) {
  auto it = by_tid_.find(tid);
  return it == by_tid_.end() ? nullptr : &tuples_[it->second];
}

const Cell& Relation::cell(TupleId tid, const std::string& attr) const {
  const Tuple* t = find(tid);
  if (t == nullptr)
    throw std::runtime_error("unknown tuple id " + std::to_string(tid));
  return t->cells[col_index(attr)];
}

bool Relation::same_contents(const Relation& o) const {
  if (tuples_.size() != o.tuples_.size()) return false;
  if (schema_.size() != o.schema_.size()) return false;
  for (size_t i = 0; i < schema_.size(); ++i)
    if (schema_[i].name != o.schema_[i].name ||
        schema_[i].kind != o.schema_[i].kind)
      return false;
  for (const auto& t : tuples_) {
    const Tuple* u = o.find(t.tid);
    if (u == nullptr) return false;
    for (size_t i = 0; i < t.cells.size(); ++i)
      if (!(t.cells[i] == u->cells[i])) return false;
  }
  return checked_ == o.checked_;
}

}  // namespace qdc
