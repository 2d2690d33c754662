#pragma once

#include <string>
#include <vector>

#include "qdc/relation.hpp"
#include "qdc/repair.hpp"

namespace qdc {

struct ChangeLogEntry {
  TupleId tid;
  std::string attr;
};

// Applies fixes in place: targeted cells become (or merge into) uncertain
// cells, original values are retained for provenance, cardinality never
// changes. When a rule id is given, the fixed tuples are marked checked for
// it. Returns the change log.
std::vector<ChangeLogEntry> apply_fixes(Relation* rel, const FixSet& fixes,
                                        const std::string& rule_id = "");

// CSV with a header line and RFC-4180 quoting; kinds come from a sidecar
// schema file with one `attr:kind` line per column. Tuple ids follow row
// order, starting at 1.
Relation load_csv(const std::string& csv_path, const std::string& schema_path);

std::vector<Attribute> load_schema(const std::string& schema_path);

// Line-delimited probabilistic dataset format: one JSON record per tuple,
// then a trailer with the per-rule checked state. Round-trips exactly.
void save_prob(const std::string& path, const Relation& rel);
Relation load_prob(const std::string& path);

}  // namespace qdc
