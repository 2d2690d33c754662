#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qdc/cost.hpp"
#include "qdc/query.hpp"
#include "qdc/relation.hpp"
#include "qdc/rules.hpp"
#include "qdc/store.hpp"
#include "qdc/theta.hpp"

namespace qdc {

enum class OpKind {
  Scan,
  Select,
  Project,
  EquiJoin,
  GroupBy,
  CleanSelect,
  CleanJoin,
  CleanFull
};

const char* op_kind_name(OpKind k);

struct PlanNode {
  OpKind kind = OpKind::Scan;
  std::string relation;               // Scan/CleanFull
  std::vector<std::string> rules;     // cleaning operators
  std::vector<std::unique_ptr<PlanNode>> children;
};

struct Plan {
  std::unique_ptr<PlanNode> root;
  std::string describe() const;  // bottom-up arrow form
};

struct ResultRow {
  std::vector<Cell> cells;
  std::vector<TupleId> lineage;  // originating tids, one per FROM relation
};

struct ResultSet {
  std::vector<std::string> columns;
  std::vector<ResultRow> rows;
};

struct QueryReport {
  ResultSet result;
  std::string plan;
  Strategy strategy = Strategy::Incremental;
  bool switched = false;       // this query triggered full-remaining
  uint64_t eps_found = 0;      // violating tuples/pairs detected
  uint64_t result_size = 0;    // pre-projection qualifying tuples
  uint64_t relax_extra = 0;
  int relax_iterations = 0;
  uint64_t recheck_violations = 0;  // post-clean re-check (joins)
  std::optional<AccuracyEstimate> dc_estimate;
  double parse_ms = 0, clean_ms = 0, eval_ms = 0, total_ms = 0;
};

struct EngineConfig {
  std::string mode = "auto";  // auto | incremental | offline
  int partitions = 64;        // perfect square
  double accuracy_threshold = 0.8;
};

// Single-node query engine with on-demand cleaning. Holds the relations,
// the rule set, per-rule cost statistics and theta matrices, and runs one
// query -> clean -> update cycle at a time.
class Engine {
 public:
  explicit Engine(EngineConfig cfg = {});

  void add_relation(Relation rel);
  void set_rules(std::vector<Rule> rules);

  Relation& relation(const std::string& name);
  const Relation& relation(const std::string& name) const;
  bool has_relation(const std::string& name) const;
  const std::vector<Rule>& rules() const { return rules_; }

  CostStats& stats(const std::string& rel, const std::string& rule_id);
  ThetaMatrix& matrix(const std::string& rel, const std::string& rule_id);

  Plan plan(const QueryAst& ast) const;
  QueryReport run(const std::string& query_text);
  QueryReport run(const QueryAst& ast);

  // Cleans everything still unchecked for every rule of the relation.
  void clean_remaining(const std::string& rel_name);

  const EngineConfig& config() const { return cfg_; }

 private:
  struct SideClean {
    uint64_t eps = 0;
    uint64_t extra = 0;
    int iterations = 0;
    bool switched = false;
    Strategy strategy = Strategy::Incremental;
    std::vector<ChangeLogEntry> changes;
    std::optional<AccuracyEstimate> dc_estimate;
  };

  std::vector<Rule> rules_for(const std::string& rel_name,
                              const std::set<std::string>& attrs) const;
  std::vector<Rule> rules_for_relation(const std::string& name) const;
  void sync_matrices(const std::string& rel_name);
  std::set<TupleId> filter(const Relation& rel, const std::string& alias,
                           const std::vector<std::vector<QPred>>& dnf) const;
  SideClean clean_side(Relation& rel, const std::set<TupleId>& answer,
                       const std::vector<Rule>& rules,
                       const std::vector<std::vector<QPred>>& dnf,
                       const std::string& alias);
  void clean_fd_incremental(Relation& rel, const ViolationSet& vios,
                            const Rule& rule, const std::set<TupleId>& scope);
  ResultSet project(const QueryAst& ast,
                    const std::vector<const Relation*>& rels,
                    const std::vector<ResultRow>& rows) const;
  ResultSet group_aggregate(const QueryAst& ast,
                            const std::vector<const Relation*>& rels,
                            ResultSet flat) const;

  EngineConfig cfg_;
  std::map<std::string, Relation> relations_;
  std::vector<Rule> rules_;
  std::map<std::pair<std::string, std::string>, CostStats> stats_;
  std::map<std::pair<std::string, std::string>, ThetaMatrix> matrices_;
};

}  // namespace qdc
