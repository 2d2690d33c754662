#include "qdc/offline.hpp"

#include <limits>

#include "qdc/relax.hpp"
#include "qdc/repair.hpp"
#include "qdc/theta.hpp"

namespace qdc {

std::vector<ChangeLogEntry> offline_clean(Relation* rel,
                                          const std::vector<Rule>& rules,
                                          int partitions) {
  std::vector<ChangeLogEntry> log;
  for (const auto& rule : rules) {
    if (rule.is_fd()) {
      std::set<TupleId> scope;
      for (const auto& t : rel->tuples()) scope.insert(t.tid);
      ViolationSet vios = detect_fd_violations(*rel, scope, rule);
      FixSet all;
      for (const auto& group : vios.fd_groups) {
        // Candidate computation re-traverses the dataset for each group.
        FdCorrelated corr = gather_fd_correlated(*rel, group, rule);
        FixSet f = fd_fixes(*rel, group, corr, rule);
        for (auto& cf : f.fixes) all.add(std::move(cf));
      }
      auto changes = apply_fixes(rel, all, rule.id);
      log.insert(log.end(), changes.begin(), changes.end());
      std::set<TupleId>& checked = rel->checked().fd_checked[rule.id];
      checked.insert(scope.begin(), scope.end());
    } else {
      ThetaMatrix m = build_theta_matrix(*rel, rule, partitions);
      auto prev = rel->checked().dc_checked.find(rule.id);
      if (prev != rel->checked().dc_checked.end() &&
          prev->second.partitions == partitions)
        m.checked = prev->second.coords;
      Region full{m.axis_min, m.axis_max};
      ViolationSet vios = partial_theta_join(m, *rel, full, rule);
      FixSet all;
      for (const auto& vio : vios.dc_pairs) {
        FixSet f = dc_fixes(*rel, vio, rule);
        for (auto& cf : f.fixes) all.add(std::move(cf));
      }
      auto changes = apply_fixes(rel, all);
      log.insert(log.end(), changes.begin(), changes.end());
      DcCheckedRegion& reg = rel->checked().dc_checked[rule.id];
      reg.partitions = partitions;
      reg.coords = m.checked;
    }
  }
  return log;
}

}  // namespace qdc
