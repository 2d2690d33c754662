#include "qdc/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "qdc/offline.hpp"
#include "qdc/relax.hpp"
#include "qdc/repair.hpp"

namespace qdc {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

Value coerce_literal(const Value& lit, Kind kind) {
  if (lit.kind() == Kind::Int && kind == Kind::Float)
    return Value::real(static_cast<double>(lit.as_int()));
  if (lit.kind() == Kind::Float && kind == Kind::Int) {
    double v = lit.as_float();
    if (std::floor(v) == v)
      return Value::integer(static_cast<int64_t>(v));
  }
  return lit;
}

}  // namespace

const char* op_kind_name(OpKind k) {
  switch (k) {
    case OpKind::Scan:
      return "Scan";
    case OpKind::Select:
      return "Select";
    case OpKind::Project:
      return "Project";
    case OpKind::EquiJoin:
      return "EquiJoin";
    case OpKind::GroupBy:
      return "GroupBy";
    case OpKind::CleanSelect:
      return "CleanSelect";
    case OpKind::CleanJoin:
      return "CleanJoin";
    default:
      return "CleanFull";
  }
}

static std::string describe_node(const PlanNode& n) {
  std::string label = op_kind_name(n.kind);
  if (!n.relation.empty()) label += "(" + n.relation + ")";
  if (n.children.empty()) return label;
  if (n.children.size() == 1)
    return describe_node(*n.children[0]) + "→" + label;
  std::string out = "(";
  for (size_t i = 0; i < n.children.size(); ++i) {
    if (i) out += ", ";
    out += describe_node(*n.children[i]);
  }
  out += ")→" + label;
  return out;
}

std::string Plan::describe() const {
  return root ? describe_node(*root) : "";
}

Engine::Engine(EngineConfig cfg) : cfg_(std::move(cfg)) {
  int k = static_cast<int>(std::lround(std::sqrt(cfg_.partitions)));
  if (k * k != cfg_.partitions)
    throw std::invalid_argument("partitions must be a perfect square");
}

void Engine::add_relation(Relation rel) {
  relations_[rel.name()] = std::move(rel);
}

void Engine::set_rules(std::vector<Rule> rules) { rules_ = std::move(rules); }

Relation& Engine::relation(const std::string& name) {
  auto it = relations_.find(name);
  if (it == relations_.end())
    throw std::runtime_error("unknown relation: " + name);
  return it->second;
}

const Relation& Engine::relation(const std::string& name) const {
  auto it = relations_.find(name);
  if (it == relations_.end())
    throw std::runtime_error("unknown relation: " + name);
  return it->second;
}

bool Engine::has_relation(const std::string& name) const {
  return relations_.count(name) > 0;
}

CostStats& Engine::stats(const std::string& rel, const std::string& rule_id) {
  auto key = std::make_pair(rel, rule_id);
  auto it = stats_.find(key);
  if (it != stats_.end()) return it->second;
  for (const auto& r : rules_)
    if (r.id == rule_id && r.relation == rel && r.is_fd())
      return stats_[key] = precompute_stats(relation(rel), r);
  return stats_[key];  // DC rules: size-only stats
}

ThetaMatrix& Engine::matrix(const std::string& rel,
                            const std::string& rule_id) {
  auto key = std::make_pair(rel, rule_id);
  auto it = matrices_.find(key);
  if (it != matrices_.end()) return it->second;
  for (const auto& r : rules_)
    if (r.id == rule_id && r.relation == rel && !r.is_fd()) {
      ThetaMatrix m = build_theta_matrix(relation(rel), r, cfg_.partitions);
      auto ck = relation(rel).checked().dc_checked.find(rule_id);
      if (ck != relation(rel).checked().dc_checked.end() &&
          ck->second.partitions == cfg_.partitions)
        m.checked = ck->second.coords;
      return matrices_[key] = std::move(m);
    }
  throw std::runtime_error("no DC rule " + rule_id + " over " + rel);
}

std::vector<Rule> Engine::rules_for(const std::string& rel_name,
                                    const std::set<std::string>& attrs) const {
  std::vector<Rule> out;
  for (const auto& r : rules_)
    if (r.relation == rel_name && rule_overlaps_query(r, attrs, {}))
      out.push_back(r);
  return out;
}

std::set<TupleId> Engine::filter(
    const Relation& rel, const std::string& alias,
    const std::vector<std::vector<QPred>>& dnf) const {
  std::set<TupleId> out;
  for (const auto& t : rel.tuples()) {
    bool any = dnf.empty();
    for (const auto& conj : dnf) {
      bool all = true;
      for (const auto& p : conj) {
        if (!p.col.rel.empty() && p.col.rel != alias) continue;
        size_t c = rel.col_index(p.col.attr);
        Value lit = coerce_literal(p.literal, rel.schema()[c].kind);
        if (!cell_qualifies(t.cells[c], p.op, lit)) {
          all = false;
          break;
        }
      }
      if (all) {
        any = true;
        break;
      }
    }
    if (any) out.insert(t.tid);
  }
  return out;
}

void Engine::clean_fd_incremental(Relation& rel, const ViolationSet& vios,
                                  const Rule& rule,
                                  const std::set<TupleId>& scope) {
  FixSet all;
  std::vector<FdCorrelated> corr =
      gather_fd_correlated_batch(rel, vios.fd_groups, rule);
  for (size_t g = 0; g < vios.fd_groups.size(); ++g) {
    FixSet f = fd_fixes(rel, vios.fd_groups[g], corr[g], rule);
    for (auto& cf : f.fixes) all.add(std::move(cf));
  }
  apply_fixes(&rel, all, rule.id);
  std::set<TupleId>& checked = rel.checked().fd_checked[rule.id];
  checked.insert(scope.begin(), scope.end());
}

Engine::SideClean Engine::clean_side(Relation& rel,
                                     const std::set<TupleId>& answer,
                                     const std::vector<Rule>& rules,
                                     const std::vector<std::vector<QPred>>& dnf,
                                     const std::string& alias) {
  SideClean out;
  if (rules.empty()) return out;

  struct FdWork {
    const Rule* rule;
    std::set<TupleId> scope;
    ViolationSet vios;
    double eps_i = 0;
    double cost_i = 0;
  };
  std::vector<FdWork> fd_work;
  double incremental_side = 0, offline_side = 0;

  for (const auto& rule : rules) {
    if (rule.is_fd()) {
      RelaxationResult rr = relax_fd(rel, answer, rule);
      out.extra += rr.extra.size();
      out.iterations = std::max(out.iterations, rr.iterations);
      FdWork w;
      w.rule = &rule;
      w.scope = answer;
      w.scope.insert(rr.extra.begin(), rr.extra.end());
      w.vios = detect_fd_violations(rel, w.scope, rule);
      for (const auto& g : w.vios.fd_groups) w.eps_i += g.members().size();
      out.eps += static_cast<uint64_t>(w.eps_i);
      CostStats& st = stats(rel.name(), rule.id);
      double d_i = static_cast<double>(answer.size() + rr.extra.size());
      w.cost_i = cost_incremental(st, answer.size(), rr.extra.size(), w.eps_i,
                                  d_i);
      incremental_side += st.cum_incremental + w.cost_i;
      offline_side += cost_offline(st, st.queries + 1);
      fd_work.push_back(std::move(w));
    } else {
      // DC path: Algorithm 2 decides full vs partial before the cost model.
      ThetaMatrix& m = matrix(rel.name(), rule.id);
      Region region{m.axis_min, m.axis_max};
      size_t axis_col = rel.col_index(m.axis_attr);
      (void)axis_col;
      for (const auto& conj : dnf)
        for (const auto& p : conj) {
          if (!p.col.rel.empty() && p.col.rel != alias) continue;
          if (p.col.attr != m.axis_attr || !p.literal.is_numeric()) continue;
          double v = p.literal.numeric();
          switch (p.op) {
            case CmpOp::Eq:
              region.lo = std::max(region.lo, v);
              region.hi = std::min(region.hi, v);
              break;
            case CmpOp::Lt:
            case CmpOp::Le:
              region.hi = std::min(region.hi, v);
              break;
            case CmpOp::Gt:
            case CmpOp::Ge:
              region.lo = std::max(region.lo, v);
              break;
            default:
              break;
          }
        }
      estimate_errors(m, rel, rule);
      int result_range = m.bucket_of((region.lo + region.hi) / 2.0);
      uint64_t result_size = answer.size();
      AccuracyEstimate est = estimate_accuracy(m, result_size, result_range);
      out.dc_estimate = est;
      if (est.accuracy > cfg_.accuracy_threshold) {
        region = {m.axis_min, m.axis_max};  // full cleaning
        out.strategy = Strategy::FullRemaining;
      }
      ViolationSet vs = partial_theta_join(m, rel, region, rule);
      out.eps += vs.dc_pairs.size();
      FixSet all;
      for (const auto& vio : vs.dc_pairs) {
        FixSet f = dc_fixes(rel, vio, rule);
        for (auto& cf : f.fixes) all.add(std::move(cf));
      }
      auto changes = apply_fixes(&rel, all);
      out.changes.insert(out.changes.end(), changes.begin(), changes.end());
      DcCheckedRegion& reg = rel.checked().dc_checked[rule.id];
      reg.partitions = cfg_.partitions;
      reg.coords = m.checked;
    }
  }

  if (!fd_work.empty()) {
    Strategy strat = Strategy::Incremental;
    if (cfg_.mode == "auto" && incremental_side > offline_side)
      strat = Strategy::FullRemaining;
    if (strat == Strategy::FullRemaining) {
      out.switched = true;
      out.strategy = Strategy::FullRemaining;
      auto changes = offline_clean(&rel, rules_for_relation(rel.name()),
                                   cfg_.partitions);
      out.changes.insert(out.changes.end(), changes.begin(), changes.end());
      sync_matrices(rel.name());
    } else {
      for (auto& w : fd_work) {
        size_t before = out.changes.size();
        FixSet all;
        for (const auto& group : w.vios.fd_groups) {
          FdCorrelated corr = gather_fd_correlated(rel, group, *w.rule);
          FixSet f = fd_fixes(rel, group, corr, *w.rule);
          for (auto& cf : f.fixes) all.add(std::move(cf));
        }
        auto changes = apply_fixes(&rel, all, w.rule->id);
        out.changes.insert(out.changes.end(), changes.begin(), changes.end());
        (void)before;
        std::set<TupleId>& checked = rel.checked().fd_checked[w.rule->id];
        checked.insert(w.scope.begin(), w.scope.end());
      }
    }
    for (auto& w : fd_work) {
      CostStats& st = stats(rel.name(), w.rule->id);
      update_stats(&st, answer.size(), w.eps_i, w.cost_i);
    }
  }
  return out;
}

std::vector<Rule> Engine::rules_for_relation(const std::string& name) const {
  std::vector<Rule> out;
  for (const auto& r : rules_)
    if (r.relation == name) out.push_back(r);
  return out;
}

void Engine::sync_matrices(const std::string& rel_name) {
  const Relation& rel = relation(rel_name);
  for (auto& [key, m] : matrices_) {
    if (key.first != rel_name) continue;
    auto it = rel.checked().dc_checked.find(key.second);
    if (it != rel.checked().dc_checked.end() &&
        it->second.partitions == cfg_.partitions)
      m.checked = it->second.coords;
  }
}

void Engine::clean_remaining(const std::string& rel_name) {
  offline_clean(&relation(rel_name), rules_for_relation(rel_name),
                cfg_.partitions);
  sync_matrices(rel_name);
}

Plan Engine::plan(const QueryAst& ast) const {
  auto side_chain = [&](const FromItem& f) {
    auto node = std::make_unique<PlanNode>();
    node->kind = OpKind::Scan;
    node->relation = f.name;
    bool has_pred = false;
    for (const auto& conj : ast.where_dnf)
      for (const auto& p : conj)
        if (p.col.rel.empty() || p.col.rel == f.alias) has_pred = true;
    if (has_pred) {
      auto sel = std::make_unique<PlanNode>();
      sel->kind = OpKind::Select;
      sel->children.push_back(std::move(node));
      node = std::move(sel);
      std::set<std::string> attrs = ast.attrs_for(f.alias);
      std::vector<std::string> overlapping;
      for (const auto& r : rules_)
        if (r.relation == f.name && rule_overlaps_query(r, attrs, {}))
          overlapping.push_back(r.id);
      if (!overlapping.empty()) {
        auto cl = std::make_unique<PlanNode>();
        cl->kind = OpKind::CleanSelect;
        cl->rules = std::move(overlapping);
        cl->children.push_back(std::move(node));
        node = std::move(cl);
      }
    }
    return node;
  };

  Plan plan;
  std::unique_ptr<PlanNode> node;
  if (ast.from.size() == 1) {
    node = side_chain(ast.from[0]);
  } else {
    auto join = std::make_unique<PlanNode>();
    join->kind = OpKind::EquiJoin;
    join->children.push_back(side_chain(ast.from[0]));
    join->children.push_back(side_chain(ast.from[1]));
    std::vector<std::string> overlapping;
    for (const auto& f : ast.from) {
      std::set<std::string> attrs = ast.attrs_for(f.alias);
      for (const auto& r : rules_)
        if (r.relation == f.name && rule_overlaps_query(r, attrs, {}))
          overlapping.push_back(r.id);
    }
    node = std::move(join);
    if (!overlapping.empty()) {
      auto cl = std::make_unique<PlanNode>();
      cl->kind = OpKind::CleanJoin;
      cl->rules = std::move(overlapping);
      cl->children.push_back(std::move(node));
      node = std::move(cl);
    }
  }
  if (!ast.group_by.empty() ||
      std::any_of(ast.select.begin(), ast.select.end(),
                  [](const SelectItem& s) { return s.agg != AggFn::None; })) {
    auto gb = std::make_unique<PlanNode>();
    gb->kind = OpKind::GroupBy;
    gb->children.push_back(std::move(node));
    node = std::move(gb);
  }
  auto proj = std::make_unique<PlanNode>();
  proj->kind = OpKind::Project;
  proj->children.push_back(std::move(node));
  plan.root = std::move(proj);
  return plan;
}

ResultSet Engine::project(const QueryAst& ast,
                          const std::vector<const Relation*>& rels,
                          const std::vector<ResultRow>& rows) const {
  bool qualify = rels.size() > 1;
  struct ColPick {
    size_t rel_idx;
    size_t col;
    std::string label;
  };
  std::vector<ColPick> picks;
  auto resolve = [&](const QColRef& c) -> std::pair<size_t, size_t> {
    for (size_t r = 0; r < rels.size(); ++r) {
      const std::string& alias = ast.from[r].alias;
      if ((c.rel.empty() || c.rel == alias) && rels[r]->has_column(c.attr))
        return {r, rels[r]->col_index(c.attr)};
    }
    throw std::runtime_error("unknown column: " +
                             (c.rel.empty() ? c.attr : c.rel + "." + c.attr));
  };
  for (const auto& item : ast.select) {
    if (item.star) {
      for (size_t r = 0; r < rels.size(); ++r)
        for (size_t c = 0; c < rels[r]->schema().size(); ++c)
          picks.push_back({r, c,
                           qualify ? ast.from[r].alias + "." +
                                         rels[r]->schema()[c].name
                                   : rels[r]->schema()[c].name});
    } else {
      auto [r, c] = resolve(item.col);
      picks.push_back({r, c,
                       qualify ? ast.from[r].alias + "." +
                                     rels[r]->schema()[c].name
                               : rels[r]->schema()[c].name});
    }
  }
  ResultSet out;
  for (const auto& p : picks) out.columns.push_back(p.label);
  for (const auto& row : rows) {
    ResultRow pr;
    pr.lineage = row.lineage;
    for (const auto& p : picks) {
      const Tuple* t = rels[p.rel_idx]->find(row.lineage[p.rel_idx]);
      pr.cells.push_back(t->cells[p.col]);
    }
    out.rows.push_back(std::move(pr));
  }
  return out;
}

namespace {

// Weighted concrete options of a cell: candidate probabilities normalized
// across pair groups, certain cells are unit singletons.
std::vector<std::pair<Value, double>> weighted_values(const Cell& cell) {
  if (cell.is_certain()) {
    if (cell.value().is_null()) return {};
    return {{cell.value(), 1.0}};
  }
  size_t groups = cell.pair_ids().size();
  std::map<Value, double> acc;
  for (const auto& c : cell.candidates())
    if (!c.value.is_range)
      acc[c.value.value] += c.prob / static_cast<double>(groups);
  return {acc.begin(), acc.end()};
}

double expected_numeric(const Cell& cell) {
  auto wv = weighted_values(cell);
  double total = 0, weight = 0;
  for (const auto& [v, w] : wv) {
    total += v.numeric() * w;
    weight += w;
  }
  return weight > 0 ? total / weight : 0.0;
}

Value representative(const Cell& cell) {
  return cell.is_certain() ? cell.value() : most_probable(cell);
}

}  // namespace

ResultSet Engine::group_aggregate(const QueryAst& ast,
                                  const std::vector<const Relation*>& rels,
                                  ResultSet flat) const {
  // Column index per group-by attr and per aggregate target in `flat`.
  auto col_of = [&](const QColRef& c) -> size_t {
    for (size_t i = 0; i < flat.columns.size(); ++i) {
      const std::string& label = flat.columns[i];
      std::string want = c.attr;
      if (label == want) return i;
      auto dot = label.find('.');
      if (dot != std::string::npos && label.substr(dot + 1) == c.attr &&
          (c.rel.empty() || label.substr(0, dot) == c.rel))
        return i;
    }
    throw std::runtime_error("aggregate/group column not in select list: " +
                             c.attr);
  };
  (void)rels;

  struct GroupAcc {
    double count = 0;
    std::map<size_t, double> sums;           // select idx -> weighted sum
    std::map<size_t, Value> mins, maxs;      // select idx -> extreme
    std::vector<Value> key;
  };
  std::map<std::vector<Value>, GroupAcc> groups;

  std::vector<size_t> key_cols;
  for (const auto& g : ast.group_by) key_cols.push_back(col_of(g));

  for (const auto& row : flat.rows) {
    // Expand uncertain grouping cells into weighted key options.
    std::vector<std::pair<std::vector<Value>, double>> keys{{{}, 1.0}};
    for (size_t kc : key_cols) {
      auto wv = weighted_values(row.cells[kc]);
      if (wv.empty()) {
        keys.clear();
        break;
      }
      std::vector<std::pair<std::vector<Value>, double>> next;
      for (const auto& [k, w] : keys)
        for (const auto& [v, p] : wv) {
          auto nk = k;
          nk.push_back(v);
          next.push_back({std::move(nk), w * p});
        }
      keys = std::move(next);
    }
    for (const auto& [key, w] : keys) {
      GroupAcc& acc = groups[key];
      acc.key = key;
      acc.count += w;
      for (size_t si = 0; si < ast.select.size(); ++si) {
        const SelectItem& item = ast.select[si];
        if (item.agg == AggFn::None || item.agg == AggFn::Count) continue;
        size_t c = col_of(item.col);
        if (item.agg == AggFn::Sum || item.agg == AggFn::Avg) {
          acc.sums[si] += w * expected_numeric(row.cells[c]);
        } else {
          Value v = representative(row.cells[c]);
          if (v.is_null()) continue;
          auto& slot = item.agg == AggFn::Min ? acc.mins[si] : acc.maxs[si];
          if (slot.is_null() ||
              (item.agg == AggFn::Min ? v < slot : slot < v))
            slot = v;
        }
      }
    }
  }

  ResultSet out;
  for (const auto& item : ast.select) {
    std::string label;
    switch (item.agg) {
      case AggFn::None:
        label = item.col.attr;
        break;
      case AggFn::Count:
        label = "COUNT(" + (item.star ? std::string("*") : item.col.attr) + ")";
        break;
      case AggFn::Sum:
        label = "SUM(" + item.col.attr + ")";
        break;
      case AggFn::Avg:
        label = "AVG(" + item.col.attr + ")";
        break;
      case AggFn::Min:
        label = "MIN(" + item.col.attr + ")";
        break;
      default:
        label = "MAX(" + item.col.attr + ")";
    }
    out.columns.push_back(label);
  }

  for (const auto& [key, acc] : groups) {
    ResultRow row;
    for (size_t si = 0; si < ast.select.size(); ++si) {
      const SelectItem& item = ast.select[si];
      switch (item.agg) {
        case AggFn::None: {
          // Must be a group key.
          size_t gi = 0;
          bool found = false;
          for (; gi < ast.group_by.size(); ++gi)
            if (ast.group_by[gi].attr == item.col.attr) {
              found = true;
              break;
            }
          if (!found)
            throw std::runtime_error(
                "non-aggregate select item must appear in GROUP BY: " +
                item.col.attr);
          row.cells.push_back(Cell(key[gi]));
          break;
        }
        case AggFn::Count:
          row.cells.push_back(Cell(Value::real(acc.count)));
          break;
        case AggFn::Sum:
          row.cells.push_back(Cell(Value::real(
              acc.sums.count(si) ? acc.sums.at(si) : 0.0)));
          break;
        case AggFn::Avg:
          row.cells.push_back(Cell(Value::real(
              acc.count > 0 && acc.sums.count(si)
                  ? acc.sums.at(si) / acc.count
                  : 0.0)));
          break;
        case AggFn::Min:
          row.cells.push_back(Cell(acc.mins.count(si) ? acc.mins.at(si)
                                                      : Value()));
          break;
        default:
          row.cells.push_back(Cell(acc.maxs.count(si) ? acc.maxs.at(si)
                                                      : Value()));
      }
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

QueryReport Engine::run(const std::string& query_text) {
  auto t0 = Clock::now();
  QueryAst ast = parse_query(query_text);
  QueryReport report = run(ast);
  report.parse_ms = 0;
  report.total_ms = ms_since(t0);
  return report;
}

QueryReport Engine::run(const QueryAst& ast) {
  auto t0 = Clock::now();
  QueryReport report;
  report.plan = plan(ast).describe();

  std::vector<Relation*> rels;
  for (const auto& f : ast.from) rels.push_back(&relation(f.name));

  if (cfg_.mode == "offline") {
    auto tc = Clock::now();
    for (const auto& f : ast.from) clean_remaining(f.name);
    report.clean_ms += ms_since(tc);
    report.strategy = Strategy::FullRemaining;
  }

  bool cleaning = cfg_.mode != "offline";

  std::vector<ResultRow> rows;
  if (ast.from.size() == 1) {
    Relation& rel = *rels[0];
    const std::string& alias = ast.from[0].alias;
    std::set<TupleId> answer = filter(rel, alias, ast.where_dnf);
    report.result_size = answer.size();
    if (cleaning) {
      std::set<std::string> attrs = ast.attrs_for(alias);
      std::vector<Rule> overlap = rules_for(rel.name(), attrs);
      auto tc = Clock::now();
      SideClean sc = clean_side(rel, answer, overlap, ast.where_dnf, alias);
      report.clean_ms += ms_since(tc);
      report.eps_found += sc.eps;
      report.relax_extra += sc.extra;
      report.relax_iterations = std::max(report.relax_iterations,
                                         sc.iterations);
      report.switched |= sc.switched;
      if (sc.strategy == Strategy::FullRemaining)
        report.strategy = Strategy::FullRemaining;
      report.dc_estimate = sc.dc_estimate;
      answer = filter(rel, alias, ast.where_dnf);  // re-filter cleaned data
      report.result_size = answer.size();
    }
    for (TupleId tid : answer) {
      ResultRow row;
      row.lineage = {tid};
      row.cells = rel.find(tid)->cells;
      rows.push_back(std::move(row));
    }
  } else {
    Relation& a = *rels[0];
    Relation& b = *rels[1];
    const std::string& alias_a = ast.from[0].alias;
    const std::string& alias_b = ast.from[1].alias;

    // Predicates local to one side (conjunctive WHERE only).
    auto local_dnf = [&](const std::string& alias) {
      std::vector<std::vector<QPred>> out;
      if (ast.where_dnf.size() > 1) return out;  // evaluated after the join
      std::vector<QPred> conj;
      if (!ast.where_dnf.empty())
        for (const auto& p : ast.where_dnf[0])
          if (p.col.rel == alias ||
              (p.col.rel.empty() && a.has_column(p.col.attr) &&
               alias == alias_a))
            conj.push_back(p);
      if (!conj.empty()) out.push_back(std::move(conj));
      return out;
    };
    auto dnf_a = local_dnf(alias_a);
    auto dnf_b = local_dnf(alias_b);

    QColRef ja = ast.join->first, jb = ast.join->second;
    if (!(ja.rel == alias_a || (ja.rel.empty() && a.has_column(ja.attr))))
      std::swap(ja, jb);
    size_t col_a = a.col_index(ja.attr);
    size_t col_b = b.col_index(jb.attr);

    std::set<TupleId> answer_a = filter(a, alias_a, dnf_a);
    if (cleaning) {
      std::set<std::string> attrs_a = ast.attrs_for(alias_a);
      auto tc = Clock::now();
      SideClean sa = clean_side(a, answer_a, rules_for(a.name(), attrs_a),
                                dnf_a, alias_a);
      report.clean_ms += ms_since(tc);
      report.eps_found += sa.eps;
      report.relax_extra += sa.extra;
      report.switched |= sa.switched;
      answer_a = filter(a, alias_a, dnf_a);
    }

    // Initial join.
    std::set<TupleId> qual_b_pre = filter(b, alias_b, dnf_b);
    std::vector<std::pair<TupleId, TupleId>> pairs;
    for (TupleId atid : answer_a) {
      const Cell& key_a = a.find(atid)->cells[col_a];
      for (TupleId btid : qual_b_pre)
        if (keys_overlap(key_a, b.find(btid)->cells[col_b]))
          pairs.push_back({atid, btid});
    }

    if (cleaning) {
      // Clean the qualifying part of B, then incrementally re-join the
      // changed tuples.
      std::set<TupleId> qual_b;
      for (const auto& [x, y] : pairs) qual_b.insert(y);
      std::set<std::string> attrs_b = ast.attrs_for(alias_b);
      auto tc = Clock::now();
      SideClean sb = clean_side(b, qual_b, rules_for(b.name(), attrs_b),
                                dnf_b, alias_b);
      report.clean_ms += ms_since(tc);
      report.eps_found += sb.eps;
      report.relax_extra += sb.extra;
      report.switched |= sb.switched;

      std::set<TupleId> changed_b;
      for (const auto& ch : sb.changes) changed_b.insert(ch.tid);
      if (!changed_b.empty()) {
        std::erase_if(pairs, [&](const auto& pr) {
          return changed_b.count(pr.second) > 0;
        });
        std::set<TupleId> qual_b_post = filter(b, alias_b, dnf_b);
        for (TupleId btid : changed_b) {
          if (!qual_b_post.count(btid)) continue;
          const Cell& key_b = b.find(btid)->cells[col_b];
          for (TupleId atid : answer_a)
            if (keys_overlap(a.find(atid)->cells[col_a], key_b))
              pairs.push_back({atid, btid});
        }
      }

      // Post-clean re-check: the touched scopes must hold no new
      // violations.
      std::set<TupleId> scope_a, scope_b;
      for (const auto& [x, y] : pairs) {
        scope_a.insert(x);
        scope_b.insert(y);
      }
      for (const auto& r : rules_) {
        if (!r.is_fd()) continue;
        const std::set<TupleId>* scope = nullptr;
        Relation* rel = nullptr;
        if (r.relation == a.name()) {
          scope = &scope_a;
          rel = &a;
        } else if (r.relation == b.name()) {
          scope = &scope_b;
          rel = &b;
        } else {
          continue;
        }
        ViolationSet vs = detect_fd_violations(*rel, *scope, r);
        for (const auto& g : vs.fd_groups)
          report.recheck_violations += g.members().size();
      }
    }

    std::sort(pairs.begin(), pairs.end());
    report.result_size = pairs.size();
    for (const auto& [atid, btid] : pairs) {
      ResultRow row;
      row.lineage = {atid, btid};
      rows.push_back(std::move(row));
    }
    // Disjunctive WHERE over two relations: evaluate after the join.
    if (ast.where_dnf.size() > 1) {
      std::set<TupleId> ok_a = filter(a, alias_a, ast.where_dnf);
      std::set<TupleId> ok_b = filter(b, alias_b, ast.where_dnf);
      std::erase_if(rows, [&](const ResultRow& r) {
        return !ok_a.count(r.lineage[0]) && !ok_b.count(r.lineage[1]);
      });
      report.result_size = rows.size();
    }
  }

  std::vector<const Relation*> crels(rels.begin(), rels.end());
  ResultSet flat;
  bool aggregated =
      !ast.group_by.empty() ||
      std::any_of(ast.select.begin(), ast.select.end(),
                  [](const SelectItem& s) { return s.agg != AggFn::None; });
  if (aggregated) {
    // Aggregation reads full tuples; project afterwards.
    QueryAst wide = ast;
    wide.select.clear();
    SelectItem star;
    star.star = true;
    wide.select.push_back(star);
    flat = project(wide, crels, rows);
    report.result = group_aggregate(ast, crels, std::move(flat));
  } else {
    report.result = project(ast, crels, rows);
  }
  report.eval_ms = ms_since(t0) - report.clean_ms;
  report.total_ms = ms_since(t0);
  return report;
}

}  // namespace qdc
