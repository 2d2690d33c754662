#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "qdc/engine.hpp"
#include "qdc/harness.hpp"
#include "qdc/offline.hpp"
#include "qdc/store.hpp"

namespace {

using namespace qdc;

std::string render_cell(const Cell& cell) {
  if (cell.is_certain()) return cell.value().to_string();
  std::ostringstream os;
  os << "{";
  bool first = true;
  std::string group;
  for (const auto& c : cell.candidates()) {
    if (!first) os << (c.pair_id == group ? ", " : " | ");
    first = false;
    group = c.pair_id;
    os << c.value.to_string() << " " << c.prob * 100 << "%";
  }
  os << "}";
  return os.str();
}

void print_result(std::ostream& os, const ResultSet& rs) {
  for (size_t i = 0; i < rs.columns.size(); ++i)
    os << (i ? " | " : "") << rs.columns[i];
  os << "\n";
  for (const auto& row : rs.rows) {
    for (size_t i = 0; i < row.cells.size(); ++i)
      os << (i ? " | " : "") << render_cell(row.cells[i]);
    os << "\n";
  }
}

bool is_prob_file(const std::string& path) {
  return path.size() > 5 && path.substr(path.size() - 5) == ".prob";
}

Relation load_data(const std::string& data, const std::string& schema) {
  if (is_prob_file(data)) return load_prob(data);
  if (schema.empty())
    throw std::runtime_error("--schema required for CSV input");
  return load_csv(data, schema);
}

Engine make_engine(const std::vector<std::string>& data,
                   const std::vector<std::string>& schema,
                   const std::string& rules_path, const EngineConfig& cfg) {
  Engine eng(cfg);
  for (size_t i = 0; i < data.size(); ++i)
    eng.add_relation(
        load_data(data[i], i < schema.size() ? schema[i] : std::string()));
  if (!rules_path.empty()) {
    std::ifstream in(rules_path);
    if (!in) throw std::runtime_error("cannot open rules file " + rules_path);
    std::ostringstream ss;
    ss << in.rdbuf();
    eng.set_rules(parse_rules(ss.str()));
  }
  return eng;
}

int cmd_repl(const std::vector<std::string>& data,
             const std::vector<std::string>& schema,
             const std::string& rules_path, const EngineConfig& cfg) {
  Engine eng = make_engine(data, schema, rules_path, cfg);
  std::string rel_name = eng.rules().empty()
                             ? ""
                             : eng.rules().front().relation;
  std::string line;
  std::cout << "qdc> " << std::flush;
  while (std::getline(std::cin, line)) {
    try {
      if (line.empty()) {
        std::cout << "qdc> " << std::flush;
        continue;
      }
      if (line == "\\q" || line == "\\quit") break;
      if (line.rfind("\\save", 0) == 0) {
        std::istringstream is(line.substr(5));
        std::string path, name;
        is >> path >> name;
        if (name.empty() && eng.has_relation(rel_name)) name = rel_name;
        save_prob(path, eng.relation(name));
        std::cout << "saved " << name << " to " << path << "\n";
      } else if (line == "\\stats") {
        for (const auto& r : eng.rules()) {
          if (!r.is_fd()) continue;
          const CostStats& st = eng.stats(r.relation, r.id);
          std::cout << r.id << ": n=" << st.n << " eps=" << st.eps
                    << " p=" << st.p << " queries=" << st.queries
                    << " sum_q=" << st.sum_q << " sum_eps=" << st.sum_eps
                    << "\n";
        }
      } else {
        QueryReport rep = eng.run(line);
        print_result(std::cout, rep.result);
        std::cout << "-- " << rep.result.rows.size() << " rows, strategy="
                  << strategy_name(rep.strategy) << ", eps=" << rep.eps_found;
        if (rep.dc_estimate)
          std::cout << ", accuracy=" << rep.dc_estimate->accuracy
                    << ", support=" << rep.dc_estimate->support;
        std::cout << ", time=" << rep.total_ms << "ms\n";
      }
    } catch (const std::exception& e) {
      std::cout << "error: " << e.what() << "\n";
    }
    std::cout << "qdc> " << std::flush;
  }
  return 0;
}

int cmd_batch(const std::vector<std::string>& data,
              const std::vector<std::string>& schema,
              const std::string& rules_path, const std::string& queries_path,
              const std::string& out_path, const std::string& save_path,
              const EngineConfig& cfg) {
  Engine eng = make_engine(data, schema, rules_path, cfg);
  std::ifstream qin(queries_path);
  if (!qin)
    throw std::runtime_error("cannot open queries file " + queries_path);

  std::ostream* os = &std::cout;
  std::ofstream fout;
  if (!out_path.empty()) {
    fout.open(out_path);
    if (!fout) throw std::runtime_error("cannot open " + out_path);
    os = &fout;
  }

  int failures = 0;
  int qid = 0;
  double total_ms = 0;
  int switches = 0;
  std::string line;
  while (std::getline(qin, line)) {
    std::string stripped = line.substr(0, line.find('#'));
    while (!stripped.empty() &&
           std::isspace(static_cast<unsigned char>(stripped.back())))
      stripped.pop_back();
    if (stripped.empty()) continue;
    ++qid;
    *os << "query " << qid << "\n";
    *os << "  sql: " << stripped << "\n";
    try {
      QueryReport rep = eng.run(stripped);
      total_ms += rep.total_ms;
      if (rep.switched) ++switches;
      *os << "  rows: " << rep.result.rows.size() << "\n";
      *os << "  strategy: " << strategy_name(rep.strategy) << "\n";
      *os << "  switched: " << (rep.switched ? "true" : "false") << "\n";
      *os << "  eps: " << rep.eps_found << "\n";
      if (rep.dc_estimate) {
        *os << "  accuracy: " << rep.dc_estimate->accuracy << "\n";
        *os << "  support: " << rep.dc_estimate->support << "\n";
      }
      *os << "  timing_ms: " << rep.total_ms << "\n";
      *os << "  timing_cumulative_ms: " << total_ms << "\n";
    } catch (const std::exception& e) {
      *os << "  error: " << e.what() << "\n";
      ++failures;
    }
  }
  *os << "summary\n";
  *os << "  queries: " << qid << "\n";
  *os << "  switches: " << switches << "\n";
  *os << "  failures: " << failures << "\n";
  *os << "  timing_total_ms: " << total_ms << "\n";
  if (!save_path.empty()) {
    std::string rel = eng.rules().empty() ? "" : eng.rules().front().relation;
    if (eng.has_relation(rel)) save_prob(save_path, eng.relation(rel));
  }
  return failures == 0 ? 0 : 1;
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    out += c;
  }
  out += "\"";
  return out;
}

void save_csv(const std::string& path, const Relation& rel) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  for (size_t i = 0; i < rel.schema().size(); ++i)
    out << (i ? "," : "") << csv_quote(rel.schema()[i].name);
  out << "\n";
  for (const auto& t : rel.tuples()) {
    for (size_t i = 0; i < t.cells.size(); ++i) {
      const Cell& c = t.cells[i];
      Value v = c.is_certain() ? c.value() : c.counting_value();
      out << (i ? "," : "") << (v.is_null() ? "" : csv_quote(v.to_string()));
    }
    out << "\n";
  }
}

int cmd_gen_errors(const std::vector<std::string>& data,
                   const std::vector<std::string>& schema,
                   const std::string& rules_path, double rate, uint64_t seed,
                   const std::string& out_path,
                   const std::string& truth_path) {
  Relation rel = load_data(data.at(0),
                           schema.empty() ? std::string() : schema[0]);
  std::ifstream in(rules_path);
  if (!in) throw std::runtime_error("cannot open rules file " + rules_path);
  std::ostringstream ss;
  ss << in.rdbuf();
  std::vector<Rule> rules = parse_rules(ss.str());
  const Rule* fd = nullptr;
  for (const auto& r : rules)
    if (r.is_fd() && r.relation == rel.name()) {
      fd = &r;
      break;
    }
  if (fd == nullptr) throw std::runtime_error("no FD rule for " + rel.name());
  GroundTruth truth = gen_errors(&rel, *fd, rate, seed);
  save_csv(out_path, rel);
  std::ofstream tout(truth_path);
  if (!tout) throw std::runtime_error("cannot open " + truth_path);
  for (const auto& [key, v] : truth)
    tout << key.first << "," << csv_quote(key.second) << ","
         << csv_quote(v.to_string()) << "\n";
  std::cout << "edited " << truth.size() << " cells\n";
  return 0;
}

int cmd_score(const std::vector<std::string>& data,
              const std::string& truth_path) {
  Relation rel = load_prob(data.at(0));
  GroundTruth truth;
  std::ifstream tin(truth_path);
  if (!tin) throw std::runtime_error("cannot open " + truth_path);
  std::string line;
  while (std::getline(tin, line)) {
    if (line.empty()) continue;
    auto c1 = line.find(',');
    auto c2 = line.find(',', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
      throw std::runtime_error("malformed truth line: " + line);
    TupleId tid = std::stoull(line.substr(0, c1));
    std::string attr = line.substr(c1 + 1, c2 - c1 - 1);
    std::string raw = line.substr(c2 + 1);
    Kind kind = rel.schema()[rel.col_index(attr)].kind;
    Value v;
    if (kind == Kind::Int)
      v = Value::integer(std::stoll(raw));
    else if (kind == Kind::Float)
      v = Value::real(std::stod(raw));
    else
      v = Value::text(raw);
    truth[{tid, attr}] = v;
  }
  Score s = score(rel, truth);
  std::cout << "precision: " << s.precision << "\n";
  std::cout << "recall: " << s.recall << "\n";
  std::cout << "f1: " << s.f1 << "\n";
  std::cout << "updates: " << s.updates << " correct: " << s.correct
            << " errors: " << s.errors << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"query-driven data cleaning engine"};
  app.require_subcommand(1);

  std::vector<std::string> data, schema;
  std::string rules, queries, out, save_data, truth;
  EngineConfig cfg;
  double rate = 0.1;
  uint64_t seed = 42;

  auto add_common = [&](CLI::App* sub, bool need_rules) {
    sub->add_option("--data", data, "CSV or .prob dataset (repeatable)")
        ->required();
    sub->add_option("--schema", schema,
                    "schema sidecar per dataset (attr:kind lines)");
    auto* r = sub->add_option("--rules", rules, "rule file");
    if (need_rules) r->required();
    sub->add_option("--mode", cfg.mode, "auto|incremental|offline")
        ->check(CLI::IsMember({"auto", "incremental", "offline"}));
    sub->add_option("--partitions", cfg.partitions,
                    "theta-matrix partitions (perfect square)");
    sub->add_option("--accuracy-threshold", cfg.accuracy_threshold,
                    "full-cleaning accuracy threshold");
    sub->add_option("--seed", seed, "random seed");
  };

  auto* repl = app.add_subcommand("repl", "interactive session");
  add_common(repl, false);

  auto* batch = app.add_subcommand("batch", "run a query workload");
  add_common(batch, false);
  batch->add_option("--queries", queries, "query file, one per line")
      ->required();
  batch->add_option("--out", out, "report path (default stdout)");
  batch->add_option("--save-data", save_data, "write final dataset here");

  auto* gen = app.add_subcommand("gen-errors", "inject FD errors");
  add_common(gen, true);
  gen->add_option("--rate", rate, "error rate in (0,1]")->required();
  gen->add_option("--out", out, "dirtied CSV path")->required();
  gen->add_option("--truth", truth, "ground-truth output path")->required();

  auto* sc = app.add_subcommand("score", "precision/recall of a cleaned .prob");
  sc->add_option("--data", data, "cleaned .prob dataset")->required();
  sc->add_option("--truth", truth, "ground-truth file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (repl->parsed()) return cmd_repl(data, schema, rules, cfg);
    if (batch->parsed())
      return cmd_batch(data, schema, rules, queries, out, save_data, cfg);
    if (gen->parsed())
      return cmd_gen_errors(data, schema, rules, rate, seed, out, truth);
    if (sc->parsed()) return cmd_score(data, truth);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
