#include "qdc/store.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace qdc {

using nlohmann::json;

std::vector<ChangeLogEntry> apply_fixes(Relation* rel, const FixSet& fixes,
                                        const std::string& rule_id) {
  std::vector<ChangeLogEntry> log;
  for (const auto& fix : fixes.fixes) {
    Tuple* t = rel->find(fix.tid);
    if (t == nullptr)
      throw std::runtime_error("fix targets unknown tuple " +
                               std::to_string(fix.tid));
    size_t col = rel->col_index(fix.attr);
    Cell merged = merge_fixes(t->cells[col], fix);
    merged.validate();
    t->cells[col] = std::move(merged);
    log.push_back({fix.tid, fix.attr});
    if (!rule_id.empty()) rel->checked().fd_checked[rule_id].insert(fix.tid);
  }
  return log;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line, int lineno) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  size_t i = 0;
  while (i < line.size()) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          i += 2;
          continue;
        }
        quoted = false;
        ++i;
        continue;
      }
      cur += c;
      ++i;
    } else if (c == '"') {
      quoted = true;
      ++i;
    } else if (c == ',') {
      fields.push_back(cur);
      cur.clear();
      ++i;
    } else {
      cur += c;
      ++i;
    }
  }
  if (quoted)
    throw std::runtime_error("unterminated quote at line " +
                             std::to_string(lineno));
  fields.push_back(cur);
  return fields;
}

Value parse_field(const std::string& s, Kind kind, int lineno) {
  if (s.empty() && kind != Kind::Text) return Value();
  try {
    switch (kind) {
      case Kind::Int:
        return Value::integer(std::stoll(s));
      case Kind::Float:
        return Value::real(std::stod(s));
      default:
        return Value::text(s);
    }
  } catch (const std::exception&) {
    throw std::runtime_error("malformed " + std::string(kind_name(kind)) +
                             " field '" + s + "' at line " +
                             std::to_string(lineno));
  }
}

json value_to_json(const Value& v) {
  switch (v.kind()) {
    case Kind::Int:
      return json{{"i", v.as_int()}};
    case Kind::Float:
      return json{{"f", v.as_float()}};
    case Kind::Text:
      return json{{"t", v.as_text()}};
    default:
      return json{{"n", true}};
  }
}

Value value_from_json(const json& j) {
  if (j.contains("i")) return Value::integer(j["i"].get<int64_t>());
  if (j.contains("f")) return Value::real(j["f"].get<double>());
  if (j.contains("t")) return Value::text(j["t"].get<std::string>());
  if (j.contains("n")) return Value();
  throw std::runtime_error("unknown value encoding: " + j.dump());
}

json cell_to_json(const Cell& c) {
  if (c.is_certain()) return json{{"v", value_to_json(c.value())}};
  json out;
  if (c.original()) out["orig"] = value_to_json(*c.original());
  json cands = json::array();
  for (const auto& cand : c.candidates()) {
    json jc;
    if (cand.value.is_range)
      jc["range"] = json{{"op", range_op_name(cand.value.op)},
                         {"bound", value_to_json(cand.value.value)}};
    else
      jc["v"] = value_to_json(cand.value.value);
    jc["p"] = cand.prob;
    jc["g"] = cand.pair_id;
    jc["prov"] = cand.provenance;
    cands.push_back(std::move(jc));
  }
  out["cands"] = std::move(cands);
  return out;
}

Cell cell_from_json(const json& j) {
  if (j.contains("v")) return Cell(value_from_json(j["v"]));
  std::optional<Value> orig;
  if (j.contains("orig")) orig = value_from_json(j["orig"]);
  std::vector<Candidate> cands;
  for (const auto& jc : j.at("cands")) {
    Candidate c;
    if (jc.contains("range"))
      c.value = CandidateValue::range(
          range_op_from_name(jc["range"]["op"].get<std::string>()),
          value_from_json(jc["range"]["bound"]));
    else
      c.value = CandidateValue::concrete(value_from_json(jc.at("v")));
    c.prob = jc.at("p").get<double>();
    c.pair_id = jc.at("g").get<std::string>();
    for (const auto& tid : jc.at("prov")) c.provenance.insert(tid.get<TupleId>());
    cands.push_back(std::move(c));
  }
  Cell out;
  out.set_uncertain(std::move(cands), std::move(orig));
  out.validate();
  return out;
}

}  // namespace

std::vector<Attribute> load_schema(const std::string& schema_path) {
  std::ifstream in(schema_path);
  if (!in) throw std::runtime_error("cannot open schema file " + schema_path);
  std::vector<Attribute> schema;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string stripped = line.substr(0, line.find('#'));
    while (!stripped.empty() && std::isspace(
               static_cast<unsigned char>(stripped.back())))
      stripped.pop_back();
    if (stripped.empty()) continue;
    auto colon = stripped.find(':');
    if (colon == std::string::npos)
      throw std::runtime_error("schema line " + std::to_string(lineno) +
                               " is not attr:kind");
    schema.push_back(
        {stripped.substr(0, colon), kind_from_name(stripped.substr(colon + 1))});
  }
  return schema;
}

Relation load_csv(const std::string& csv_path, const std::string& schema_path) {
  std::vector<Attribute> schema = load_schema(schema_path);
  std::ifstream in(csv_path);
  if (!in) throw std::runtime_error("cannot open csv file " + csv_path);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("csv file " + csv_path + " is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> header = split_csv_line(line, 1);
  if (header.size() != schema.size())
    throw std::runtime_error("csv header arity " +
                             std::to_string(header.size()) +
                             " does not match schema arity " +
                             std::to_string(schema.size()));
  for (size_t i = 0; i < header.size(); ++i)
    if (header[i] != schema[i].name)
      throw std::runtime_error("csv header column '" + header[i] +
                               "' does not match schema attribute '" +
                               schema[i].name + "'");

  std::string base = csv_path;
  auto slash = base.find_last_of('/');
  if (slash != std::string::npos) base = base.substr(slash + 1);
  auto dot = base.rfind('.');
  if (dot != std::string::npos) base = base.substr(0, dot);

  Relation rel(base, schema);
  int lineno = 1;
  TupleId tid = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields = split_csv_line(line, lineno);
    if (fields.size() != schema.size())
      throw std::runtime_error("row at line " + std::to_string(lineno) +
                               " has arity " + std::to_string(fields.size()) +
                               ", expected " + std::to_string(schema.size()));
    Tuple t;
    t.tid = ++tid;
    for (size_t i = 0; i < fields.size(); ++i)
      t.cells.push_back(Cell(parse_field(fields[i], schema[i].kind, lineno)));
    rel.add_tuple(std::move(t));
  }
  return rel;
}

void save_prob(const std::string& path, const Relation& rel) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  json header;
  header["relation"] = rel.name();
  json schema = json::array();
  for (const auto& a : rel.schema())
    schema.push_back(json{{"name", a.name}, {"kind", kind_name(a.kind)}});
  header["schema"] = std::move(schema);
  out << header.dump() << "\n";
  for (const auto& t : rel.tuples()) {
    json rec;
    rec["tid"] = t.tid;
    json cells = json::array();
    for (const auto& c : t.cells) cells.push_back(cell_to_json(c));
    rec["cells"] = std::move(cells);
    out << rec.dump() << "\n";
  }
  json trailer;
  json fd = json::object();
  for (const auto& [rule, tids] : rel.checked().fd_checked) fd[rule] = tids;
  json dc = json::object();
  for (const auto& [rule, reg] : rel.checked().dc_checked) {
    json coords = json::array();
    for (const auto& [r, c] : reg.coords) coords.push_back(json::array({r, c}));
    dc[rule] = json{{"p", reg.partitions}, {"coords", std::move(coords)}};
  }
  trailer["checked"] = json{{"fd", std::move(fd)}, {"dc", std::move(dc)}};
  out << trailer.dump() << "\n";
}

Relation load_prob(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("probabilistic dataset " + path + " is empty");
  json header = json::parse(line);
  std::vector<Attribute> schema;
  for (const auto& a : header.at("schema"))
    schema.push_back({a.at("name").get<std::string>(),
                      kind_from_name(a.at("kind").get<std::string>())});
  Relation rel(header.at("relation").get<std::string>(), schema);

  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json rec = json::parse(line);
    if (rec.contains("checked")) {
      const json& ck = rec["checked"];
      for (auto it = ck.at("fd").begin(); it != ck.at("fd").end(); ++it) {
        std::set<TupleId>& tids = rel.checked().fd_checked[it.key()];
        for (const auto& tid : it.value()) tids.insert(tid.get<TupleId>());
      }
      for (auto it = ck.at("dc").begin(); it != ck.at("dc").end(); ++it) {
        DcCheckedRegion& reg = rel.checked().dc_checked[it.key()];
        reg.partitions = it.value().at("p").get<int>();
        for (const auto& coord : it.value().at("coords"))
          reg.coords.insert({coord[0].get<int>(), coord[1].get<int>()});
      }
      continue;
    }
    Tuple t;
    t.tid = rec.at("tid").get<TupleId>();
    for (const auto& jc : rec.at("cells")) t.cells.push_back(cell_from_json(jc));
    rel.add_tuple(std::move(t));
  }
  // Checked state may only reference stored tuples.
  for (const auto& [rule, tids] : rel.checked().fd_checked)
    for (TupleId tid : tids)
      if (rel.find(tid) == nullptr)
        throw std::runtime_error("checked state references unknown tuple " +
                                 std::to_string(tid));
  return rel;
}

}  // namespace qdc
