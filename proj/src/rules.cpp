#include "qdc/rules.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace qdc {

std::set<std::string> Rule::attributes() const {
  std::set<std::string> out;
  if (is_fd()) {
    for (const auto& a : fd().lhs) out.insert(a);
    out.insert(fd().rhs);
  } else {
    for (const auto& p : dc().atoms) {
      out.insert(p.left.attr);
      if (p.rhs_is_col) out.insert(p.right_col.attr);
    }
  }
  return out;
}

namespace {

// Cursor over a single rule line.
struct LineScanner {
  const std::string& s;
  int line;
  size_t pos = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    throw RuleParseError(line, static_cast<int>(pos) + 1, msg);
  }
  void skip_ws() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos])))
      ++pos;
  }
  bool done() {
    skip_ws();
    return pos >= s.size();
  }
  char peek() {
    skip_ws();
    return pos < s.size() ? s[pos] : '\0';
  }
  bool consume(char c) {
    skip_ws();
    if (pos < s.size() && s[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!consume(c)) fail(std::string("expected '") + c + "'");
  }
  std::string identifier() {
    skip_ws();
    size_t start = pos;
    while (pos < s.size() && (std::isalnum(static_cast<unsigned char>(s[pos])) ||
                              s[pos] == '_'))
      ++pos;
    if (pos == start) fail("expected identifier");
    return s.substr(start, pos - start);
  }
  CmpOp cmp_op() {
    skip_ws();
    if (pos >= s.size()) fail("expected comparison operator");
    char c = s[pos];
    if (c == '=') {
      ++pos;
      return CmpOp::Eq;
    }
    if (c == '!' && pos + 1 < s.size() && s[pos + 1] == '=') {
      pos += 2;
      return CmpOp::Ne;
    }
    if (c == '<') {
      ++pos;
      if (pos < s.size() && s[pos] == '=') {
        ++pos;
        return CmpOp::Le;
      }
      if (pos < s.size() && s[pos] == '>') {
        ++pos;
        return CmpOp::Ne;
      }
      return CmpOp::Lt;
    }
    if (c == '>') {
      ++pos;
      if (pos < s.size() && s[pos] == '=') {
        ++pos;
        return CmpOp::Ge;
      }
      return CmpOp::Gt;
    }
    fail("expected comparison operator");
  }
  Value literal() {
    skip_ws();
    if (pos < s.size() && s[pos] == '\'') {
      ++pos;
      size_t start = pos;
      while (pos < s.size() && s[pos] != '\'') ++pos;
      if (pos >= s.size()) fail("unterminated string literal");
      std::string v = s.substr(start, pos - start);
      ++pos;
      return Value::text(v);
    }
    size_t start = pos;
    bool is_float = false;
    if (pos < s.size() && (s[pos] == '-' || s[pos] == '+')) ++pos;
    while (pos < s.size() &&
           (std::isdigit(static_cast<unsigned char>(s[pos])) || s[pos] == '.')) {
      if (s[pos] == '.') is_float = true;
      ++pos;
    }
    if (pos == start) fail("expected literal");
    std::string lex = s.substr(start, pos - start);
    return is_float ? Value::real(std::stod(lex))
                    : Value::integer(static_cast<int64_t>(std::stoll(lex)));
  }
};

std::vector<std::string> attr_list(LineScanner& sc, const char* stop) {
  std::vector<std::string> out;
  out.push_back(sc.identifier());
  while (sc.consume(',')) out.push_back(sc.identifier());
  (void)stop;
  return out;
}

// t1.attr / t2.attr reference. Returns false when the next token is not a
// tuple variable (caller then reads a literal).
bool try_col_ref(LineScanner& sc, ColRef* out) {
  sc.skip_ws();
  size_t save = sc.pos;
  if (sc.pos + 2 < sc.s.size() && sc.s[sc.pos] == 't' &&
      std::isdigit(static_cast<unsigned char>(sc.s[sc.pos + 1])) &&
      sc.s[sc.pos + 2] == '.') {
    int idx = sc.s[sc.pos + 1] - '0';
    if (idx != 1 && idx != 2)
      sc.fail("denial constraints are restricted to tuple variables t1, t2");
    sc.pos += 3;
    out->tuple_index = idx;
    out->attr = sc.identifier();
    return true;
  }
  sc.pos = save;
  return false;
}

Predicate parse_atom(LineScanner& sc) {
  Predicate p;
  if (!try_col_ref(sc, &p.left)) sc.fail("atom must start with t1.* or t2.*");
  p.op = sc.cmp_op();
  ColRef rhs;
  if (try_col_ref(sc, &rhs)) {
    p.rhs_is_col = true;
    p.right_col = rhs;
    if (p.left.tuple_index == rhs.tuple_index)
      sc.fail("atom must relate the two tuple variables");
    bool ordered = p.op != CmpOp::Eq && p.op != CmpOp::Ne;
    if (ordered && p.left.attr != rhs.attr)
      sc.fail("inequality atoms must compare the same attribute");
  } else {
    p.rhs_is_col = false;
    p.literal = sc.literal();
  }
  return p;
}

}  // namespace

std::vector<Rule> normalize_fd(const std::string& id,
                               const std::string& relation,
                               const std::vector<std::string>& lhs,
                               const std::vector<std::string>& rhs) {
  std::vector<Rule> out;
  for (size_t i = 0; i < rhs.size(); ++i) {
    Rule r;
    r.id = rhs.size() == 1 ? id : id + "." + std::to_string(i + 1);
    r.relation = relation;
    FdBody body;
    body.lhs = lhs;
    body.rhs = rhs[i];
    r.body = std::move(body);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<Rule> parse_rules(const std::string& text) {
  std::vector<Rule> rules;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  int counter = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string stripped = raw.substr(0, raw.find('#'));
    LineScanner sc{stripped, lineno};
    if (sc.done()) continue;
    ++counter;
    std::string head = sc.identifier();
    std::string rel = sc.identifier();
    sc.expect(':');
    if (head == "FD") {
      std::vector<std::string> lhs = attr_list(sc, "->");
      sc.expect('-');
      sc.expect('>');
      std::vector<std::string> rhs = attr_list(sc, nullptr);
      if (!sc.done()) sc.fail("trailing input after FD");
      for (const auto& a : rhs)
        if (std::find(lhs.begin(), lhs.end(), a) != lhs.end())
          sc.fail("FD right side attribute '" + a + "' also appears on the left");
      for (auto& r :
           normalize_fd("fd" + std::to_string(counter), rel, lhs, rhs))
        rules.push_back(std::move(r));
    } else if (head == "DC") {
      sc.expect('!');
      sc.expect('(');
      DcBody body;
      body.atoms.push_back(parse_atom(sc));
      while (sc.consume('&')) body.atoms.push_back(parse_atom(sc));
      sc.expect(')');
      if (!sc.done()) sc.fail("trailing input after DC");
      Rule r;
      r.id = "dc" + std::to_string(counter);
      r.relation = rel;
      r.body = std::move(body);
      rules.push_back(std::move(r));
    } else {
      sc.fail("expected FD or DC");
    }
  }
  return rules;
}

bool rule_overlaps_query(const Rule& rule, const std::set<std::string>& proj,
                         const std::set<std::string>& where) {
  for (const auto& a : rule.attributes())
    if (proj.count(a) || where.count(a)) return true;
  return false;
}

}  // namespace qdc
