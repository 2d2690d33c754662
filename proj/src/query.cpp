#include "qdc/query.hpp"

#include <algorithm>
#include <cctype>

namespace qdc {

std::set<std::string> QueryAst::attrs_for(const std::string& alias) const {
  std::set<std::string> out;
  auto matches = [&](const QColRef& c) {
    return c.rel.empty() || c.rel == alias;
  };
  for (const auto& s : select)
    if (!s.star && matches(s.col)) out.insert(s.col.attr);
  for (const auto& disj : where_dnf)
    for (const auto& p : disj)
      if (matches(p.col)) out.insert(p.col.attr);
  if (join) {
    if (matches(join->first)) out.insert(join->first.attr);
    if (matches(join->second)) out.insert(join->second.attr);
  }
  for (const auto& g : group_by)
    if (matches(g)) out.insert(g.attr);
  return out;
}

namespace {

enum class Tok { Ident, Number, String, Op, Comma, LParen, RParen, Star, Dot, End };

struct Token {
  Tok kind;
  std::string text;
  size_t pos;
};

struct Lexer {
  const std::string& s;
  size_t i = 0;
  std::vector<Token> out;

  explicit Lexer(const std::string& text) : s(text) {}

  void run() {
    while (i < s.size()) {
      char c = s[i];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++i;
        continue;
      }
      size_t start = i;
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) ||
                                s[i] == '_'))
          ++i;
        out.push_back({Tok::Ident, s.substr(start, i - start), start});
      } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                 (c == '-' && i + 1 < s.size() &&
                  std::isdigit(static_cast<unsigned char>(s[i + 1])))) {
        ++i;
        while (i < s.size() && (std::isdigit(static_cast<unsigned char>(s[i])) ||
                                s[i] == '.'))
          ++i;
        out.push_back({Tok::Number, s.substr(start, i - start), start});
      } else if (c == '\'') {
        std::string lit;
        ++i;
        while (true) {
          if (i >= s.size()) throw QueryParseError(start, "unterminated string");
          if (s[i] == '\'') {
            if (i + 1 < s.size() && s[i + 1] == '\'') {
              lit += '\'';
              i += 2;
              continue;
            }
            ++i;
            break;
          }
          lit += s[i++];
        }
        out.push_back({Tok::String, lit, start});
      } else if (c == ',') {
        out.push_back({Tok::Comma, ",", start});
        ++i;
      } else if (c == '(') {
        out.push_back({Tok::LParen, "(", start});
        ++i;
      } else if (c == ')') {
        out.push_back({Tok::RParen, ")", start});
        ++i;
      } else if (c == '*') {
        out.push_back({Tok::Star, "*", start});
        ++i;
      } else if (c == '.') {
        out.push_back({Tok::Dot, ".", start});
        ++i;
      } else if (c == '=' || c == '<' || c == '>' || c == '!') {
        std::string op(1, c);
        ++i;
        if (i < s.size() && (s[i] == '=' || (c == '<' && s[i] == '>'))) {
          op += s[i];
          ++i;
        }
        out.push_back({Tok::Op, op, start});
      } else if ((unsigned char)c == 0xE2 && i + 2 < s.size()) {
        // UTF-8 comparison glyphs.
        std::string g = s.substr(i, 3);
        std::string op;
        if (g == "≠") op = "!=";
        else if (g == "≤") op = "<=";
        else if (g == "≥") op = ">=";
        if (op.empty()) throw QueryParseError(start, "unexpected character");
        out.push_back({Tok::Op, op, start});
        i += 3;
      } else {
        throw QueryParseError(start, std::string("unexpected character '") + c +
                                         "'");
      }
    }
    out.push_back({Tok::End, "", s.size()});
  }
};

std::string upper(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::toupper(c); });
  return s;
}

CmpOp op_from(const std::string& s, size_t pos) {
  if (s == "=") return CmpOp::Eq;
  if (s == "!=" || s == "<>") return CmpOp::Ne;
  if (s == "<") return CmpOp::Lt;
  if (s == "<=") return CmpOp::Le;
  if (s == ">") return CmpOp::Gt;
  if (s == ">=") return CmpOp::Ge;
  throw QueryParseError(pos, "unknown operator " + s);
}

struct Parser {
  std::vector<Token> toks;
  size_t i = 0;

  const Token& peek() const { return toks[i]; }
  Token next() { return toks[i++]; }
  bool is_kw(const std::string& kw) const {
    return peek().kind == Tok::Ident && upper(peek().text) == kw;
  }
  void expect_kw(const std::string& kw) {
    if (!is_kw(kw)) throw QueryParseError(peek().pos, "expected " + kw);
    next();
  }

  QColRef col_ref() {
    if (peek().kind != Tok::Ident)
      throw QueryParseError(peek().pos, "expected column reference");
    std::string a = next().text;
    if (peek().kind == Tok::Dot) {
      next();
      if (peek().kind != Tok::Ident)
        throw QueryParseError(peek().pos, "expected attribute after '.'");
      return {a, next().text};
    }
    return {"", a};
  }

  SelectItem select_item() {
    SelectItem item;
    if (peek().kind == Tok::Star) {
      next();
      item.star = true;
      return item;
    }
    if (peek().kind == Tok::Ident) {
      std::string kw = upper(peek().text);
      AggFn fn = AggFn::None;
      if (kw == "COUNT") fn = AggFn::Count;
      else if (kw == "SUM") fn = AggFn::Sum;
      else if (kw == "AVG") fn = AggFn::Avg;
      else if (kw == "MIN") fn = AggFn::Min;
      else if (kw == "MAX") fn = AggFn::Max;
      if (fn != AggFn::None && toks[i + 1].kind == Tok::LParen) {
        next();
        next();
        item.agg = fn;
        if (peek().kind == Tok::Star) {
          if (fn != AggFn::Count)
            throw QueryParseError(peek().pos, "* only allowed in COUNT");
          next();
          item.star = true;
        } else {
          item.col = col_ref();
        }
        if (peek().kind != Tok::RParen)
          throw QueryParseError(peek().pos, "expected ')'");
        next();
        return item;
      }
    }
    item.col = col_ref();
    return item;
  }

  Value literal() {
    const Token& t = peek();
    if (t.kind == Tok::String) {
      next();
      return Value::text(t.text);
    }
    if (t.kind == Tok::Number) {
      next();
      if (t.text.find('.') != std::string::npos)
        return Value::real(std::stod(t.text));
      return Value::integer(std::stoll(t.text));
    }
    throw QueryParseError(t.pos, "expected literal");
  }

  QueryAst parse() {
    QueryAst ast;
    expect_kw("SELECT");
    ast.select.push_back(select_item());
    while (peek().kind == Tok::Comma) {
      next();
      ast.select.push_back(select_item());
    }
    expect_kw("FROM");
    auto from_item = [&]() {
      if (peek().kind != Tok::Ident)
        throw QueryParseError(peek().pos, "expected relation name");
      FromItem f;
      f.name = next().text;
      f.alias = f.name;
      if (peek().kind == Tok::Ident && !is_kw("WHERE") && !is_kw("GROUP"))
        f.alias = next().text;
      return f;
    };
    ast.from.push_back(from_item());
    while (peek().kind == Tok::Comma) {
      next();
      ast.from.push_back(from_item());
    }
    if (ast.from.size() > 2)
      throw QueryParseError(peek().pos, "at most two relations supported");

    // WHERE: flat AND/OR sequence of col-op-(literal|col); AND binds
    // tighter, producing DNF. Join predicates (col = col) are collected
    // separately.
    std::vector<std::vector<QPred>> dnf;
    std::vector<std::pair<QColRef, QColRef>> joins;
    std::vector<size_t> join_disjuncts;
    if (is_kw("WHERE")) {
      next();
      dnf.emplace_back();
      while (true) {
        QColRef lhs = col_ref();
        if (peek().kind != Tok::Op)
          throw QueryParseError(peek().pos, "expected comparison operator");
        Token opt = next();
        CmpOp op = op_from(opt.text, opt.pos);
        if (peek().kind == Tok::Ident && !is_kw("AND") && !is_kw("OR") &&
            !is_kw("GROUP")) {
          QColRef rhs = col_ref();
          if (op != CmpOp::Eq)
            throw QueryParseError(opt.pos, "only equi-joins are supported");
          joins.push_back({lhs, rhs});
          join_disjuncts.push_back(dnf.size() - 1);
        } else {
          dnf.back().push_back({lhs, op, literal()});
        }
        if (is_kw("AND")) {
          next();
          continue;
        }
        if (is_kw("OR")) {
          next();
          dnf.emplace_back();
          continue;
        }
        break;
      }
    }
    if (is_kw("GROUP")) {
      next();
      expect_kw("BY");
      ast.group_by.push_back(col_ref());
      while (peek().kind == Tok::Comma) {
        next();
        ast.group_by.push_back(col_ref());
      }
    }
    if (peek().kind != Tok::End)
      throw QueryParseError(peek().pos, "trailing input");

    if (ast.from.size() == 2) {
      if (joins.empty())
        throw QueryParseError(0, "two-relation query requires an equi-join");
      for (size_t j = 1; j < joins.size(); ++j) {
        if (joins[j].first.attr != joins[0].first.attr ||
            joins[j].first.rel != joins[0].first.rel ||
            joins[j].second.attr != joins[0].second.attr ||
            joins[j].second.rel != joins[0].second.rel)
          throw QueryParseError(0, "only one equi-join predicate supported");
      }
      if (dnf.size() > 1 && joins.size() != dnf.size())
        throw QueryParseError(0,
                              "join predicate must appear in every disjunct");
      ast.join = joins[0];
    } else if (!joins.empty()) {
      throw QueryParseError(0, "column-to-column predicate without a join");
    }
    // Drop empty conjunct lists (pure-join WHERE).
    for (const auto& d : dnf)
      if (!d.empty()) ast.where_dnf.push_back(d);
    return ast;
  }
};

}  // namespace

QueryAst parse_query(const std::string& text) {
  Lexer lex(text);
  lex.run();
  Parser p{std::move(lex.out)};
  return p.parse();
}

}  // namespace qdc
