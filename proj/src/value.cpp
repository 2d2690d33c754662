#include "qdc/value.hpp"

#include <cmath>
#include <sstream>

namespace qdc {

const char* kind_name(Kind k) {
  switch (k) {
    case Kind::Int:
      return "int";
    case Kind::Float:
      return "float";
    case Kind::Text:
      return "text";
    default:
      return "null";
  }
}

Kind kind_from_name(const std::string& s) {
  if (s == "int") return Kind::Int;
  if (s == "float") return Kind::Float;
  if (s == "text") return Kind::Text;
  if (s == "null") return Kind::Null;
  throw TypeError("unknown kind: " + s);
}

const char* cmp_op_name(CmpOp op) {
  switch (op) {
    case CmpOp::Eq:
      return "=";
    case CmpOp::Ne:
      return "!=";
    case CmpOp::Lt:
      return "<";
    case CmpOp::Le:
      return "<=";
    case CmpOp::Gt:
      return ">";
    default:
      return ">=";
  }
}

double Value::numeric() const {
  if (kind() == Kind::Int) return static_cast<double>(as_int());
  if (kind() == Kind::Float) return as_float();
  throw TypeError("value is not numeric");
}

bool Value::equals(const Value& o) const {
  if (is_null() || o.is_null()) return false;
  if (kind() != o.kind()) return false;
  switch (kind()) {
    case Kind::Int:
      return as_int() == o.as_int();
    case Kind::Float:
      return std::fabs(as_float() - o.as_float()) <= kFloatEps;
    default:
      return as_text() == o.as_text();
  }
}

static int kind_rank(Kind k) {
  switch (k) {
    case Kind::Null:
      return 0;
    case Kind::Int:
      return 1;
    case Kind::Float:
      return 2;
    default:
      return 3;
  }
}

bool Value::operator<(const Value& o) const {
  if (kind() != o.kind()) return kind_rank(kind()) < kind_rank(o.kind());
  switch (kind()) {
    case Kind::Null:
      return false;
    case Kind::Int:
      return as_int() < o.as_int();
    case Kind::Float:
      return as_float() < o.as_float();
    default:
      return as_text() < o.as_text();
  }
}

std::string Value::to_string() const {
  switch (kind()) {
    case Kind::Null:
      return "NULL";
    case Kind::Int:
      return std::to_string(as_int());
    case Kind::Float: {
      std::ostringstream os;
      os << as_float();
      return os.str();
    }
    default:
      return as_text();
  }
}

bool compare(const Value& a, CmpOp op, const Value& b) {
  if (a.is_null() || b.is_null()) return false;
  if (op == CmpOp::Eq) return a.equals(b);
  if (op == CmpOp::Ne) return !a.equals(b);
  if (a.is_numeric() != b.is_numeric() ||
      (!a.is_numeric() && a.kind() != b.kind())) {
    throw TypeError(std::string("cannot order ") + kind_name(a.kind()) +
                    " against " + kind_name(b.kind()));
  }
  if (a.is_numeric()) {
    double x = a.numeric(), y = b.numeric();
    switch (op) {
      case CmpOp::Lt:
        return x < y;
      case CmpOp::Le:
        return x <= y;
      case CmpOp::Gt:
        return x > y;
      default:
        return x >= y;
    }
  }
  const std::string& x = a.as_text();
  const std::string& y = b.as_text();
  switch (op) {
    case CmpOp::Lt:
      return x < y;
    case CmpOp::Le:
      return x <= y;
    case CmpOp::Gt:
      return x > y;
    default:
      return x >= y;
  }
}

}  // namespace qdc
