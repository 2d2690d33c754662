#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>

namespace qdc {

// Absolute epsilon for float equality (tax-rate style decimals).
inline constexpr double kFloatEps = 1e-9;
// Tolerance for probability-group sums.
inline constexpr double kProbEps = 1e-9;

enum class Kind { Null, Int, Float, Text };

const char* kind_name(Kind k);
Kind kind_from_name(const std::string& s);

struct TypeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class CmpOp { Eq, Ne, Lt, Le, Gt, Ge };

const char* cmp_op_name(CmpOp op);

// A relational value: integer, float, text, or null. Values of different
// base kinds never compare as equal; floats compare with kFloatEps.
class Value {
 public:
  Value() = default;  // null
  static Value integer(int64_t v) {
    Value x;
    x.rep_ = v;
    return x;
  }
  static Value real(double v) {
    Value x;
    x.rep_ = v;
    return x;
  }
  static Value text(std::string v) {
    Value x;
    x.rep_ = std::move(v);
    return x;
  }

  Kind kind() const {
    switch (rep_.index()) {
      case 1:
        return Kind::Int;
      case 2:
        return Kind::Float;
      case 3:
        return Kind::Text;
      default:
        return Kind::Null;
    }
  }
  bool is_null() const { return rep_.index() == 0; }
  bool is_numeric() const {
    return kind() == Kind::Int || kind() == Kind::Float;
  }
  int64_t as_int() const { return std::get<int64_t>(rep_); }
  double as_float() const { return std::get<double>(rep_); }
  const std::string& as_text() const { return std::get<std::string>(rep_); }
  // Int widened to double; throws on non-numeric.
  double numeric() const;

  // Semantic equality: cross-kind is false, floats within kFloatEps.
  bool equals(const Value& o) const;

  // Strict total order used for deterministic tie-breaks and map keys:
  // kind rank first, then payload (floats bit-exact).
  bool operator<(const Value& o) const;
  bool operator==(const Value& o) const { return !(*this < o) && !(o < *this); }
  bool operator!=(const Value& o) const { return !(*this == o); }

  std::string to_string() const;

 private:
  std::variant<std::monostate, int64_t, double, std::string> rep_;
};

// Evaluates (a op b). Null never qualifies any comparison. Equality across
// kinds is false (inequality true); ordered comparison across incompatible
// kinds throws TypeError.
bool compare(const Value& a, CmpOp op, const Value& b);

}  // namespace qdc
