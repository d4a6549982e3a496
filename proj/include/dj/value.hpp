#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace dj {

struct Null {
  friend bool operator==(Null, Null) { return true; }
  friend std::strong_ordering operator<=>(Null, Null) { return std::strong_ordering::equal; }
};

/// A single attribute value. Dates, datetimes, enum members and strings are all
/// held as text; decimals and doubles as double; int, int unsigned and year as
/// int64. Within one column the alternative is fixed by the column datatype, so
/// the variant's own ordering is a valid canonical order for rows.
using Value = std::variant<Null, std::int64_t, double, std::string>;
using Row = std::vector<Value>;

inline bool is_null(const Value& v) { return std::holds_alternative<Null>(v); }
inline bool is_number(const Value& v) {
  return std::holds_alternative<std::int64_t>(v) || std::holds_alternative<double>(v);
}
double as_double(const Value& v);

/// Comparison used by query conditions: numbers compare numerically across int
/// and double, strings lexicographically. Null or mixed kinds are unordered.
std::partial_ordering compare_values(const Value& a, const Value& b);
bool values_equal(const Value& a, const Value& b);

struct RowHash {
  std::size_t operator()(const Row& row) const noexcept;
};

struct Datatype {
  enum class Kind {
    Int,
    IntUnsigned,
    Decimal,
    Char,
    Varchar,
    Date,
    Datetime,
    Year,
    Enum,
    Double,
    Text,  // computed strings, unbounded
    Any,   // universal-set attributes before they are matched
  };

  Kind kind = Kind::Any;
  int length = 0;  // char/varchar length, decimal precision
  int scale = 0;   // decimal fractional digits
  std::vector<std::string> enum_values;

  static Datatype of(Kind k) { return Datatype{k, 0, 0, {}}; }
  static Datatype decimal(int n, int m) { return Datatype{Kind::Decimal, n, m, {}}; }
  static Datatype chars(int n) { return Datatype{Kind::Char, n, 0, {}}; }
  static Datatype varchar(int n) { return Datatype{Kind::Varchar, n, 0, {}}; }
  static Datatype enumeration(std::vector<std::string> values) {
    return Datatype{Kind::Enum, 0, 0, std::move(values)};
  }

  bool is_integral() const { return kind == Kind::Int || kind == Kind::IntUnsigned || kind == Kind::Year; }
  bool is_real() const { return kind == Kind::Decimal || kind == Kind::Double; }
  bool is_numeric() const { return is_integral() || is_real(); }
  bool is_textual() const {
    return kind == Kind::Char || kind == Kind::Varchar || kind == Kind::Enum || kind == Kind::Text ||
           kind == Kind::Date || kind == Kind::Datetime;
  }

  friend bool operator==(const Datatype&, const Datatype&) = default;
};

/// DataJoint spelling, e.g. `int unsigned`, `decimal(3,1)`, `enum('F', 'M')`.
std::string to_string(const Datatype& type);

/// Validates the declared parameters (decimal precision, char length, enum
/// members). Throws Error(InvalidDeclaration).
void validate_datatype(const Datatype& type);

/// Coerces a non-null value into the domain of `type`, throwing
/// Error(DomainViolation) when it does not belong. Decimals are rounded to the
/// declared scale.
Value conform(const Datatype& type, const Value& value);

bool is_valid_date(const std::string& text);
bool is_valid_datetime(const std::string& text);

/// Human-facing rendering: decimals at declared scale, doubles in shortest
/// round-trip form, null as NULL.
std::string format_value(const Value& value, const Datatype& type);
std::string format_value(const Value& value);

/// Shortest round-trip text for a double.
std::string format_double(double d);

}  // namespace dj
