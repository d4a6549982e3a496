#include "dj/value.hpp"

#include <charconv>
#include <cmath>
#include <limits>

#include "dj/error.hpp"

namespace dj {

double as_double(const Value& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
  if (const auto* d = std::get_if<double>(&v)) return *d;
  return std::numeric_limits<double>::quiet_NaN();
}

std::partial_ordering compare_values(const Value& a, const Value& b) {
  if (is_number(a) && is_number(b)) {
    if (std::holds_alternative<std::int64_t>(a) && std::holds_alternative<std::int64_t>(b)) {
      return std::get<std::int64_t>(a) <=> std::get<std::int64_t>(b);
    }
    return as_double(a) <=> as_double(b);
  }
  const auto* sa = std::get_if<std::string>(&a);
  const auto* sb = std::get_if<std::string>(&b);
  if (sa && sb) return *sa <=> *sb;
  return std::partial_ordering::unordered;
}

bool values_equal(const Value& a, const Value& b) {
  return compare_values(a, b) == std::partial_ordering::equivalent;
}

std::size_t RowHash::operator()(const Row& row) const noexcept {
  std::size_t h = 0x9e3779b97f4a7c15ULL;
  for (const auto& v : row) {
    std::size_t part = 0;
    switch (v.index()) {
      case 0: part = 0x51ed27; break;
      case 1: part = std::hash<std::int64_t>{}(std::get<1>(v)); break;
      case 2: part = std::hash<double>{}(std::get<2>(v)); break;
      case 3: part = std::hash<std::string>{}(std::get<3>(v)); break;
    }
    h ^= part + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

std::string to_string(const Datatype& type) {
  using K = Datatype::Kind;
  switch (type.kind) {
    case K::Int: return "int";
    case K::IntUnsigned: return "int unsigned";
    case K::Decimal: return "decimal(" + std::to_string(type.length) + "," + std::to_string(type.scale) + ")";
    case K::Char: return "char(" + std::to_string(type.length) + ")";
    case K::Varchar: return "varchar(" + std::to_string(type.length) + ")";
    case K::Date: return "date";
    case K::Datetime: return "datetime";
    case K::Year: return "year";
    case K::Double: return "double";
    case K::Text: return "text";
    case K::Any: return "any";
    case K::Enum: {
      std::string out = "enum(";
      for (std::size_t i = 0; i < type.enum_values.size(); ++i) {
        if (i) out += ", ";
        out += "'" + type.enum_values[i] + "'";
      }
      return out + ")";
    }
  }
  return "?";
}

void validate_datatype(const Datatype& type) {
  using K = Datatype::Kind;
  switch (type.kind) {
    case K::Decimal:
      if (!(1 <= type.scale && type.scale < type.length && type.length <= 65)) {
        throw Error(ErrorCode::InvalidDeclaration, "decimal(n,m) requires 1 <= m < n <= 65, got " + to_string(type));
      }
      break;
    case K::Char:
    case K::Varchar:
      if (type.length < 1) throw Error(ErrorCode::InvalidDeclaration, to_string(type) + " requires a length of at least 1");
      break;
    case K::Enum: {
      if (type.enum_values.empty()) throw Error(ErrorCode::InvalidDeclaration, "enum requires at least one value");
      for (std::size_t i = 0; i < type.enum_values.size(); ++i) {
        for (std::size_t j = i + 1; j < type.enum_values.size(); ++j) {
          if (type.enum_values[i] == type.enum_values[j]) {
            throw Error(ErrorCode::InvalidDeclaration, "enum value '" + type.enum_values[i] + "' repeated");
          }
        }
      }
      break;
    }
    default:
      break;
  }
}

namespace {

bool all_digits(const std::string& s, std::size_t from, std::size_t count) {
  if (from + count > s.size()) return false;
  for (std::size_t i = from; i < from + count; ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
  }
  return true;
}

int number_at(const std::string& s, std::size_t from, std::size_t count) {
  int out = 0;
  for (std::size_t i = from; i < from + count; ++i) out = out * 10 + (s[i] - '0');
  return out;
}

[[noreturn]] void domain_error(const Datatype& type, const Value& value) {
  throw Error(ErrorCode::DomainViolation, "value " + format_value(value) + " is not in the domain of " + to_string(type));
}

std::int64_t integral_of(const Datatype& type, const Value& value) {
  if (const auto* i = std::get_if<std::int64_t>(&value)) return *i;
  if (const auto* d = std::get_if<double>(&value)) {
    if (std::isfinite(*d) && std::floor(*d) == *d && std::fabs(*d) < 9.0e15) return static_cast<std::int64_t>(*d);
  }
  domain_error(type, value);
}

}  // namespace

bool is_valid_date(const std::string& s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
  if (!all_digits(s, 0, 4) || !all_digits(s, 5, 2) || !all_digits(s, 8, 2)) return false;
  const int year = number_at(s, 0, 4);
  const int month = number_at(s, 5, 2);
  const int day = number_at(s, 8, 2);
  if (month < 1 || month > 12 || day < 1) return false;
  static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  int limit = kDays[month - 1];
  const bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
  if (month == 2 && leap) limit = 29;
  return day <= limit;
}

bool is_valid_datetime(const std::string& s) {
  if (s.size() != 19 || s[10] != ' ' || s[13] != ':' || s[16] != ':') return false;
  if (!is_valid_date(s.substr(0, 10))) return false;
  if (!all_digits(s, 11, 2) || !all_digits(s, 14, 2) || !all_digits(s, 17, 2)) return false;
  return number_at(s, 11, 2) < 24 && number_at(s, 14, 2) < 60 && number_at(s, 17, 2) < 60;
}

Value conform(const Datatype& type, const Value& value) {
  using K = Datatype::Kind;
  if (is_null(value)) return value;
  switch (type.kind) {
    case K::Int: {
      const auto v = integral_of(type, value);
      if (v < std::numeric_limits<std::int32_t>::min() || v > std::numeric_limits<std::int32_t>::max()) {
        domain_error(type, value);
      }
      return v;
    }
    case K::IntUnsigned: {
      const auto v = integral_of(type, value);
      if (v < 0 || v > static_cast<std::int64_t>(std::numeric_limits<std::uint32_t>::max())) domain_error(type, value);
      return v;
    }
    case K::Year: {
      const auto v = integral_of(type, value);
      if (v < 1901 || v > 2155) domain_error(type, value);
      return v;
    }
    case K::Decimal: {
      if (!is_number(value)) domain_error(type, value);
      const double scale = std::pow(10.0, type.scale);
      const double rounded = std::round(as_double(value) * scale) / scale;
      if (!std::isfinite(rounded) || std::fabs(rounded) >= std::pow(10.0, type.length - type.scale)) {
        domain_error(type, value);
      }
      return rounded;
    }
    case K::Double: {
      if (!is_number(value)) domain_error(type, value);
      return as_double(value);
    }
    case K::Char:
    case K::Varchar: {
      const auto* s = std::get_if<std::string>(&value);
      if (!s || static_cast<int>(s->size()) > type.length) domain_error(type, value);
      return value;
    }
    case K::Text: {
      if (!std::holds_alternative<std::string>(value)) domain_error(type, value);
      return value;
    }
    case K::Date: {
      const auto* s = std::get_if<std::string>(&value);
      if (!s || !is_valid_date(*s)) domain_error(type, value);
      return value;
    }
    case K::Datetime: {
      const auto* s = std::get_if<std::string>(&value);
      if (!s) domain_error(type, value);
      if (is_valid_date(*s)) return *s + " 00:00:00";
      if (!is_valid_datetime(*s)) domain_error(type, value);
      return value;
    }
    case K::Enum: {
      const auto* s = std::get_if<std::string>(&value);
      if (!s) domain_error(type, value);
      for (const auto& e : type.enum_values) {
        if (e == *s) return value;
      }
      domain_error(type, value);
    }
    case K::Any:
      return value;
  }
  return value;
}

std::string format_double(double d) {
  if (std::isnan(d)) return "nan";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, d);
  if (ec != std::errc{}) return "?";
  return std::string(buf, ptr);
}

std::string format_value(const Value& value) {
  switch (value.index()) {
    case 0: return "NULL";
    case 1: return std::to_string(std::get<1>(value));
    case 2: return format_double(std::get<2>(value));
    default: return std::get<3>(value);
  }
}

std::string format_value(const Value& value, const Datatype& type) {
  if (type.kind == Datatype::Kind::Decimal && is_number(value)) {
    char buf[96];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, as_double(value), std::chars_format::fixed, type.scale);
    if (ec == std::errc{}) return std::string(buf, ptr);
  }
  return format_value(value);
}

}  // namespace dj
