#include "sqlsketch/value.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <system_error>

namespace sqlsketch {

ValueType type_of(const Value& v) noexcept {
  return static_cast<ValueType>(v.index());
}

std::string_view type_name(ValueType t) noexcept {
  switch (t) {
    case ValueType::Int: return "int";
    case ValueType::Float: return "float";
    case ValueType::String: return "string";
  }
  return "?";
}

std::optional<ValueType> parse_value_type(std::string_view name) noexcept {
  if (name == "int") return ValueType::Int;
  if (name == "float") return ValueType::Float;
  if (name == "string") return ValueType::String;
  return std::nullopt;
}

std::optional<Value> parse_cell(std::string_view text, ValueType type) {
  switch (type) {
    case ValueType::String:
      return Value(std::string(text));
    case ValueType::Int: {
      std::int64_t out = 0;
      const char* first = text.data();
      const char* last = text.data() + text.size();
      if (first != last && *first == '+') ++first;
      auto [ptr, ec] = std::from_chars(first, last, out);
      if (text.empty() || ec != std::errc() || ptr != last) return std::nullopt;
      return Value(out);
    }
    case ValueType::Float: {
      double out = 0;
      const char* first = text.data();
      const char* last = text.data() + text.size();
      if (first != last && *first == '+') ++first;
      auto [ptr, ec] = std::from_chars(first, last, out);
      if (text.empty() || ec != std::errc() || ptr != last || !std::isfinite(out))
        return std::nullopt;
      return Value(out);
    }
  }
  return std::nullopt;
}

namespace {

std::string format_double(double d) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), d);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace

std::string format_value(const Value& v) {
  switch (type_of(v)) {
    case ValueType::Int: return std::to_string(std::get<std::int64_t>(v));
    case ValueType::Float: return format_double(std::get<double>(v));
    case ValueType::String: return std::get<std::string>(v);
  }
  return {};
}

std::string format_literal(const Value& v) {
  switch (type_of(v)) {
    case ValueType::Int:
      return std::to_string(std::get<std::int64_t>(v));
    case ValueType::Float: {
      std::string s = format_double(std::get<double>(v));
      if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
      return s;
    }
    case ValueType::String: {
      std::string out = "\"";
      for (char c : std::get<std::string>(v)) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
      }
      out += '"';
      return out;
    }
  }
  return {};
}

std::strong_ordering compare_same_type(const Value& a, const Value& b) {
  switch (type_of(a)) {
    case ValueType::Int:
      return std::get<std::int64_t>(a) <=> std::get<std::int64_t>(b);
    case ValueType::Float: {
      double x = std::get<double>(a);
      double y = std::get<double>(b);
      if (x < y) return std::strong_ordering::less;
      if (x > y) return std::strong_ordering::greater;
      return std::strong_ordering::equal;
    }
    case ValueType::String:
      return std::get<std::string>(a).compare(std::get<std::string>(b)) <=> 0;
  }
  return std::strong_ordering::equal;
}

std::size_t ValueHash::operator()(const Value& v) const noexcept {
  std::size_t h = std::visit(
      [](const auto& x) { return std::hash<std::decay_t<decltype(x)>>{}(x); }, v);
  return h ^ (v.index() * 0x9e3779b97f4a7c15ULL);
}

}  // namespace sqlsketch
