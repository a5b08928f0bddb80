#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace sqlsketch {

enum class ValueType { Int, Float, String };

/// A typed cell or literal. Int and Float never compare equal to each other;
/// strings order bytewise.
using Value = std::variant<std::int64_t, double, std::string>;

ValueType type_of(const Value& v) noexcept;
std::string_view type_name(ValueType t) noexcept;
std::optional<ValueType> parse_value_type(std::string_view name) noexcept;

/// Parses a CSV cell as the given type; nullopt when the text is not a
/// well-formed value of that type.
std::optional<Value> parse_cell(std::string_view text, ValueType type);

/// Plain rendering used for CSV output and previews (strings unquoted).
std::string format_value(const Value& v);

/// Literal rendering for sketch text: strings quoted and escaped, floats
/// always carry a '.' or exponent so they re-parse as floats.
std::string format_literal(const Value& v);

/// Three-way comparison of two values of the same type.
std::strong_ordering compare_same_type(const Value& a, const Value& b);

struct ValueHash {
  std::size_t operator()(const Value& v) const noexcept;
};

}  // namespace sqlsketch
