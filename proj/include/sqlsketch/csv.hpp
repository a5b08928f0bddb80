#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace sqlsketch::csv {

struct Field {
  std::string text;
  bool quoted = false;
};

struct Record {
  std::vector<Field> fields;
  std::size_t line = 0;  // 1-based line where the record starts
};

/// RFC-4180 reader: comma separated, CRLF or LF record ends, double-quote
/// quoting with "" escapes. A trailing newline does not create a record.
/// Throws sqlsketch::Error(TypeMismatch) on an unterminated quote.
std::vector<Record> parse(std::string_view text);

/// Writes one record, quoting fields that need it.
void write_record(std::ostream& os, const std::vector<std::string>& fields);

}  // namespace sqlsketch::csv
