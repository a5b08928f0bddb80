#include "sqlsketch/csv.hpp"

#include <ostream>

#include "sqlsketch/error.hpp"

namespace sqlsketch::csv {

std::vector<Record> parse(std::string_view text) {
  std::vector<Record> out;
  std::size_t i = 0;
  std::size_t line = 1;
  const std::size_t n = text.size();
  while (i < n) {
    Record rec;
    rec.line = line;
    for (;;) {
      Field field;
      if (i < n && text[i] == '"') {
        field.quoted = true;
        ++i;
        for (;;) {
          if (i >= n)
            throw Error(Errc::TypeMismatch,
                        "unterminated quoted field at line " + std::to_string(rec.line));
          char c = text[i];
          if (c == '"') {
            if (i + 1 < n && text[i + 1] == '"') {
              field.text += '"';
              i += 2;
              continue;
            }
            ++i;
            break;
          }
          if (c == '\n') ++line;
          field.text += c;
          ++i;
        }
      } else {
        while (i < n && text[i] != ',' && text[i] != '\n' && text[i] != '\r') {
          field.text += text[i];
          ++i;
        }
      }
      rec.fields.push_back(std::move(field));
      if (i < n && text[i] == ',') {
        ++i;
        continue;
      }
      break;
    }
    if (i < n && text[i] == '\r') ++i;
    if (i < n && text[i] == '\n') {
      ++i;
      ++line;
    }
    out.push_back(std::move(rec));
  }
  return out;
}

void write_record(std::ostream& os, const std::vector<std::string>& fields) {
  for (std::size_t k = 0; k < fields.size(); ++k) {
    if (k) os << ',';
    const std::string& f = fields[k];
    bool quote = f.empty() || f.find_first_of(",\"\r\n") != std::string::npos;
    if (!quote) {
      os << f;
      continue;
    }
    os << '"';
    for (char c : f) {
      if (c == '"') os << '"';
      os << c;
    }
    os << '"';
  }
  os << '\n';
}

}  // namespace sqlsketch::csv
