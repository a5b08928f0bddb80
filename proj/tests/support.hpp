#pragma once

#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include "sqlsketch/catalog.hpp"
#include "sqlsketch/lang.hpp"

namespace sqlsketch::testing {

inline std::string data_path(const std::string& rel) {
  return std::string(SQLSKETCH_DATA_DIR) + "/" + rel;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline std::shared_ptr<const Catalog> toy_catalog() {
  static auto c = std::make_shared<const Catalog>(
      Catalog::load(data_path("toy/schema.json"), data_path("toy")));
  return c;
}

inline const char* const kAuthorSketch =
    "SELECT ??c_name:column FROM (??t:table {(contains ??c_name:column \".*Church.*\") AND "
    "(1900 <= ??c_year:column <= 2020)}) WHERE ??c_year:column = 1948";

inline const char* const kAuthorTruth =
    "SELECT authors.name FROM (authors INNER-JOIN (writes INNER-JOIN publications ON "
    "writes.pid = publications.pid) ON authors.aid = writes.aid {(contains authors.name "
    "\".*Church.*\") AND (1900 <= publications.year <= 2020)}) WHERE publications.year = 1948";

inline const char* const kThreeWayJoin =
    "SELECT authors.aid, authors.name, writes.aid, writes.pid, publications.pid, "
    "publications.title, publications.year FROM (authors INNER-JOIN (writes INNER-JOIN "
    "publications ON writes.pid = publications.pid) ON authors.aid = writes.aid)";

inline SketchAst author_sketch() { return parse_sketch(kAuthorSketch, *toy_catalog()); }
inline SketchAst author_truth() { return parse_sketch(kAuthorTruth, *toy_catalog()); }

}  // namespace sqlsketch::testing
