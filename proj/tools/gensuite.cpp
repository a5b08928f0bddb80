// Writes a suite of random benchmark cases plus a manifest for `sqlsketch bench`.
#include <iostream>

#include <CLI11.hpp>

#include "sqlsketch/error.hpp"
#include "sqlsketch/synthetic.hpp"

int main(int argc, char** argv) {
  std::string out = "suite";
  std::size_t count = 20;
  std::uint64_t seed = 1;
  sqlsketch::SyntheticOptions opts;

  CLI::App app{"Generate random catalogs with planted target queries"};
  app.add_option("--out", out, "Output directory");
  app.add_option("--count", count, "Number of cases");
  app.add_option("--seed", seed, "Random seed");
  app.add_option("--min-tables", opts.min_tables, "Fewest tables per catalog");
  app.add_option("--max-tables", opts.max_tables, "Most tables per catalog");
  app.add_option("--max-chain", opts.max_chain, "Most tables in the target join");
  app.add_option("--min-columns", opts.min_columns, "Fewest data columns per table");
  app.add_option("--max-columns", opts.max_columns, "Most data columns per table");
  CLI11_PARSE(app, argc, argv);

  try {
    auto entries = sqlsketch::write_suite(out, count, seed, opts);
    std::cout << "wrote " << entries.size() << " cases and " << out << "/manifest.json\n";
  } catch (const sqlsketch::Error& e) {
    std::cerr << e.what() << '\n';
    return 1;
  }
  return 0;
}
