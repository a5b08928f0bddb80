#include <iostream>

#include "sqlsketch/cli.hpp"

int main(int argc, char** argv) {
  return sqlsketch::run_cli(argc, argv, std::cin, std::cout, std::cerr);
}
