#include <iostream>
#include <string>
#include <vector>

#include "concordance/io/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return concordance::io::run_cli(std::move(args), std::cout, std::cerr);
}
