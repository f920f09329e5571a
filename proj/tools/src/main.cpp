#include <iostream>
#include <string>
#include <vector>

#include "tgm/tools/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return tgm::cli::run_cli(args, std::cout, std::cerr);
}
