#include <iostream>

#include "dslforge/api/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dslforge::api::run_cli(args, std::cout, std::cerr);
}
