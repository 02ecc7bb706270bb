#include <iostream>

#include "meandim/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return meandim::run_cli(args, std::cout, std::cerr);
}
