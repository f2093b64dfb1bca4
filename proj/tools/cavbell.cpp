#include <iostream>
#include <string>
#include <vector>

#include "cavbell/cli/commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cavbell::cli::run(args, std::cout, std::cerr);
}
