#include <iostream>
#include <string>
#include <vector>

#include "corank2/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return corank2::cli::run(args, std::cout, std::cerr);
}
