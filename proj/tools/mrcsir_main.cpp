#include <iostream>
#include <string>
#include <vector>

#include "mrcsir/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return mrcsir::cli::run(args, std::cout, std::cerr);
}
