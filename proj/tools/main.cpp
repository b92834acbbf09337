#include <iostream>
#include <string>
#include <vector>

#include "golf/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return golf::cli::run(args, std::cout, std::cerr);
}
