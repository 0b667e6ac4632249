#include <iostream>
#include <string>
#include <vector>

#include "l2t/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return l2t::cli::execute(args, std::cin, std::cout, std::cerr);
}
