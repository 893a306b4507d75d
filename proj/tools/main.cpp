#include <iostream>
#include <string>
#include <vector>

#include "wiretap/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return wiretap::cli::run(args, std::cout, std::cerr);
}
