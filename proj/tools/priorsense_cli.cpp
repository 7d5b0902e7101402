#include <iostream>
#include <string>
#include <vector>

#include "priorsense/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return priorsense::cli_main(args, std::cout, std::cerr);
}
