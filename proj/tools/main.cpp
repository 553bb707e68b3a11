#include <iostream>
#include <string>
#include <vector>

#include "netmisfit/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return netmisfit::run_cli(args, std::cout, std::cerr);
}
