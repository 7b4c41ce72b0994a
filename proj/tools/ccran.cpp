#include <iostream>
#include <string>
#include <vector>

#include "ccran/config.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return ccran::run_cli(args, std::cout, std::cerr);
}
