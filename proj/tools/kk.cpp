#include <iostream>

#include "kk/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return kk::run(args, std::cout, std::cerr);
}
