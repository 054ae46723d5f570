#include <iostream>
#include <string>
#include <vector>

#include "symmetra/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return symmetra::commandDispatch(args, std::cout, std::cerr);
}
