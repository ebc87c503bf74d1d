#include <iostream>
#include <string>
#include <vector>

#include "scrforge/cli.h"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return scrforge::RunCommand(args, std::cout, std::cerr);
}
