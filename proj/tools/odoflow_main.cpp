#include <iostream>
#include <string>
#include <vector>

#include "odoflow/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return odoflow::run_command(args, std::cout);
}
