#include <iostream>

#include "tss/commands.h"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return tss::run_command(args, std::cout, std::cerr);
}
