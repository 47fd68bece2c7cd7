#include <iostream>
#include <string>
#include <vector>

#include "ponwm/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return ponwm::run_cli(args, std::cout, std::cerr);
}
