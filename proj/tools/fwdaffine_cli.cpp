#include <iostream>
#include <string>
#include <vector>

#include "fwdaffine/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return fwdaffine::run_cli(args, std::cout, std::cerr);
}
