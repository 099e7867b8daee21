#include <iostream>
#include <string>
#include <vector>

#include "steinshrink/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return steinshrink::cli::run(args, std::cout, std::cerr);
}
