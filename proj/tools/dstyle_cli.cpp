#include <iostream>
#include <string>
#include <vector>

#include "dstyle/pipeline.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dstyle::cli_main(args, std::cout, std::cerr);
}
