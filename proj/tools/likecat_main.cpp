#include <iostream>
#include <string>
#include <vector>

#include "likecat/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return likecat::cli::run(args, std::cout, std::cerr);
}
