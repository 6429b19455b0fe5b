#include <cstdlib>
#include <iostream>

#include "newsflow/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return newsflow::run_cli(args, std::cout, std::cerr, std::getenv("NEWSFLOW_SEED"));
}
