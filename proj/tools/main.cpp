#include <iostream>

#include "scsnet/cli/commands.hpp"

int main(int argc, char** argv) {
  return scsnet::cli::run_cli({argv + 1, argv + argc}, std::cout, std::cerr);
}
