#include <iostream>

#include "fasc_tools/cli.hpp"

int main(int argc, char** argv) {
  return fasc::cli::run_cli(argc, argv, std::cout, std::cerr);
}
