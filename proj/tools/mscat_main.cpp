#include "mscat/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
  return mscat::run_cli(argc, argv, std::cout, std::cerr);
}
