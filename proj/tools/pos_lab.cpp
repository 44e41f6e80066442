#include <iostream>

#include "poslab/cli_io.hpp"

int main(int argc, char** argv) {
  return poslab::cli_main(argc, argv, std::cout, std::cerr);
}
