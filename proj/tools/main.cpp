#include <iostream>

#include "qkb/cli.hpp"

int main(int argc, char** argv) {
  return qkb::cli::run(argc, argv, std::cout, std::cerr);
}
