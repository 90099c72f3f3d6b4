#include <iostream>

#include "fsup/cli/cli.hpp"

int main(int argc, char** argv) {
  return fsup::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
