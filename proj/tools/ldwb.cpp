#include <iostream>

#include "ldwb/cli.hpp"

int main(int argc, char** argv) {
  return ldwb::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
