#include <iostream>
#include <string>
#include <vector>

#include "lafusion/cli.hpp"

int main(int argc, char** argv) {
  return lafusion::run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
