#include <iostream>
#include <string>
#include <vector>

#include "rcjhand/cli.hpp"

int main(int argc, char** argv) {
  return rcjhand::run_command(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
