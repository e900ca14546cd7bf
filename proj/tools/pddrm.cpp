#include <iostream>

#include "pddrm/cli.hpp"

int main(int argc, char** argv) {
  return pddrm::cli_main(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
