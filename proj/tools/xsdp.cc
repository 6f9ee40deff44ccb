#include <iostream>
#include <string>
#include <vector>

#include "xsdp/cli.h"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return xsdp::run_cli(args, std::cout, std::cerr);
}
