#include <iostream>
#include <string>
#include <vector>

#include "ltlsem/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return ltlsem::cli::run(args, std::cout, std::cerr);
}
