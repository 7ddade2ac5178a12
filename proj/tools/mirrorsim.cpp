#include <unistd.h>

#include <iostream>
#include <string>
#include <vector>

#include "mirrorsim/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  mirrorsim::cli::CliEnvironment env;
  env.color = isatty(STDERR_FILENO) != 0;
  return mirrorsim::cli::run_cli(args, std::cout, std::cerr, env);
}
