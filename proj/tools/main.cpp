#include <string>
#include <vector>

#include "polyvar/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return polyvar::run_cli(args);
}
