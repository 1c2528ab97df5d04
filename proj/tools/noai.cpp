#include <string>
#include <vector>

#include "noai/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return noai::cli::run(args);
}
