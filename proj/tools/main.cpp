#include <string>
#include <vector>

#include "shotbound/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return shotbound::cli::run(args);
}
