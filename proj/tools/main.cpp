#include <string>
#include <vector>

#include "unduloid/cli.hpp"

int main(int argc, char** argv) {
  return unduloid::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
