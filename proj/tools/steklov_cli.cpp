#include "steklov/cli.hpp"

int main(int argc, char** argv) {
  return steklov::cli::run({argv + 1, argv + argc});
}
