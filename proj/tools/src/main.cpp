#include <iostream>

#include "labandit/cli/run.hpp"

int main(int argc, char** argv) {
  return labandit::cli::main_entry(argc, argv, std::cout, std::cerr);
}
