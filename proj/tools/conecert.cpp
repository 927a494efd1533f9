#include <iostream>

#include "conecert/cli.hpp"

int main(int argc, char** argv) {
  return conecert::cli::run(argc, argv, std::cout, std::cerr);
}
