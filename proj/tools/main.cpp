#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) {
  return satakit::cli::dispatch(argc, argv, std::cout, std::cerr);
}
