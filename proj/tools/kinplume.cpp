#include <iostream>

#include "kinplume/app/run.hpp"

int main(int argc, char** argv) {
  return kinplume::app::run_cli(argc, argv, std::cout, std::cerr);
}
