#include <iostream>

#include "ergopt/cli.hpp"

int main(int argc, char** argv) { return ergopt::cli::run(argc, argv, std::cout, std::cerr); }
