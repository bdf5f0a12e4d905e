#include <iostream>

#include "circlab/cli/cli.hpp"

int main(int argc, char** argv) { return circlab::cli::run_cli(argc, argv, std::cout, std::cerr); }
