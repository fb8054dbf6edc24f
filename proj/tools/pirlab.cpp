#include <iostream>

#include "pirlab/cli.hpp"

int main(int argc, char** argv) { return pirlab::cli::run_cli(argc, argv, std::cout, std::cerr); }
