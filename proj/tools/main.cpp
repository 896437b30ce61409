#include <iostream>

#include "tender/cli/runner.hpp"

int main(int argc, char** argv) { return tender::cli::run_cli(argc, argv, std::cout, std::cerr); }
