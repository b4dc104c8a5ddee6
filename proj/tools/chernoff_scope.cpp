#include <iostream>

#include "chernoff/cli_runner.hpp"

int main(int argc, char** argv) { return chernoff::run_cli(argc, argv, std::cout, std::cerr); }
