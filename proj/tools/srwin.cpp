#include <iostream>

#include "srwin/cli.hpp"

int main(int argc, char** argv) { return srwin::cli::run_cli(argc, argv, std::cout, std::cerr); }
