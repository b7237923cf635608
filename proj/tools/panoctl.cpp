#include <iostream>

#include "pano/cli/cli.hpp"

int main(int argc, char** argv) { return pano::cli::run_cli(argc, argv, std::cout, std::cerr); }
