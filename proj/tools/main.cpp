#include <iostream>

#include "evcore/cli.hpp"

int main(int argc, char** argv) { return evcore::cli::run(argc, argv, std::cout, std::cerr); }
