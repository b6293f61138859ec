#include <iostream>

#include "betadim/cli.hpp"

int main(int argc, char** argv) { return betadim::cli::run(argc, argv, std::cout, std::cerr); }
