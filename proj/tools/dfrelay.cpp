#include <iostream>

#include "dfrelay/cli.hpp"

int main(int argc, char** argv) { return dfrelay::cli::run(argc, argv, std::cout, std::cerr); }
