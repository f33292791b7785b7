#include <iostream>

#include "wildwarn/cli.hpp"

int main(int argc, char** argv) { return wildwarn::cli::run(argc, argv, std::cout, std::cerr); }
