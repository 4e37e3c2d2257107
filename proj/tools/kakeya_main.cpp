#include <iostream>

#include "kakeya/cli.hpp"

int main(int argc, char** argv) { return kakeya::cli::run(argc, argv, std::cout, std::cerr); }
