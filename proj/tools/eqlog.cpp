#include "eqlog/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return eqlog::cli::run(argc, argv, std::cout, std::cerr); }
