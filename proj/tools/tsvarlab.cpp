#include <iostream>

#include "tsvar/cli.hpp"

int main(int argc, char** argv) { return tsvar::cli::run(argc, argv, std::cout, std::cerr); }
