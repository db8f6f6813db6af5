#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) { return ltail::cli::run(argc, argv, std::cout, std::cerr); }
