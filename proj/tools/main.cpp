#include "cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return bplab::cli::run(argc, argv, std::cout, std::cerr); }
