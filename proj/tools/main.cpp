#include <iostream>

#include "cokrig/cli.hpp"

int main(int argc, char** argv) { return cokrig::cli::run_command(argc, argv, std::cout, std::cerr); }
