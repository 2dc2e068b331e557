#include "mpspec/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return mpspec::run_cli(argc, argv, std::cout, std::cerr); }
