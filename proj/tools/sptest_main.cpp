#include "sptest/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return sptest::run_cli(argc, argv, std::cout, std::cerr); }
