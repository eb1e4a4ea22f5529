#include <iostream>

#include "loxobound/cli.hpp"

int main(int argc, char** argv) { return loxobound::run_cli(argc, argv, std::cout, std::cerr); }
