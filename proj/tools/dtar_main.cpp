#include <iostream>

#include "dtar/harness/cli.hpp"

int main(int argc, char** argv) { return dtar::harness::cli_main(argc, argv, std::cout, std::cerr); }
