#include "asym_pe/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return asym_pe::cli_main(argc, argv, std::cout, std::cerr); }
