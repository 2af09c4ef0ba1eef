#include <iostream>

#include "fufs/cli.hpp"

int main(int argc, char** argv) { return fufs::cli_main(argc, argv, std::cout, std::cerr); }
