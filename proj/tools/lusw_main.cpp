#include <iostream>

#include "lusw/cli.hpp"

int main(int argc, char** argv) { return lusw::cli_main(argc, argv, std::cout, std::cerr); }
