#include <iostream>

#include "collarkit/cli.hpp"

int main(int argc, char** argv) { return collarkit::cli_main(argc, argv, std::cout, std::cerr); }
