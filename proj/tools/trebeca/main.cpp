#include <iostream>

#include "trebeca/cli.hpp"

int main(int argc, char** argv) { return trebeca::cli::run_cli(argc, argv, std::cout, std::cerr); }
