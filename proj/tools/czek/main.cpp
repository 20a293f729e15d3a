#include <iostream>

#include "czek_cli/commands.hpp"

int main(int argc, char** argv) { return czek::cli::run(argc, argv, std::cout, std::cerr); }
